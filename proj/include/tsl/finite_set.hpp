#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "tsl/errors.hpp"

namespace tsl {

/// A finite subset of {1, 2, 3, ...}, kept strictly increasing.
class FiniteSet {
public:
    FiniteSet() = default;
    FiniteSet(std::initializer_list<int> xs) : elems_(xs) { validate(); }
    explicit FiniteSet(std::vector<int> xs) : elems_(std::move(xs)) { validate(); }

    static FiniteSet from_unsorted(std::vector<int> xs);

    bool empty() const { return elems_.empty(); }
    std::size_t size() const { return elems_.size(); }
    int min() const { return elems_.front(); }
    int max() const { return elems_.back(); }
    const std::vector<int>& elements() const { return elems_; }
    int operator[](std::size_t i) const { return elems_[i]; }

    bool contains(int v) const;
    bool subset_of(const FiniteSet& o) const;
    bool disjoint_from(const FiniteSet& o) const;
    /// max of this < min of other (both nonempty).
    bool before(const FiniteSet& o) const { return !empty() && !o.empty() && max() < o.min(); }

    bool operator==(const FiniteSet& o) const { return elems_ == o.elems_; }
    bool operator<(const FiniteSet& o) const { return elems_ < o.elems_; }

    std::string to_string() const;

private:
    void validate() const {
        for (std::size_t i = 0; i < elems_.size(); ++i) {
            if (elems_[i] < 1) throw Error("finite set elements must be >= 1");
            if (i > 0 && elems_[i - 1] >= elems_[i])
                throw Error("finite set must be strictly increasing");
        }
    }

    std::vector<int> elems_;
};

/// One of the families A_k, S_n, or the convolution S_n[A_2]
/// (unions of <=2-element successive chunks whose minima form an S_n set).
class FamilySpec {
public:
    enum class Kind { A, S, SComposeA2 };

    static FamilySpec A(int k);
    static FamilySpec S(int n);
    static FamilySpec s_compose_a2(int n);

    Kind kind() const { return kind_; }
    int param() const { return param_; }

    std::string to_string() const;

private:
    FamilySpec(Kind k, int p) : kind_(k), param_(p) {}
    Kind kind_;
    int param_;
};

/// Blocks of a candidate admissible/allowable sequence. When modified is
/// false the blocks must be successively ordered.
struct Partition {
    std::vector<FiniteSet> blocks;
    bool modified = false;

    FiniteSet minima() const;
};

}  // namespace tsl
