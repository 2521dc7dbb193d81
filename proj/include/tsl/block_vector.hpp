#pragma once

#include <map>

#include "tsl/finite_set.hpp"
#include "tsl/numbers.hpp"

namespace tsl {

/// Finitely supported vector: sparse map index -> exact rational coefficient.
class BlockVector {
public:
    BlockVector() = default;
    explicit BlockVector(std::map<int, Rational> coeffs) : coeffs_(std::move(coeffs)) {
        prune();
    }

    static BlockVector basis(int k) { return BlockVector({{k, Rational(1)}}); }

    const std::map<int, Rational>& coeffs() const { return coeffs_; }
    bool zero() const { return coeffs_.empty(); }
    Rational at(int k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    FiniteSet support() const;
    /// Minimal interval containing the support; {0, 0} for the zero vector.
    std::pair<int, int> range() const;
    int min_supp() const { return coeffs_.begin()->first; }
    int max_supp() const { return coeffs_.rbegin()->first; }

    Rational linf() const;
    Rational l1() const;

    BlockVector restricted(const FiniteSet& to) const;
    BlockVector scaled(const Rational& c) const;
    BlockVector plus(const BlockVector& o) const;
    BlockVector abs() const;

    bool operator==(const BlockVector& o) const { return coeffs_ == o.coeffs_; }

private:
    void prune() {
        for (auto it = coeffs_.begin(); it != coeffs_.end();) {
            if (it->first < 1) throw Error("vector index must be >= 1");
            if (it->second == 0)
                it = coeffs_.erase(it);
            else
                ++it;
        }
    }
    std::map<int, Rational> coeffs_;
};

}  // namespace tsl
