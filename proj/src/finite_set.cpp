#include "tsl/finite_set.hpp"

#include <algorithm>
#include <sstream>

namespace tsl {

FiniteSet FiniteSet::from_unsorted(std::vector<int> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return FiniteSet(std::move(xs));
}

bool FiniteSet::contains(int v) const {
    return std::binary_search(elems_.begin(), elems_.end(), v);
}

bool FiniteSet::subset_of(const FiniteSet& o) const {
    return std::includes(o.elems_.begin(), o.elems_.end(), elems_.begin(), elems_.end());
}

bool FiniteSet::disjoint_from(const FiniteSet& o) const {
    std::size_t i = 0, j = 0;
    while (i < elems_.size() && j < o.elems_.size()) {
        if (elems_[i] == o.elems_[j]) return false;
        if (elems_[i] < o.elems_[j])
            ++i;
        else
            ++j;
    }
    return true;
}

std::string FiniteSet::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) os << ',';
        os << elems_[i];
    }
    os << '}';
    return os.str();
}

FamilySpec FamilySpec::A(int k) {
    if (k < 1) throw Error("family A_k needs k >= 1");
    return FamilySpec(Kind::A, k);
}

FamilySpec FamilySpec::S(int n) {
    if (n < 0) throw Error("family S_n needs n >= 0");
    return FamilySpec(Kind::S, n);
}

FamilySpec FamilySpec::s_compose_a2(int n) {
    if (n < 0) throw Error("family S_n[A_2] needs n >= 0");
    return FamilySpec(Kind::SComposeA2, n);
}

std::string FamilySpec::to_string() const {
    switch (kind_) {
        case Kind::A:
            return "A_" + std::to_string(param_);
        case Kind::S:
            return "S_" + std::to_string(param_);
        case Kind::SComposeA2:
            return "S_" + std::to_string(param_) + "[A_2]";
    }
    return "?";
}

FiniteSet Partition::minima() const {
    std::vector<int> mins;
    mins.reserve(blocks.size());
    for (const auto& b : blocks) {
        if (b.empty()) throw MalformedPartition("empty block");
        mins.push_back(b.min());
    }
    std::vector<int> sorted = mins;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw MalformedPartition("blocks share a minimum");
    return FiniteSet(std::move(sorted));
}

}  // namespace tsl
