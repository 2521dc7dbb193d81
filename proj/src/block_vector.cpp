#include "tsl/block_vector.hpp"

#include <algorithm>

namespace tsl {

FiniteSet BlockVector::support() const {
    std::vector<int> s;
    s.reserve(coeffs_.size());
    for (const auto& [k, v] : coeffs_) s.push_back(k);
    return FiniteSet(std::move(s));
}

std::pair<int, int> BlockVector::range() const {
    if (coeffs_.empty()) return {0, 0};
    return {coeffs_.begin()->first, coeffs_.rbegin()->first};
}

Rational BlockVector::linf() const {
    Rational m(0);
    for (const auto& [k, v] : coeffs_) m = std::max(m, v < 0 ? Rational(-v) : v);
    return m;
}

Rational BlockVector::l1() const {
    Rational s(0);
    for (const auto& [k, v] : coeffs_) s += (v < 0 ? Rational(-v) : v);
    return s;
}

BlockVector BlockVector::restricted(const FiniteSet& to) const {
    std::map<int, Rational> out;
    for (const auto& [k, v] : coeffs_)
        if (to.contains(k)) out.emplace(k, v);
    return BlockVector(std::move(out));
}

BlockVector BlockVector::scaled(const Rational& c) const {
    std::map<int, Rational> out;
    if (c != 0)
        for (const auto& [k, v] : coeffs_) out.emplace(k, v * c);
    return BlockVector(std::move(out));
}

BlockVector BlockVector::plus(const BlockVector& o) const {
    std::map<int, Rational> out = coeffs_;
    for (const auto& [k, v] : o.coeffs_) {
        auto [it, inserted] = out.emplace(k, v);
        if (!inserted) it->second += v;
    }
    return BlockVector(std::move(out));
}

BlockVector BlockVector::abs() const {
    std::map<int, Rational> out;
    for (const auto& [k, v] : coeffs_) out.emplace(k, v < 0 ? Rational(-v) : v);
    return BlockVector(std::move(out));
}

}  // namespace tsl
