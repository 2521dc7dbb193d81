#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace tsl {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// 2^e for possibly negative e.
inline Rational pow2(long e) {
    if (e >= 0) return Rational(Int(1) << e);
    return Rational(1, Int(1) << (-e));
}

inline Int floor_rational(const Rational& r) {
    Int n = numerator(r), d = denominator(r);
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

inline Int ceil_rational(const Rational& r) {
    return -floor_rational(-r);
}

/// Largest k with 2^k <= r; requires r > 0.
long floor_log2(const Rational& r);

/// floor(n^(1/k)) for n >= 0, k >= 1.
Int iroot_floor(const Int& n, unsigned k);

bool is_power_of_two(const Int& n);
bool is_dyadic(const Rational& r);

/// Serialized as "p" or "p/q"; parse accepts both.
std::string to_fraction_string(const Rational& r);
Rational parse_fraction(const std::string& s);

}  // namespace tsl
