#include "tsl/numbers.hpp"

#include <boost/multiprecision/integer.hpp>

#include "tsl/errors.hpp"

namespace tsl {

long floor_log2(const Rational& r) {
    if (r <= 0) throw Error("floor_log2: argument must be positive");
    Int n = numerator(r), d = denominator(r);
    long k = static_cast<long>(msb(n)) - static_cast<long>(msb(d));
    // msb difference is within 1 of the true value; fix up exactly.
    while (pow2(k) > r) --k;
    while (pow2(k + 1) <= r) ++k;
    return k;
}

Int iroot_floor(const Int& n, unsigned k) {
    if (n < 0) throw Error("iroot_floor: negative argument");
    if (k == 0) throw Error("iroot_floor: zero index");
    if (n == 0 || n == 1 || k == 1) return n;
    long bits = static_cast<long>(msb(n)) + 1;
    Int hi = Int(1) << (bits / k + 1);
    Int lo = 0;
    while (lo < hi) {  // smallest x with x^k > n, minus one
        Int mid = (lo + hi) / 2;
        Int p = 1;
        bool over = false;
        for (unsigned i = 0; i < k; ++i) {
            p *= mid;
            if (p > n) {
                over = true;
                break;
            }
        }
        if (over)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo - 1;
}

bool is_power_of_two(const Int& n) {
    if (n <= 0) return false;
    return (n & (n - 1)) == 0;
}

bool is_dyadic(const Rational& r) { return is_power_of_two(denominator(r)) || denominator(r) == 1; }

std::string to_fraction_string(const Rational& r) { return r.str(); }

Rational parse_fraction(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational");
    try {
        Rational r(s);
        return r;
    } catch (const std::exception& e) {
        throw ParseError("bad rational '" + s + "': " + e.what());
    }
}

}  // namespace tsl
