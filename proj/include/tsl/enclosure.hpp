#pragma once

#include <string>

#include "tsl/numbers.hpp"

namespace tsl {

/// A certified numeric value: either an exact rational, or an interval
/// [lo, hi] with dyadic endpoints known to contain the true value.
class Enclosure {
public:
    Enclosure() : exact_(true), lo_(0), hi_(0), prec_(0) {}

    static Enclosure exact(const Rational& v) {
        Enclosure e;
        e.exact_ = true;
        e.lo_ = e.hi_ = v;
        e.prec_ = 0;
        return e;
    }

    static Enclosure interval(const Rational& lo, const Rational& hi, int prec);

    bool is_exact() const { return exact_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    int prec() const { return prec_; }

    Rational width() const { return hi_ - lo_; }
    Rational mid() const { return (lo_ + hi_) / 2; }
    bool contains(const Rational& v) const { return lo_ <= v && v <= hi_; }
    bool overlaps(const Enclosure& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

    /// Conservative comparisons: true only when certain.
    bool definitely_lt(const Enclosure& o) const { return hi_ < o.lo_; }
    bool definitely_le(const Enclosure& o) const { return hi_ <= o.lo_; }
    bool definitely_ge(const Rational& v) const { return lo_ >= v; }
    bool definitely_le(const Rational& v) const { return hi_ <= v; }

    Enclosure operator+(const Enclosure& o) const;
    Enclosure operator-(const Enclosure& o) const;
    Enclosure operator*(const Enclosure& o) const;
    /// Division requires the divisor interval to exclude zero.
    Enclosure operator/(const Enclosure& o) const;
    Enclosure pow_int(unsigned e) const;

    std::string to_string() const;

private:
    bool exact_;
    Rational lo_, hi_;
    int prec_;
};

Enclosure enc_max(const Enclosure& a, const Enclosure& b);
Enclosure enc_min(const Enclosure& a, const Enclosure& b);
Enclosure enc_abs(const Enclosure& a);

/// Certified log2 of a positive rational: dyadic interval of width <= 2^(1-prec_bits).
Enclosure log2_enclosure(const Rational& r, int prec_bits);

/// Certified k-th root of a nonnegative rational, dyadic endpoints at 2^-prec_bits.
/// Returns an exact value when the root is exactly representable.
Enclosure kth_root_enclosure(const Rational& r, unsigned k, int prec_bits);

/// r^(p/q) for r > 0, rational exponent p/q with q >= 1 (p may be negative).
Enclosure rational_pow_enclosure(const Rational& r, const Rational& exponent, int prec_bits);

}  // namespace tsl
