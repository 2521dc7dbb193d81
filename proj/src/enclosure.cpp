#include "tsl/enclosure.hpp"

#include <algorithm>

#include "tsl/errors.hpp"

namespace tsl {

Enclosure Enclosure::interval(const Rational& lo, const Rational& hi, int prec) {
    if (lo > hi) throw Error("enclosure: lo > hi");
    Enclosure e;
    if (lo == hi) return exact(lo);
    e.exact_ = false;
    e.lo_ = lo;
    e.hi_ = hi;
    e.prec_ = prec;
    return e;
}

Enclosure Enclosure::operator+(const Enclosure& o) const {
    if (exact_ && o.exact_) return exact(lo_ + o.lo_);
    return interval(lo_ + o.lo_, hi_ + o.hi_, std::max(prec_, o.prec_));
}

Enclosure Enclosure::operator-(const Enclosure& o) const {
    if (exact_ && o.exact_) return exact(lo_ - o.lo_);
    return interval(lo_ - o.hi_, hi_ - o.lo_, std::max(prec_, o.prec_));
}

Enclosure Enclosure::operator*(const Enclosure& o) const {
    if (exact_ && o.exact_) return exact(lo_ * o.lo_);
    Rational p1 = lo_ * o.lo_, p2 = lo_ * o.hi_, p3 = hi_ * o.lo_, p4 = hi_ * o.hi_;
    Rational lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rational hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return interval(lo, hi, std::max(prec_, o.prec_));
}

Enclosure Enclosure::operator/(const Enclosure& o) const {
    if (o.lo_ <= 0 && o.hi_ >= 0) throw Error("enclosure division by interval containing zero");
    if (exact_ && o.exact_) return exact(lo_ / o.lo_);
    Rational p1 = lo_ / o.lo_, p2 = lo_ / o.hi_, p3 = hi_ / o.lo_, p4 = hi_ / o.hi_;
    Rational lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rational hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return interval(lo, hi, std::max(prec_, o.prec_));
}

Enclosure Enclosure::pow_int(unsigned e) const {
    Enclosure r = exact(Rational(1));
    Enclosure base = *this;
    while (e > 0) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

std::string Enclosure::to_string() const {
    if (exact_) return to_fraction_string(lo_);
    return "[" + to_fraction_string(lo_) + ", " + to_fraction_string(hi_) + "]";
}

Enclosure enc_max(const Enclosure& a, const Enclosure& b) {
    if (a.is_exact() && b.is_exact()) return Enclosure::exact(std::max(a.lo(), b.lo()));
    return Enclosure::interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()),
                               std::max(a.prec(), b.prec()));
}

Enclosure enc_min(const Enclosure& a, const Enclosure& b) {
    if (a.is_exact() && b.is_exact()) return Enclosure::exact(std::min(a.lo(), b.lo()));
    return Enclosure::interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()),
                               std::max(a.prec(), b.prec()));
}

Enclosure enc_abs(const Enclosure& a) {
    if (a.lo() >= 0) return a;
    if (a.hi() <= 0) return Enclosure::exact(Rational(0)) - a;
    return Enclosure::interval(Rational(0), std::max(Rational(-a.lo()), a.hi()), a.prec());
}

namespace {

Rational round_down(const Rational& r, int prec_bits) {
    return Rational(floor_rational(r * pow2(prec_bits))) / pow2(prec_bits);
}

Rational round_up(const Rational& r, int prec_bits) {
    return Rational(ceil_rational(r * pow2(prec_bits))) / pow2(prec_bits);
}

// One directed run of the shift-and-square fractional-log extraction on a
// fixed-point value x*2^g in [2^g, 2^(g+1)). round_up selects the rounding
// direction; the result is a valid lower (resp. upper) bound on frac(log2 x).
Rational log2_frac_directed(Int x, int g, int bits, bool up) {
    Rational acc(0);
    Int unit = Int(1) << g;
    Int two_units = unit << 1;
    for (int i = 1; i <= bits; ++i) {
        Int sq = x * x;
        if (up) {
            x = (sq >> g) + (((sq & (unit - 1)) != 0) ? 1 : 0);  // ceil(sq / 2^g)
        } else {
            x = sq >> g;
        }
        if (x >= two_units) {
            acc += pow2(-i);
            x >>= 1;
        }
        if (x < unit) x = unit;  // guard against rounding drift below 1.0
    }
    return acc;
}

}  // namespace

Enclosure log2_enclosure(const Rational& r, int prec_bits) {
    if (r <= 0) throw Error("log2 of non-positive value");
    long e = floor_log2(r);
    Rational x = r / pow2(e);  // in [1, 2)
    if (x == 1) return Enclosure::exact(Rational(e));
    int g = prec_bits + 16;
    Int xf_lo = floor_rational(x * pow2(g));
    Int xf_hi = ceil_rational(x * pow2(g));
    Rational frac_lo = log2_frac_directed(xf_lo, g, prec_bits, false);
    Rational frac_hi = log2_frac_directed(xf_hi, g, prec_bits, true) + pow2(-prec_bits);
    if (frac_hi > 1) frac_hi = 1;
    return Enclosure::interval(Rational(e) + frac_lo, Rational(e) + frac_hi, prec_bits);
}

Enclosure kth_root_enclosure(const Rational& r, unsigned k, int prec_bits) {
    if (r < 0) throw Error("kth root of negative value");
    if (k == 0) throw Error("0th root");
    if (r == 0) return Enclosure::exact(Rational(0));
    if (k == 1) return Enclosure::exact(r);
    // Exact case: numerator and denominator both perfect k-th powers.
    {
        Int rn = iroot_floor(numerator(r), k), rd = iroot_floor(denominator(r), k);
        Int pn = 1, pd = 1;
        for (unsigned i = 0; i < k; ++i) {
            pn *= rn;
            pd *= rd;
        }
        if (pn == numerator(r) && pd == denominator(r)) return Enclosure::exact(Rational(rn, rd));
    }
    Rational scaled = r * pow2(static_cast<long>(k) * prec_bits);
    Int lo_i = iroot_floor(floor_rational(scaled), k);
    Int hi_i = iroot_floor(ceil_rational(scaled), k) + 1;
    return Enclosure::interval(Rational(lo_i) / pow2(prec_bits), Rational(hi_i) / pow2(prec_bits),
                               prec_bits);
}

Enclosure rational_pow_enclosure(const Rational& r, const Rational& exponent, int prec_bits) {
    if (r <= 0) throw Error("rational_pow: base must be positive");
    Int p = numerator(exponent);
    Int q = denominator(exponent);
    bool neg = p < 0;
    if (neg) p = -p;
    if (p > 64 || q > 64) throw Error("rational_pow: exponent too large");
    unsigned pu = static_cast<unsigned>(p), qu = static_cast<unsigned>(q);
    Rational powed = 1;
    for (unsigned i = 0; i < pu; ++i) powed *= r;
    Enclosure root = kth_root_enclosure(powed, qu, prec_bits);
    if (neg) return Enclosure::exact(Rational(1)) / root;
    return root;
}

}  // namespace tsl
