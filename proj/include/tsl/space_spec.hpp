#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsl/enclosure.hpp"
#include "tsl/finite_set.hpp"

namespace tsl {

/// Generator for the weight sequence (theta_n).
class ThetaGen {
public:
    enum class Kind { Geometric, PowerLaw, LogReciprocal, Table };

    /// theta_n = theta^n.
    static ThetaGen geometric(const Rational& theta);
    /// theta_n = c / n^(1/q), q >= 1.
    static ThetaGen power_law(const Rational& c, const Rational& q);
    /// theta_n = 1 / log2(n + 1).
    static ThetaGen log_reciprocal();
    /// Explicit finite table theta_1, theta_2, ...
    static ThetaGen table(std::vector<Rational> values);

    Kind kind() const { return kind_; }
    const Rational& geometric_ratio() const { return geo_; }
    const Rational& power_law_c() const { return c_; }
    const Rational& power_law_q() const { return q_; }
    const std::vector<Rational>& table_values() const { return table_; }

    /// True when every theta_n is an exact rational.
    bool exact() const;
    /// Largest usable index (table length), or nullopt when unbounded.
    std::optional<int> max_index() const;
    /// theta_n as exact rational, when representable and in range.
    std::optional<Rational> theta_exact(int n) const;
    /// theta_n as certified enclosure; throws if n is out of table range.
    Enclosure theta(int n, int prec_bits) const;

private:
    Kind kind_ = Kind::Geometric;
    Rational geo_, c_, q_;
    std::vector<Rational> table_;
};

/// The pair of sequences ((M_n), (theta_n)) plus the modified flag; fully
/// determines a norm. M_n is A_(k_n) or S_(k_n), default k_n = n.
struct SpaceSpec {
    enum class FamilyKind { A, S };

    FamilyKind family = FamilyKind::S;
    ThetaGen thetas = ThetaGen::geometric(Rational(1, 2));
    bool modified = false;
    /// Replace S_(k_n) by S_(k_n)[A_2] (the convolution variant).
    bool compose_inner_A2 = false;
    /// Nondecreasing exponents k_n; empty means k_n = n.
    std::vector<int> exponents;

    int k_of(int n) const;
    /// Least weight index n whose family accepts Schreier rank / block
    /// count `r`, respecting the exponent table and theta range.
    std::optional<int> least_index_for(int r) const;

    /// The family used at weight index n (A_(k_n), S_(k_n) or S_(k_n)[A_2]).
    FamilySpec family_at(int n) const;

    /// theta = sup_n theta_n^(1/n). Exact for geometric; equals 1 for
    /// power-law and log-reciprocal weights.
    Enclosure theta_limit(int prec_bits) const;

    /// Nonincreasing + supermultiplicativity diagnostics up to `bound`.
    std::vector<std::string> regularity_violations(int bound, int prec_bits = 64) const;
    /// theta_(n+m) <= theta_n * theta^m up to `bound` (conservatively).
    bool clubsuit_holds(int bound, int prec_bits = 64) const;

    // Common instances.
    static SpaceSpec tsirelson_like_table(int len = 12);  // S-kind, table (1/2)^n
    static SpaceSpec schreier_geometric(const Rational& theta, bool modified = false);
    static SpaceSpec schreier_compose_a2(const Rational& theta);
    static SpaceSpec a_power_law(const Rational& c, const Rational& q);
    static SpaceSpec schlumprecht();
};

}  // namespace tsl
