#pragma once

#include <functional>

#include "tsl/estimates.hpp"
#include "tsl/norm_engine.hpp"

namespace tsl {

/// Parameters of a space over the families (A_n): per-n q_n with
/// theta_n = 1/n^(1/q_n), the settled q (or divergence to infinity, the
/// p = 1 case), p from duality and the c_n = theta_n n^(1/q) sequence.
struct PSpaceParams {
    int horizon = 0;
    std::vector<Enclosure> q_n;      // at n = 2..horizon (q_1 is undefined)
    bool q_diverges = false;         // q_n -> infinity: p = 1, c_n = theta_n
    bool sub_one_slope = false;      // local slope below 1: not a p-space
    Enclosure q;                     // settled sup estimate (meaningless when diverging)
    Enclosure p;                     // duality 1/p + 1/q = 1
    std::vector<Enclosure> c_n;      // at n = 1..horizon
    std::vector<std::string> diagnostics;
};

PSpaceParams p_space_params(const ThetaGen& thetas, int horizon, int prec_bits = 64);

enum class SpaceClass { Class1, Class2, Unknown };

std::string to_string(SpaceClass c);

struct ClassifyOptions {
    Rational inf_threshold = Rational(1, 20);
    Rational vanish_factor = Rational(1, 2);  // last-quarter mean below factor * mid-quarter mean
};

/// Finite-horizon trend classification of the c_n sequence: Class1 when
/// bounded away from zero, Class2 when decaying to zero, Unknown otherwise.
SpaceClass classify(const PSpaceParams& params, const ClassifyOptions& opts = {});

/// True iff for the sampled sign/coefficient patterns (always including
/// all-ones) the spec norm of sum a_i blocks_i is within factor C of the
/// l_r norm of (a_i). Exhaustive over +-1 patterns for m <= 10.
bool lr_average_check(const std::vector<BlockVector>& blocks, const Rational& r,
                      const Rational& C, const SpaceSpec& spec,
                      const std::vector<std::vector<Rational>>& coeff_samples = {},
                      const NormOptions& nopts = {});

struct DeltaEstimate {
    int n = 0;
    int tailN = 0;
    int capF = 0;
    Enclosure value;            // upper estimate of the l1 spreading constant
    Rational lower_certificate; // theta_n functional bound (basis inputs)
    Json method = Json::object();
};

struct DeltaOptions {
    int grid_bits = 6;        // final mesh 2^-grid_bits
    int coarse_bits = 3;      // first sweep mesh
    NormOptions norm;
};

/// Finite-level surrogate of the l1 spreading-model index: min over
/// admissible index sets F (in S_n, min >= tailN, size <= capF) of the
/// smallest norm over the coefficient simplex, located by a dyadic grid
/// with local refinement.
DeltaEstimate delta_estimate(const std::vector<BlockVector>& vectors, int n, int tailN, int capF,
                             const SpaceSpec& spec, const DeltaOptions& opts = {});

using CoefficientNorm = std::function<Enclosure(const std::vector<Rational>&)>;

/// Checks norm_v(a) <= max_n delta_n max_{|F| <= n} norm_u(a|F) on every
/// sample (exhaustive F for supports <= 10).
bool strong_domination_check(const CoefficientNorm& u_norm, const CoefficientNorm& v_norm,
                             const std::vector<Rational>& deltas,
                             const std::vector<std::vector<Rational>>& samples);

/// Slack report for norm(sum a_i x_i) <= 4 sum_k delta_(k-1) *
/// sup_{F in S_(alpha_k), F >= k} sum_{i in F} |a_i|.
VerifyReport eq3_check(const std::vector<BlockVector>& x_vectors,
                       const std::vector<int>& alpha_seq, const std::vector<Rational>& delta_seq,
                       const std::vector<std::vector<Rational>>& coeff_samples,
                       const SpaceSpec& spec, const NormOptions& nopts = {});

}  // namespace tsl
