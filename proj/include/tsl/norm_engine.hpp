#pragma once

#include "tsl/block_vector.hpp"
#include "tsl/norming_tree.hpp"
#include "tsl/space_spec.hpp"

namespace tsl {

struct NormOptions {
    int cap_non_modified = 16;
    int cap_modified = 12;
    int prec_bits = 64;
    Rational tolerance = Rational(1, Int(1) << 31);
    int max_prec_bits = 1024;
    /// Route exact-theta specs through the interval path (outward-rounded
    /// theta values); used to test interval soundness.
    bool force_interval = false;
};

/// The implicitly defined norm. Exact rational for rational weight
/// sequences, certified interval otherwise (refined until the tolerance or
/// the precision limit is reached).
Enclosure norm(const BlockVector& x, const SpaceSpec& spec, const NormOptions& opts = {});

struct FunctionalResult {
    NormingTree tree;
    Enclosure value;         // norm enclosure the search settled on
    bool ambiguous = false;  // interval argmax left unresolved at max precision
};

/// An optimal norming functional with full tree-analysis. Ties broken by
/// preferring a coordinate functional, then fewer blocks, then
/// lexicographically smallest minima. For x = 0 returns the leaf +e_1.
FunctionalResult norming_functional(const BlockVector& x, const SpaceSpec& spec,
                                    const NormOptions& opts = {});

/// Norm in T[S_1, theta] (single Schreier family, constant weight), computed
/// by its own recursion; theta in (0, 1]. With height_cap >= 0 only
/// functionals whose tree-analysis has height <= height_cap compete.
Rational tsirelson_norm(const BlockVector& x, const Rational& theta, int height_cap = -1,
                        int cap_support = 24);

/// Weight enclosures theta_1..theta_n_max at the given precision, clamped to
/// be endpointwise nonincreasing when the sequence is. The norm engine and
/// any external cross-check must draw thetas from here so that interval
/// endpoints agree.
std::vector<Enclosure> theta_table(const SpaceSpec& spec, int n_max, int prec_bits,
                                   bool force_interval = false);

}  // namespace tsl
