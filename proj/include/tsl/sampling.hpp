#pragma once

#include "tsl/averages.hpp"
#include "tsl/block_vector.hpp"
#include "tsl/norming_tree.hpp"
#include "tsl/rng.hpp"
#include "tsl/space_spec.hpp"

namespace tsl {

/// Random vector with the given support size, indices within [1, max_index],
/// nonzero rational coefficients in [-1, 1].
BlockVector random_vector(Rng& rng, int support_size, int max_index, int max_den = 8);

/// Random nonempty support set with Schreier rank <= M, size <= max_size.
FiniteSet random_schreier_set(Rng& rng, int M, int max_size, int max_index);

/// Random valid norming tree over (a subset of) the support of x.
NormingTree random_norming_tree(Rng& rng, const BlockVector& x, const SpaceSpec& spec,
                                int max_depth = 4);

/// A seeded (source tree, level, I) restriction instance: heights 1-2,
/// power-of-two weights, basis or flat-block leaves.
struct RestrictionInstance {
    AveragingTree source;
    int level = 1;
    std::vector<int> I;
};
RestrictionInstance random_restriction_instance(Rng& rng, const SpaceSpec& spec);

}  // namespace tsl
