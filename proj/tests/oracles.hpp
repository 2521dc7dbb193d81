#pragma once

// Independent reference implementations used to freeze expected values in
// tests. They deliberately avoid the shortcuts of the main code paths:
// membership tries every decomposition, the norm oracle enumerates every
// admissible/allowable functional over arbitrary blocks and every weight
// index, and the sum oracle tries every subset.

#include "tsl/block_vector.hpp"
#include "tsl/norm_engine.hpp"
#include "tsl/schreier.hpp"
#include "tsl/space_spec.hpp"

namespace tsl::oracle {

/// S_n membership by exhaustive decomposition into successive pieces.
bool member_schreier(const FiniteSet& f, int n);

/// Exhaustive sup over the norming set: arbitrary successive (or disjoint,
/// for modified specs) blocks, every weight index up to n_max, single-block
/// applications included. Shares the engine's theta table so interval
/// endpoints are comparable.
Enclosure norm(const BlockVector& x, const SpaceSpec& spec, int prec_bits = 64,
               bool force_interval = false);

/// Best S_M-subset weight sum by scanning every subset of the keys.
Rational max_schreier_sum(const std::map<int, Rational>& weights, int M);

/// Bell numbers B_0..B_n.
std::vector<Int> bell_numbers(int n);

}  // namespace tsl::oracle
