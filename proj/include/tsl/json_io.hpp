#pragma once

#include <json.hpp>

#include "tsl/block_vector.hpp"
#include "tsl/enclosure.hpp"
#include "tsl/finite_set.hpp"
#include "tsl/norming_tree.hpp"
#include "tsl/space_spec.hpp"

namespace tsl {

using Json = nlohmann::json;  // keys serialize in sorted order: deterministic output

// Rationals travel as "p/q" strings, enclosures as {"lo","hi","prec"}.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json enclosure_to_json(const Enclosure& e);
Enclosure enclosure_from_json(const Json& j);

Json finite_set_to_json(const FiniteSet& f);           // [2,3,4]
FiniteSet finite_set_from_json(const Json& j);

Json family_to_json(const FamilySpec& f);              // {"S":1} / {"A":2} / {"compose":[...]}
FamilySpec family_from_json(const Json& j);

Json vector_to_json(const BlockVector& x);             // {"coeffs":{"3":"1/2",...}}
BlockVector vector_from_json(const Json& j);

Json spec_to_json(const SpaceSpec& s);
SpaceSpec spec_from_json(const Json& j);

Json tree_to_json(const NormingTree& t);               // {"weight_index":n,"children":[...]} / {"leaf":±k}
NormingTree tree_from_json(const Json& j);

class AveragingTree;  // tsl/averages.hpp
Json averaging_tree_to_json(const AveragingTree& t);
AveragingTree averaging_tree_from_json(const Json& j);

Json load_json_file(const std::string& path);

}  // namespace tsl
