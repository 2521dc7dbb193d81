#include "tsl/json_io.hpp"

#include "tsl/averages.hpp"

#include <fstream>

namespace tsl {

Json rational_to_json(const Rational& r) { return to_fraction_string(r); }

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string()) throw ParseError("rational must be a \"p/q\" string");
    return parse_fraction(j.get<std::string>());
}

Json enclosure_to_json(const Enclosure& e) {
    if (e.is_exact()) return rational_to_json(e.lo());
    Json j;
    j["lo"] = rational_to_json(e.lo());
    j["hi"] = rational_to_json(e.hi());
    j["prec"] = e.prec();
    return j;
}

Enclosure enclosure_from_json(const Json& j) {
    if (j.is_string() || j.is_number_integer()) return Enclosure::exact(rational_from_json(j));
    if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
        throw ParseError("enclosure must be \"p/q\" or {lo,hi,prec}");
    return Enclosure::interval(rational_from_json(j.at("lo")), rational_from_json(j.at("hi")),
                               j.value("prec", 0));
}

Json finite_set_to_json(const FiniteSet& f) {
    Json j = Json::array();
    for (int v : f.elements()) j.push_back(v);
    return j;
}

FiniteSet finite_set_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("finite set must be an array of integers");
    std::vector<int> elems;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ParseError("finite set entries must be integers");
        elems.push_back(v.get<int>());
    }
    try {
        return FiniteSet(std::move(elems));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

Json family_to_json(const FamilySpec& f) {
    Json j;
    switch (f.kind()) {
        case FamilySpec::Kind::A:
            j["A"] = f.param();
            break;
        case FamilySpec::Kind::S:
            j["S"] = f.param();
            break;
        case FamilySpec::Kind::SComposeA2: {
            Json outer, inner;
            outer["S"] = f.param();
            inner["A"] = 2;
            j["compose"] = Json::array({outer, inner});
            break;
        }
    }
    return j;
}

FamilySpec family_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("family must be an object");
    if (j.contains("A")) return FamilySpec::A(j.at("A").get<int>());
    if (j.contains("S")) return FamilySpec::S(j.at("S").get<int>());
    if (j.contains("compose")) {
        const Json& c = j.at("compose");
        if (!c.is_array() || c.size() != 2) throw ParseError("compose takes [outer, inner]");
        const Json& outer = c.at(0);
        const Json& inner = c.at(1);
        if (!outer.contains("S") || !inner.contains("A") || inner.at("A").get<int>() != 2)
            throw ParseError("only the composition S_n[A_2] is supported");
        return FamilySpec::s_compose_a2(outer.at("S").get<int>());
    }
    throw ParseError("family must contain A, S or compose");
}

Json vector_to_json(const BlockVector& x) {
    Json coeffs = Json::object();
    for (const auto& [k, v] : x.coeffs()) coeffs[std::to_string(k)] = rational_to_json(v);
    Json j;
    j["coeffs"] = std::move(coeffs);
    return j;
}

BlockVector vector_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("coeffs"))
        throw ParseError("vector must be {\"coeffs\": {index: rational}}");
    std::map<int, Rational> coeffs;
    for (const auto& [key, val] : j.at("coeffs").items()) {
        int idx;
        try {
            idx = std::stoi(key);
        } catch (const std::exception&) {
            throw ParseError("bad vector index '" + key + "'");
        }
        coeffs[idx] = rational_from_json(val);
    }
    try {
        return BlockVector(std::move(coeffs));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

Json spec_to_json(const SpaceSpec& s) {
    Json j;
    j["family"] = s.family == SpaceSpec::FamilyKind::A ? "A" : "S";
    Json t;
    switch (s.thetas.kind()) {
        case ThetaGen::Kind::Geometric:
            t["geometric"] = rational_to_json(s.thetas.geometric_ratio());
            break;
        case ThetaGen::Kind::PowerLaw:
            t["power_law"] = Json{{"c", rational_to_json(s.thetas.power_law_c())},
                                  {"q", rational_to_json(s.thetas.power_law_q())}};
            break;
        case ThetaGen::Kind::LogReciprocal:
            t["log_reciprocal"] = true;
            break;
        case ThetaGen::Kind::Table: {
            Json arr = Json::array();
            for (const auto& v : s.thetas.table_values()) arr.push_back(rational_to_json(v));
            t["table"] = std::move(arr);
            break;
        }
    }
    j["thetas"] = std::move(t);
    j["modified"] = s.modified;
    j["compose_inner_A2"] = s.compose_inner_A2;
    if (!s.exponents.empty()) j["exponents"] = s.exponents;
    return j;
}

SpaceSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("space spec must be an object");
    SpaceSpec s;
    std::string fam = j.value("family", "S");
    if (fam == "A")
        s.family = SpaceSpec::FamilyKind::A;
    else if (fam == "S")
        s.family = SpaceSpec::FamilyKind::S;
    else
        throw ParseError("family must be \"A\" or \"S\"");
    if (!j.contains("thetas")) throw ParseError("space spec needs thetas");
    const Json& t = j.at("thetas");
    try {
        if (t.contains("geometric"))
            s.thetas = ThetaGen::geometric(rational_from_json(t.at("geometric")));
        else if (t.contains("power_law"))
            s.thetas = ThetaGen::power_law(rational_from_json(t.at("power_law").at("c")),
                                           rational_from_json(t.at("power_law").at("q")));
        else if (t.contains("log_reciprocal"))
            s.thetas = ThetaGen::log_reciprocal();
        else if (t.contains("table")) {
            std::vector<Rational> vals;
            for (const auto& v : t.at("table")) vals.push_back(rational_from_json(v));
            s.thetas = ThetaGen::table(std::move(vals));
        } else
            throw ParseError("thetas needs geometric, power_law, log_reciprocal or table");
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    s.modified = j.value("modified", false);
    s.compose_inner_A2 = j.value("compose_inner_A2", false);
    if (j.contains("exponents")) {
        for (const auto& v : j.at("exponents")) s.exponents.push_back(v.get<int>());
        for (std::size_t i = 0; i + 1 < s.exponents.size(); ++i)
            if (s.exponents[i] > s.exponents[i + 1])
                throw ParseError("exponents must be nondecreasing");
    }
    return s;
}

Json tree_to_json_node(const NormNode& n) {
    Json j;
    if (n.is_leaf()) {
        j["leaf"] = n.leaf_sign < 0 ? -n.leaf_index : n.leaf_index;
        return j;
    }
    j["weight_index"] = n.weight_index;
    Json kids = Json::array();
    for (const auto& c : n.children) kids.push_back(tree_to_json_node(c));
    j["children"] = std::move(kids);
    return j;
}

Json tree_to_json(const NormingTree& t) { return tree_to_json_node(t.root); }

NormNode tree_node_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("tree node must be an object");
    if (j.contains("leaf")) {
        int v = j.at("leaf").get<int>();
        if (v == 0) throw ParseError("leaf index cannot be 0");
        return NormNode::leaf(v < 0 ? -v : v, v < 0 ? -1 : 1);
    }
    if (!j.contains("weight_index") || !j.contains("children"))
        throw ParseError("internal node needs weight_index and children");
    std::vector<NormNode> kids;
    for (const auto& c : j.at("children")) kids.push_back(tree_node_from_json(c));
    if (kids.empty()) throw ParseError("internal node needs at least one child");
    return NormNode::internal(j.at("weight_index").get<int>(), std::move(kids));
}

NormingTree tree_from_json(const Json& j) { return NormingTree{tree_node_from_json(j)}; }

Json averaging_tree_to_json(const AveragingTree& t) {
    Json levels = Json::array();
    for (int j = 0; j <= t.height(); ++j) {
        Json level = Json::array();
        for (const auto& n : t.levels[j]) {
            Json node;
            node["vector"] = vector_to_json(n.vec);
            node["a"] = rational_to_json(n.coeff);
            if (j >= 1) {
                node["N"] = n.weight;
                node["eps"] = rational_to_json(n.eps);
                node["children"] = Json::array({n.child_begin, n.child_end});
            }
            level.push_back(std::move(node));
        }
        levels.push_back(std::move(level));
    }
    Json out;
    out["levels"] = std::move(levels);
    out["eps"] = rational_to_json(t.declared_eps);
    out["power_of_two"] = t.power_of_two;
    out["root_child_count_exception"] = t.root_child_count_exception;
    return out;
}

AveragingTree averaging_tree_from_json(const Json& j) {
    AveragingTree t;
    try {
        const Json& levels = j.at("levels");
        t.levels.resize(levels.size());
        for (std::size_t l = 0; l < levels.size(); ++l) {
            for (const auto& nj : levels[l]) {
                AveragingTree::Node n;
                n.vec = vector_from_json(nj.at("vector"));
                n.coeff = rational_from_json(nj.at("a"));
                if (l >= 1) {
                    n.weight = nj.at("N").get<long long>();
                    n.eps = rational_from_json(nj.at("eps"));
                    n.child_begin = nj.at("children").at(0).get<int>();
                    n.child_end = nj.at("children").at(1).get<int>();
                }
                t.levels[l].push_back(std::move(n));
            }
        }
        t.declared_eps = rational_from_json(j.at("eps"));
        t.power_of_two = j.value("power_of_two", false);
        t.root_child_count_exception = j.value("root_child_count_exception", false);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("averaging tree: ") + e.what());
    }
    // rebuild leaf ranges
    for (std::size_t m = 0; m < t.levels[0].size(); ++m) {
        t.levels[0][m].leaf_begin = static_cast<int>(m);
        t.levels[0][m].leaf_end = static_cast<int>(m) + 1;
    }
    for (int l = 1; l <= t.height(); ++l)
        for (auto& n : t.levels[l]) {
            if (n.child_begin < 0 || n.child_end > static_cast<int>(t.levels[l - 1].size()) ||
                n.child_begin >= n.child_end)
                throw ParseError("averaging tree: bad child interval");
            n.leaf_begin = t.levels[l - 1][n.child_begin].leaf_begin;
            n.leaf_end = t.levels[l - 1][n.child_end - 1].leaf_end;
        }
    return t;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

}  // namespace tsl
