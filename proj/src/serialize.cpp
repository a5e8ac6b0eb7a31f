#include "treefree/serialize.hpp"

namespace treefree {

namespace {

Json require(const Json& j, const char* field) {
    if (!j.contains(field))
        throw validation_error(std::string("missing field in JSON input: ") + field);
    return j.at(field);
}

} // namespace

Json digraph_to_json(const Digraph& g) {
    Json edges = Json::array();
    for (auto& [a, b] : g.edges()) edges.push_back(Json::array({a, b}));
    return Json{{"N", g.vertex_count()}, {"edges", edges}};
}

Digraph digraph_from_json(const Json& j) {
    std::vector<std::pair<int, int>> edges;
    for (auto& e : require(j, "edges")) {
        if (!e.is_array() || e.size() != 2)
            throw validation_error("digraph edges must be [from, to] pairs");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Digraph(require(j, "N").get<int>(), std::move(edges));
}

Json tree_to_json(const TreeSpec& t) {
    struct V {
        Json operator()(const FreeSpec& s) const { return {{"kind", "free"}, {"N", s.N}}; }
        Json operator()(const BoolSpec& s) const { return {{"kind", "bool"}, {"N", s.N}}; }
        Json operator()(const MonoSpec& s) const { return {{"kind", "mono"}, {"N", s.N}}; }
        Json operator()(const AntiMonoSpec& s) const {
            return {{"kind", "antimono"}, {"N", s.N}};
        }
        Json operator()(const OrthSpec&) const { return {{"kind", "orth"}}; }
        Json operator()(const SubSpec&) const { return {{"kind", "sub"}}; }
        Json operator()(const WalkSpec& s) const {
            return {{"kind", "walk"}, {"digraph", digraph_to_json(s.g)}};
        }
        Json operator()(const RegularSpec& s) const {
            return {{"kind", "regular"}, {"n", s.n}, {"d", s.d}};
        }
        Json operator()(const ExplicitSpec& s) const {
            Json verts = Json::array();
            for (auto& v : s.vertices) verts.push_back(v);
            return {{"kind", "explicit"}, {"N", s.N}, {"vertices", verts}};
        }
        Json operator()(const CompositeSpec& s) const {
            Json inners = Json::array();
            for (size_t i = 1; i < s.parts.size(); ++i) inners.push_back(tree_to_json(s.parts[i]));
            return {{"kind", "composite"}, {"outer", tree_to_json(s.parts[0])}, {"inners", inners}};
        }
        Json operator()(const PermutedSpec& s) const {
            return {{"kind", "permuted"}, {"base", tree_to_json(s.base[0])}, {"sigma", s.sigma}};
        }
    };
    return std::visit(V{}, t.variant());
}

TreeSpec tree_from_json(const Json& j) {
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind == "free") return TreeSpec::free_tree(require(j, "N").get<int>());
    if (kind == "bool") return TreeSpec::bool_tree(require(j, "N").get<int>());
    if (kind == "mono") return TreeSpec::mono_tree(require(j, "N").get<int>());
    if (kind == "antimono") return TreeSpec::anti_mono_tree(require(j, "N").get<int>());
    if (kind == "orth") return TreeSpec::orth_tree();
    if (kind == "sub") return TreeSpec::sub_tree();
    if (kind == "walk") return TreeSpec::walk_tree(digraph_from_json(require(j, "digraph")));
    if (kind == "regular")
        return TreeSpec::regular_tree(require(j, "n").get<int>(), require(j, "d").get<int>());
    if (kind == "explicit") {
        std::vector<Str> verts;
        for (auto& v : require(j, "vertices")) verts.push_back(v.get<Str>());
        return TreeSpec::explicit_tree(require(j, "N").get<int>(), std::move(verts));
    }
    if (kind == "composite") {
        std::vector<TreeSpec> inners;
        for (auto& inner : require(j, "inners")) inners.push_back(tree_from_json(inner));
        return compose(tree_from_json(require(j, "outer")), inners);
    }
    if (kind == "permuted")
        return permute(tree_from_json(require(j, "base")),
                       require(j, "sigma").get<std::vector<int>>());
    throw validation_error("unknown tree kind: " + kind);
}

Json law_to_json(const ScalarLaw& mu) {
    Json moments = Json::array();
    if (mu.is_exact()) {
        for (auto& m : mu.rat_moments()) moments.push_back(rat_to_string(m));
    } else {
        for (double m : mu.float_moments()) moments.push_back(m);
    }
    Json out{{"moments", moments}, {"exact", mu.is_exact()}};
    if (mu.radius())
        out["radius"] = to_double(*mu.radius());
    else
        out["radius"] = nullptr;
    return out;
}

ScalarLaw law_from_json(const Json& j) {
    const bool exact = j.value("exact", true);
    std::optional<double> radius;
    if (j.contains("radius") && !j.at("radius").is_null())
        radius = j.at("radius").get<double>();
    const Json& moments = require(j, "moments");
    if (exact) {
        std::vector<Rat> m;
        for (auto& x : moments) {
            if (x.is_string())
                m.push_back(rat_from_string(x.get<std::string>()));
            else if (x.is_number_integer())
                m.push_back(Rat(x.get<long long>()));
            else
                throw validation_error(
                    "exact law moments must be integers or \"p/q\" strings");
        }
        std::optional<Rat> r;
        if (radius) r = Rat(*radius);
        return ScalarLaw::exact(std::move(m), std::move(r));
    }
    std::vector<double> m;
    for (auto& x : moments) m.push_back(x.get<double>());
    return ScalarLaw::approx(std::move(m), radius);
}

Json model_to_json(const PointedModel& m) {
    Json matrix = Json::array();
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            matrix.push_back(Json::array({m.op()(i, j).real(), m.op()(i, j).imag()}));
    return Json{{"dim", m.dim()},
                {"matrix", matrix},
                {"tag", m.tag() == PointedModel::Tag::self_adjoint ? "selfadjoint" : "unitary"}};
}

PointedModel model_from_json(const Json& j) {
    const int dim = require(j, "dim").get<int>();
    const Json& mat = require(j, "matrix");
    if (static_cast<int>(mat.size()) != dim * dim)
        throw validation_error("model matrix must have dim^2 [re, im] entries");
    Matrix op(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const Json& e = mat[i * dim + k];
            op(i, k) = Cx(e[0].get<double>(), e[1].get<double>());
        }
    const std::string tag = j.value("tag", "selfadjoint");
    return PointedModel(std::move(op), tag == "unitary" ? PointedModel::Tag::unitary
                                                        : PointedModel::Tag::self_adjoint);
}

Json finite_tree_to_json(const FiniteTree& t) {
    Json verts = Json::array();
    for (auto& v : t.vertices()) verts.push_back(str_to_string(v));
    return Json{{"N", t.alphabet()}, {"depth", t.depth()}, {"vertices", verts}};
}

} // namespace treefree
