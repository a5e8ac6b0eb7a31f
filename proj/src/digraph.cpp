#include "treefree/digraph.hpp"

namespace treefree {

Digraph compose_digraph(const Digraph& outer, const std::vector<Digraph>& inners) {
    if (static_cast<int>(inners.size()) != outer.vertex_count())
        throw validation_error("compose_digraph: need one inner digraph per outer vertex");
    std::vector<int> off(inners.size() + 1, 0);
    for (size_t j = 0; j < inners.size(); ++j)
        off[j + 1] = off[j] + inners[j].vertex_count();
    std::vector<std::pair<int, int>> edges;
    for (size_t j = 0; j < inners.size(); ++j)
        for (auto& [a, b] : inners[j].edges()) edges.emplace_back(a + off[j], b + off[j]);
    for (auto& [i, j] : outer.edges())
        for (int v = 1; v <= inners[i - 1].vertex_count(); ++v)
            for (int w = 1; w <= inners[j - 1].vertex_count(); ++w)
                edges.emplace_back(v + off[i - 1], w + off[j - 1]);
    return Digraph(off.back(), std::move(edges));
}

Digraph induced_prefix(const Digraph& g, int m) {
    if (m < 1 || m > g.vertex_count()) throw validation_error("induced_prefix: bad vertex count");
    std::vector<std::pair<int, int>> edges;
    for (auto& [a, b] : g.edges())
        if (a <= m && b <= m) edges.emplace_back(a, b);
    return Digraph(m, std::move(edges));
}

} // namespace treefree
