#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "treefree/error.hpp"

namespace treefree {

// Simple digraph on the vertex set [1..N]: an irreflexive edge relation,
// stored as a sorted list of ordered pairs for O(log E) membership.
class Digraph {
  public:
    Digraph() = default;
    Digraph(int n, std::vector<std::pair<int, int>> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ < 1) throw validation_error("digraph needs at least one vertex");
        for (auto& [a, b] : edges_) {
            if (a < 1 || a > n_ || b < 1 || b > n_)
                throw validation_error("digraph edge endpoint out of range");
            if (a == b) throw validation_error("digraph edges must be irreflexive");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    int vertex_count() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool adjacent(int from, int to) const {
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(from, to));
    }

    std::vector<int> out_neighbors(int v) const {
        std::vector<int> out;
        auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(v, 0));
        for (; it != edges_.end() && it->first == v; ++it) out.push_back(it->second);
        return out;
    }

    bool operator==(const Digraph& o) const = default;

    // Complete graph K_N: every ordered pair of distinct vertices.
    static Digraph complete(int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                if (i != j) e.emplace_back(i, j);
        return Digraph(n, std::move(e));
    }

    static Digraph edgeless(int n) { return Digraph(n, {}); }

    // Directed complete graph: edge i -> j iff i < j.
    static Digraph increasing(int n) {
        std::vector<std::pair<int, int>> e;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) e.emplace_back(i, j);
        return Digraph(n, std::move(e));
    }

    // d-regular digraph on max(n, d+1) vertices: each vertex points to the d
    // vertices following it cyclically.  Vertices [1..n] serve as the allowed
    // walk starting points for the (n, d)-regular tree (see tree.hpp).
    static Digraph cyclic_regular(int n, int d) {
        if (n < 1 || d < 0) throw validation_error("regular digraph needs n >= 1, d >= 0");
        const int verts = std::max(n, d + 1);
        std::vector<std::pair<int, int>> e;
        for (int v = 1; v <= verts; ++v)
            for (int t = 1; t <= d; ++t) e.emplace_back(v, (v - 1 + t) % verts + 1);
        return Digraph(verts, std::move(e));
    }

  private:
    int n_ = 1;
    std::vector<std::pair<int, int>> edges_;
};

// Operad composition: disjoint union of the inner digraphs, plus an edge
// from every vertex of inner i to every vertex of inner j for each outer
// edge i -> j.  Vertex relabeling is by consecutive blocks.
Digraph compose_digraph(const Digraph& outer, const std::vector<Digraph>& inners);

// Induced sub-digraph on vertices [1..m] (relabeled identically).
Digraph induced_prefix(const Digraph& g, int m);

} // namespace treefree
