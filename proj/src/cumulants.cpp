#include "treefree/cumulants.hpp"

#include <map>
#include <mutex>

namespace treefree {

void require_root_degree(const FiniteTree& T) {
    if (T.root_degree() < 2)
        throw validation_error(
            "root-degree: tree cumulants need at least two letters at the root");
}

namespace {

struct AlphaCache {
    std::mutex mtx;
    std::map<std::pair<std::string, std::string>, Rat> memo;
};

AlphaCache& alpha_cache() {
    static AlphaCache c;
    return c;
}

Rat alpha_rec(const FiniteTree& ball, const NCPartition& pi) {
    if (pi.block_count() <= 1) return Rat(1);

    const auto key = std::make_pair(ball.key(), pi.key());
    {
        std::lock_guard<std::mutex> lock(alpha_cache().mtx);
        auto it = alpha_cache().memo.find(key);
        if (it != alpha_cache().memo.end()) return it->second;
    }

    const long n = ball.root_degree();
    Rat sum(0);
    for (const auto& q : quotients(pi)) {
        // The quotient joining every block back into one reintroduces the
        // unknown coefficient; it is absorbed into the denominator below.
        if (q.full_merge) continue;
        const std::uint64_t h = hom_count(q.tau, ball);
        if (h == 0) continue;
        Rat term(h);
        for (const auto& group : q.groups) {
            std::vector<int> elements;
            for (int b : group)
                elements.insert(elements.end(), pi.blocks()[b].begin(), pi.blocks()[b].end());
            std::sort(elements.begin(), elements.end());
            term *= alpha_rec(ball, pi.restrict_to(elements));
            if (term == 0) break;
        }
        sum += term;
    }
    const Rat npow = rat_pow(Rat(n), pi.block_count());
    Rat value = pi.is_irreducible() ? Rat(sum / (npow - n)) : Rat(sum / npow);

    std::lock_guard<std::mutex> lock(alpha_cache().mtx);
    return alpha_cache().memo.try_emplace(key, std::move(value)).first->second;
}

// Weakly compatible block colorings of pi, each recorded as the list of its
// chi-components (as canonical sub-partitions).  Memoized per (ball, pi).
struct ColoringTable {
    std::mutex mtx;
    std::map<std::pair<std::string, std::string>, std::vector<std::vector<NCPartition>>> memo;
};

ColoringTable& coloring_table() {
    static ColoringTable t;
    return t;
}

void enumerate_colorings(const FiniteTree& ball, const NCPartition& pi, int block,
                         BlockColoring& chi, std::vector<Str>& reduced_chain,
                         std::vector<std::vector<NCPartition>>& out) {
    const int nb = pi.block_count();
    if (block == nb) {
        std::vector<NCPartition> comps;
        for (const auto& comp : chi_components(pi, chi)) {
            std::vector<int> elements;
            for (int b : comp)
                elements.insert(elements.end(), pi.blocks()[b].begin(), pi.blocks()[b].end());
            std::sort(elements.begin(), elements.end());
            comps.push_back(pi.restrict_to(elements));
        }
        out.push_back(std::move(comps));
        return;
    }
    const int p = pi.parent(block);
    for (int j = 1; j <= ball.alphabet(); ++j) {
        Str rc;
        if (p < 0) {
            rc = Str{j};
        } else if (chi[p] == j) {
            rc = reduced_chain[p];
        } else {
            rc.reserve(reduced_chain[p].size() + 1);
            rc.push_back(j);
            rc.insert(rc.end(), reduced_chain[p].begin(), reduced_chain[p].end());
        }
        if (!ball.contains(rc)) continue;
        chi[block] = j;
        reduced_chain[block] = std::move(rc);
        enumerate_colorings(ball, pi, block + 1, chi, reduced_chain, out);
    }
}

const std::vector<std::vector<NCPartition>>& weak_coloring_components(const FiniteTree& ball,
                                                                      const NCPartition& pi) {
    const auto key = std::make_pair(ball.key(), pi.key());
    std::lock_guard<std::mutex> lock(coloring_table().mtx);
    auto it = coloring_table().memo.find(key);
    if (it != coloring_table().memo.end()) return it->second;

    std::vector<std::vector<NCPartition>> out;
    BlockColoring chi(pi.block_count(), 0);
    std::vector<Str> reduced_chain(pi.block_count());
    enumerate_colorings(ball, pi, 0, chi, reduced_chain, out);
    return coloring_table().memo.emplace(key, std::move(out)).first->second;
}

struct ThetaCache {
    std::mutex mtx;
    std::map<std::tuple<std::string, std::string, int>, Rat> memo;
};

ThetaCache& theta_cache() {
    static ThetaCache c;
    return c;
}

Rat theta_rec(const FiniteTree& ball, const NCPartition& pi, int k) {
    if (k == 0 || pi.block_count() == 0) return Rat(1);
    const auto key = std::make_tuple(ball.key(), pi.key(), k);
    {
        std::lock_guard<std::mutex> lock(theta_cache().mtx);
        auto it = theta_cache().memo.find(key);
        if (it != theta_cache().memo.end()) return it->second;
    }
    Rat sum(0);
    for (const auto& comps : weak_coloring_components(ball, pi)) {
        Rat prod(1);
        for (const auto& comp : comps) {
            prod *= theta_rec(ball, comp, k - 1);
            if (prod == 0) break;
        }
        sum += prod;
    }
    Rat value = sum / rat_pow(Rat(ball.root_degree()), pi.block_count());
    std::lock_guard<std::mutex> lock(theta_cache().mtx);
    return theta_cache().memo.try_emplace(key, std::move(value)).first->second;
}

} // namespace

Rat alpha(const FiniteTree& T, const NCPartition& pi) {
    require_root_degree(T);
    if (pi.max_depth() > T.depth())
        throw depth_error("tree ball too shallow for the partition's nesting depth");
    // The coefficient only depends on the ball of radius depth(pi); shrinking
    // the key maximizes memo sharing.
    const FiniteTree ball = T.ball(pi.max_depth());
    return alpha_rec(ball, pi);
}

Rat theta_mass(const FiniteTree& T, const NCPartition& pi, int k) {
    require_root_degree(T);
    if (k < 0) throw validation_error("theta_mass needs k >= 0");
    if (pi.max_depth() > T.depth())
        throw depth_error("tree ball too shallow for the partition's nesting depth");
    const FiniteTree ball = T.ball(pi.max_depth());
    return theta_rec(ball, pi, k);
}

} // namespace treefree
