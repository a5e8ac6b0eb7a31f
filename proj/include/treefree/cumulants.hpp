#pragma once

#include <vector>

#include "treefree/ncpartition.hpp"
#include "treefree/rational.hpp"
#include "treefree/tree.hpp"

namespace treefree {

// Coefficient of the tree moment-cumulant formula, exact.  Requires the tree
// to have root degree n >= 2 and depth at least the nesting depth of pi.
// Depends only on the ball of radius depth(pi); memoized on (ball, rgs).
Rat alpha(const FiniteTree& T, const NCPartition& pi);

// Total mass of the k-step coloring measure for pi: starts at 1 for k = 0
// and converges to alpha(T, pi) geometrically in k.  Computed by dynamic
// programming over weakly compatible block colorings, never enumerating
// coloring sequences.
Rat theta_mass(const FiniteTree& T, const NCPartition& pi, int k);

void require_root_degree(const FiniteTree& T);

// --- moment <-> cumulant transforms on plain coefficient vectors ---------
// Conventions: index i holds the order-(i+1) entry; m_0 = 1 is implicit.

// Boolean cumulants solve m_l = sum_{j=1..l} b_j m_{l-j}.
template <class S>
std::vector<S> boolean_cumulants_from_moments(const std::vector<S>& m) {
    const size_t L = m.size();
    std::vector<S> b(L), full(L + 1);
    full[0] = S(1);
    for (size_t l = 1; l <= L; ++l) {
        S acc = m[l - 1];
        for (size_t j = 1; j < l; ++j) acc -= b[j - 1] * full[l - j];
        b[l - 1] = acc;
        full[l] = m[l - 1];
    }
    return b;
}

template <class S>
std::vector<S> moments_from_boolean_cumulants(const std::vector<S>& b) {
    const size_t L = b.size();
    std::vector<S> full(L + 1);
    full[0] = S(1);
    for (size_t l = 1; l <= L; ++l) {
        S acc = S(0);
        for (size_t j = 1; j <= l; ++j) acc += b[j - 1] * full[l - j];
        full[l] = acc;
    }
    return std::vector<S>(full.begin() + 1, full.end());
}

// m_l = sum over non-crossing pi of alpha(T, pi) * prod_V kappa_{|V|}.
template <class S>
std::vector<S> moments_from_tfree_cumulants(const std::vector<S>& kappa, const FiniteTree& T) {
    require_root_degree(T);
    const int L = static_cast<int>(kappa.size());
    if (L > 14) throw size_limit_error("cumulant transforms limited to order 14");
    if (T.depth() < L) throw depth_error("tree ball too shallow for the requested order");
    std::vector<S> m(L);
    for (int l = 1; l <= L; ++l) {
        S acc = S(0);
        for (const auto& pi : enumerate_nc(l)) {
            S prod = scalar_from_rat<S>(alpha(T, pi));
            for (const auto& blk : pi.blocks()) prod *= kappa[blk.size() - 1];
            acc += prod;
        }
        m[l - 1] = acc;
    }
    return m;
}

// Triangular inverse of the above: the single-block partition is the only
// one involving kappa_l, and its coefficient is 1.
template <class S>
std::vector<S> tfree_cumulants_from_moments(const std::vector<S>& m, const FiniteTree& T) {
    require_root_degree(T);
    const int L = static_cast<int>(m.size());
    if (L > 14) throw size_limit_error("cumulant transforms limited to order 14");
    if (T.depth() < L) throw depth_error("tree ball too shallow for the requested order");
    std::vector<S> kappa(L);
    for (int l = 1; l <= L; ++l) {
        S acc = m[l - 1];
        for (const auto& pi : enumerate_nc(l)) {
            if (pi.block_count() == 1) continue;
            S prod = scalar_from_rat<S>(alpha(T, pi));
            for (const auto& blk : pi.blocks()) prod *= kappa[blk.size() - 1];
            acc -= prod;
        }
        kappa[l - 1] = acc;
    }
    return kappa;
}

// Boolean cumulants in terms of tree cumulants: sum over irreducible
// partitions of alpha(T, pi) * prod kappa_{|V|}.
template <class S>
std::vector<S> boolean_from_tfree_cumulants(const std::vector<S>& kappa, const FiniteTree& T) {
    require_root_degree(T);
    const int L = static_cast<int>(kappa.size());
    if (L > 14) throw size_limit_error("cumulant transforms limited to order 14");
    if (T.depth() < L) throw depth_error("tree ball too shallow for the requested order");
    std::vector<S> b(L);
    for (int l = 1; l <= L; ++l) {
        S acc = S(0);
        for (const auto& pi : enumerate_nc(l)) {
            if (!pi.is_irreducible()) continue;
            S prod = scalar_from_rat<S>(alpha(T, pi));
            for (const auto& blk : pi.blocks()) prod *= kappa[blk.size() - 1];
            acc += prod;
        }
        b[l - 1] = acc;
    }
    return b;
}

} // namespace treefree
