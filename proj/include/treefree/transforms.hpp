#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

#include "treefree/digraph.hpp"
#include "treefree/law.hpp"
#include "treefree/tree.hpp"

namespace treefree {

using Cx = std::complex<double>;

// An evaluable Cauchy transform z -> G(z), built as an explicit composition
// tree over matrix resolvents.  F = 1/G and K = z - F are derived views.
// Handles are immutable and reentrant.
class TransformHandle {
  public:
    virtual ~TransformHandle() = default;
    virtual Cx G(Cx z) const = 0;
    // Support radius bound; evaluation is reliable for |z| > radius().
    virtual double radius() const = 0;

    Cx F(Cx z) const { return Cx(1.0) / G(z); }
    Cx K(Cx z) const { return z - F(z); }
};

using HandlePtr = std::shared_ptr<const TransformHandle>;

// G(z) = <e1, (z - J)^{-1} e1> for the GNS matrix J of the law at the given
// degree; a rational function, exact for the truncated moment data.
HandlePtr cauchy_from_law(const ScalarLaw& mu, int degree);

// Point mass: G(z) = 1/(z - c).
HandlePtr cauchy_delta(double c);

// K_{a + b} = K_a + K_b (two-sided join at depth one).
HandlePtr conv_boolean(HandlePtr a, HandlePtr b);
// F_{a > b} = F_a o F_b.
HandlePtr conv_monotone(HandlePtr a, HandlePtr b);
// K_{a |- b} = K_a o F_b.
HandlePtr conv_orthogonal(HandlePtr a, HandlePtr b);

// Direct K-transform of the join along a finite tree ball, by recursion
// over the branches: K_T(z) = sum over root letters j of K_j(z - K_{T_j}(z))
// with depth-zero branches contributing zero.
Cx finite_tree_K(const FiniteTree& T, const std::vector<HandlePtr>& laws, Cx z);

// Handle wrapping the finite-tree recursion: G = 1/(z - K_T(z)).
HandlePtr finite_tree_handle(const FiniteTree& T, std::vector<HandlePtr> laws);

struct FixedPointResult {
    Cx K_total;
    std::vector<Cx> K_vertex;
    int iterations = 0;
};

// Picard iteration for the per-vertex K-transform system of the walk-tree
// join along a digraph: K_j(z) = K_{mu_j}(z - sum over out-neighbors i of
// K_i(z)), summed at the end.  Conservative domain |z| >= 4 * sum of radii
// or Im z >= the same; reports non-convergence rather than accepting it.
FixedPointResult digraph_fixed_point(const Digraph& g, const std::vector<HandlePtr>& laws, Cx z,
                                     double tol = 1e-12, int max_iter = 512);

HandlePtr digraph_handle(const Digraph& g, std::vector<HandlePtr> laws, double tol = 1e-12,
                         int max_iter = 512);

// Moment extraction by contour integration over |z| = rho (rho above the
// radius bound): trapezoidal rule with the given node count, checked by a
// single refinement doubling; inconsistent refinement raises an error.
std::vector<double> moments_from_handle(const TransformHandle& h, int order, double rho,
                                        int nodes = 4096, double tol = 1e-9);

// Stieltjes inversion: density(x) ~ -Im G(x + i eps) / pi.
double density_at(const TransformHandle& h, double x, double eps = 1e-3);

} // namespace treefree
