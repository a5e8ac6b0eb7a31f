#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "treefree/cumulants.hpp"
#include "treefree/rational.hpp"
#include "treefree/tree.hpp"

namespace treefree {

// A compactly supported distribution given by its moment sequence m_1..m_L
// (m_0 = 1 implicit) plus an optional radius bound.  Moments are either all
// exact rationals or all doubles; mixing in binary operations promotes to
// doubles.
class ScalarLaw {
  public:
    ScalarLaw() = default;

    static ScalarLaw exact(std::vector<Rat> moments, std::optional<Rat> radius = std::nullopt);
    static ScalarLaw approx(std::vector<double> moments,
                            std::optional<double> radius = std::nullopt);

    // Point mass at c: m_l = c^l, radius |c|.
    static ScalarLaw delta(const Rat& c, int order);
    // Symmetric Bernoulli at +-1.
    static ScalarLaw bernoulli(int order);
    // Atomic law sum w_i delta_{x_i}; weights must be positive with sum 1.
    static ScalarLaw atomic(const std::vector<std::pair<Rat, Rat>>& atom_weight_pairs, int order);

    bool is_exact() const { return std::holds_alternative<std::vector<Rat>>(m_); }
    int order() const;
    const std::vector<Rat>& rat_moments() const;
    std::vector<double> float_moments() const;
    double float_moment(int l) const; // l >= 0, m_0 = 1

    const std::optional<Rat>& radius() const { return radius_; }
    void set_radius(std::optional<Rat> r) { radius_ = std::move(r); }
    double float_radius_or(double fallback) const;

    ScalarLaw truncated(int L) const;
    ScalarLaw to_float() const;

    // Hankel positive-semidefiniteness of (m_{i+j})_{0<=i,j<=floor(L/2)}.
    // Exact symmetric factorization in rational mode; tolerance 1e-10 on the
    // pivots in float mode.
    bool hankel_psd(double tol = 1e-10) const;

    bool operator==(const ScalarLaw& o) const { return m_ == o.m_; }

  private:
    std::variant<std::vector<Rat>, std::vector<double>> m_ = std::vector<Rat>{};
    std::optional<Rat> radius_;
};

// Law of the sum of independent variables joined along the tree: the moment
// formula summed over compatible colored non-crossing partitions, with the
// coloring sum folded into a walk over the tree ball.  Defined for any tree
// with at least the root (n >= 2 not required).
ScalarLaw convolve(const TreeSpec& tree, const std::vector<ScalarLaw>& laws, int order);

// Mixed moment of x_{chi(1)} ... x_{chi(l)} in the product, for laws indexed
// by the position coloring chi (letters 1..N).
Rat word_moment_exact(const TreeSpec& tree, const std::vector<ScalarLaw>& laws,
                      const std::vector<int>& chi);
double word_moment(const TreeSpec& tree, const std::vector<ScalarLaw>& laws,
                   const std::vector<int>& chi);

// Convolution power: tree cumulants scaled by t >= 0.
ScalarLaw convolution_power(const ScalarLaw& mu, const TreeSpec& tree, const Rat& t, int order);

// dil_c: m_l -> c^l m_l.
ScalarLaw dilate(const Rat& c, const ScalarLaw& mu);
ScalarLaw dilate(double c, const ScalarLaw& mu);

// Central limit law for the tree: all cumulants zero except the second.
ScalarLaw clt_law(const TreeSpec& tree, const Rat& variance, int order);

struct CltRow {
    int k;
    int order;
    double gap; // |m_order(dil_{n^{-k/2}} power_k) - m_order(limit law)|
};

// Convergence table of the rescaled iterated self-convolutions toward the
// central limit law; requires a centered law.
std::vector<CltRow> clt_convergence(const ScalarLaw& mu, const TreeSpec& tree, int k_max,
                                    int order);

// Infinitely divisible law from the pair (c, sigma): first cumulant c, and
// higher cumulants kappa_l = mass * m_{l-2}(sigma) for l >= 2, where sigma
// is given as a normalized law scaled by a total mass.
ScalarLaw id_law(const TreeSpec& tree, const Rat& c, const Rat& sigma_mass,
                 const ScalarLaw& sigma, int order);

// Cumulant transplantation: the to-tree cumulants of the result equal the
// from-tree cumulants of mu.
ScalarLaw bp_bijection(const ScalarLaw& mu, const TreeSpec& from_tree, const TreeSpec& to_tree,
                       int order);

// (mu^{boxplus (1+t)})^{uplus 1/(1+t)} for t >= 0.
ScalarLaw bn_semigroup(const ScalarLaw& mu, const Rat& t, int order);

// Moment metric sup_l |m_l(a) - m_l(b)| / (2R)^l over the shared orders.
double moment_metric(const ScalarLaw& a, const ScalarLaw& b, double R);

} // namespace treefree
