#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "treefree/law.hpp"
#include "treefree/tree.hpp"

namespace treefree {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// A finite-dimensional realization of a law: a matrix with the distinguished
// unit vector e_1 (index 0).
class PointedModel {
  public:
    enum class Tag { self_adjoint, unitary };

    PointedModel() = default;
    PointedModel(Matrix op, Tag tag);

    int dim() const { return static_cast<int>(op_.rows()); }
    const Matrix& op() const { return op_; }
    Tag tag() const { return tag_; }

    // <e1, op^l e1> for l = 0..L.
    std::vector<Cx> vector_moments(int L) const;

  private:
    Matrix op_;
    Tag tag_ = Tag::self_adjoint;
};

// Largest singular value by power iteration on A*A, with a deterministic
// start vector.  Successive estimates increase toward the true norm, so an
// early stop under-reports and never overstates the truncated norm.
double operator_norm(const std::function<Vector(const Vector&)>& apply,
                     const std::function<Vector(const Vector&)>& apply_adjoint, int dim,
                     double tol = 1e-10, int max_iter = 10000);

double matrix_norm(const Matrix& a);

// GNS realization of a law: the multiplication operator compressed to
// polynomials of degree <= p in the orthonormal polynomial basis.  Needs 2p
// moments; reproduces m_l for l <= 2p-1 exactly (verified post hoc), with
// the dimension shrinking to the atom count for finitely supported laws.
PointedModel gns_realize(const ScalarLaw& mu, int degree);

// Truncated product space over the ball of the tree: one summand per vertex
// s, of dimension prod_i (dim_{s(i)} - 1).  Left actions are applied on the
// fly as sparse block maps; nothing is materialized besides the basis
// bookkeeping.
class ProductModel {
  public:
    ProductModel(TreeSpec spec, std::vector<int> dims, int level,
                 std::optional<std::int64_t> dim_cap = std::nullopt);

    const TreeSpec& spec() const { return spec_; }
    const FiniteTree& ball() const { return ball_; }
    int level() const { return ball_.depth(); }
    int factor_count() const { return static_cast<int>(dims_.size()); }
    int factor_dim(int j) const { return dims_[j - 1]; }
    std::int64_t total_dim() const { return total_; }

    Vector vacuum() const;

    // lambda_j(a) applied to x; a is factor_dim(j) x factor_dim(j).
    Vector apply_lambda(int j, const Matrix& a, const Vector& x) const;

    // Dense assembly of lambda_j(a) (small spaces only).
    Matrix lambda_dense(int j, const Matrix& a) const;

    std::int64_t vertex_offset(int vertex_id) const { return offset_[vertex_id]; }
    std::int64_t vertex_dim(int vertex_id) const { return vdim_[vertex_id]; }

  private:
    TreeSpec spec_;
    FiniteTree ball_;
    std::vector<int> dims_;
    std::vector<std::int64_t> offset_, vdim_;
    std::int64_t total_ = 0;
};

std::int64_t default_dim_cap(); // 2e5, overridable via TREEFREE_MAX_DIM

ProductModel build_product(const TreeSpec& spec, const std::vector<PointedModel>& models,
                           int level, std::optional<std::int64_t> dim_cap = std::nullopt);

struct WordFactor {
    int letter; // 1..N
    Matrix a;
};

// <xi, lambda_{j_1}(a_1) ... lambda_{j_l}(a_l) xi> on the truncation.
// Exact for words of length <= level.
Cx word_expectation(const ProductModel& pm, const std::vector<WordFactor>& word);

// Moments <xi, (sum_j lambda_j(a_j))^l xi> for l = 1..L.
std::vector<Cx> sum_moments(const ProductModel& pm, const std::vector<Matrix>& a, int L);

struct NormCheck {
    double truncated_norm = 0; // power-method estimate on the truncation
    double bound = 0;          // column/row/diagonal bound over the ball
    bool pass = false;
    double max_op_norm = 0;    // max_j ||a_j||
    double sum_sq_norms = 0;   // sum_j ||a_j||^2
    int max_up_degree = 0;     // max over ball vertices of |{j : js in T}|
};

// Checks the operator-norm bound for a sum of centered summands.  The child
// sets {j : js in T} are evaluated against the symbolic spec on every ball
// vertex; for walk trees they take no new values beyond depth 1, and for
// explicit finite specs the ball is the whole tree, so the maximum over the
// ball equals the maximum over the tree.
NormCheck norm_bound_check(const ProductModel& pm, const std::vector<Matrix>& a);

struct CouplingReport {
    double diff_norm = 0;   // || Y - Z || on the truncation
    double diff_bound = 0;  // n^{-k/2} max_j rad(mu_j)
    double z_norm = 0;      // || Z ||
    double z_bound = 0;     // 2 sqrt((N-1)/(n-1) * variance)
    bool pass = false;
};

// Couples the rescaled k-th self-convolution stage of centered models with
// its two-band (Bernoulli) part Z_j = P Y_j Q + Q Y_j P on one product
// space, and reports both norm inequalities on the truncation.
CouplingReport clt_coupling(const TreeSpec& tree, const std::vector<PointedModel>& models, int k,
                            int level, std::optional<std::int64_t> dim_cap = std::nullopt);

// The tree for the k-th self-convolution stage: identity for k = 0, the
// tree itself for k = 1, then repeated self-composition.
TreeSpec self_composition_power(const TreeSpec& tree, int k);

// *-moments of the product of unitaries joined along the tree: expectation
// of the +-1 word in prod_j [lambda_j(U_j - 1) + 1].  Exact when the ball
// contains the whole (finite) tree; enforced precondition: word length <=
// level.
Cx multiplicative_moments(const ProductModel& pm, const std::vector<Matrix>& unitaries,
                          const std::vector<int>& star_word);

// Dense matrix of the product unitary on the truncation (small spaces).
Matrix multiplicative_product_dense(const ProductModel& pm, const std::vector<Matrix>& unitaries);

} // namespace treefree
