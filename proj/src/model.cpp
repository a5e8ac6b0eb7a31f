#include "treefree/model.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

namespace treefree {

PointedModel::PointedModel(Matrix op, Tag tag) : op_(std::move(op)), tag_(tag) {
    if (op_.rows() != op_.cols() || op_.rows() < 1)
        throw validation_error("model matrix must be square and nonempty");
    if (tag_ == Tag::self_adjoint) {
        const double gap = (op_ - op_.adjoint()).cwiseAbs().maxCoeff();
        if (gap > 1e-12) throw validation_error("model is not self-adjoint within 1e-12");
    } else {
        const Matrix g = op_.adjoint() * op_ - Matrix::Identity(op_.rows(), op_.cols());
        if (g.cwiseAbs().maxCoeff() > 1e-10)
            throw validation_error("model is not unitary within 1e-10");
    }
}

std::vector<Cx> PointedModel::vector_moments(int L) const {
    std::vector<Cx> out(L + 1);
    Vector v = Vector::Zero(dim());
    v(0) = 1;
    out[0] = 1;
    for (int l = 1; l <= L; ++l) {
        v = op_ * v;
        out[l] = v(0);
    }
    return out;
}

double operator_norm(const std::function<Vector(const Vector&)>& apply,
                     const std::function<Vector(const Vector&)>& apply_adjoint, int dim,
                     double tol, int max_iter) {
    if (dim == 0) return 0.0;
    std::mt19937 rng(0x5eedu);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Cx(unif(rng), unif(rng));
    v.normalize();
    double sigma = 0;
    for (int it = 0; it < max_iter; ++it) {
        Vector u = apply(v);
        const double s = u.norm();
        if (s == 0) return 0.0;
        Vector w = apply_adjoint(u / s);
        const double wn = w.norm();
        if (wn == 0) return s;
        v = w / wn;
        if (std::abs(s - sigma) <= tol * std::max(1.0, s)) return s;
        sigma = s;
    }
    return sigma;
}

double matrix_norm(const Matrix& a) {
    return operator_norm([&](const Vector& x) { return Vector(a * x); },
                         [&](const Vector& x) { return Vector(a.adjoint() * x); },
                         static_cast<int>(a.rows()));
}

namespace {

// Exact Gram-Schmidt on the monomials under the moment inner product; the
// orthogonal (unnormalized) basis keeps everything rational, and only the
// final symmetric normalization of the multiplication matrix takes square
// roots.  Monomial Gram-Schmidt in doubles would lose the higher moments to
// the Hankel matrix's conditioning.
Eigen::MatrixXd gns_exact(const std::vector<Rat>& mom, int p) {
    auto ip = [&](const std::vector<Rat>& v, const std::vector<Rat>& w, int shift) {
        Rat acc(0);
        for (size_t a = 0; a < v.size(); ++a) {
            if (v[a] == 0) continue;
            for (size_t b = 0; b < w.size(); ++b) {
                if (w[b] == 0) continue;
                acc += v[a] * w[b] * mom[a + b + shift];
            }
        }
        return acc;
    };
    std::vector<std::vector<Rat>> basis;
    std::vector<Rat> sq; // <v_k, v_k>
    for (int k = 0; k <= p; ++k) {
        std::vector<Rat> v(k + 1, Rat(0));
        v[k] = 1;
        for (size_t i = 0; i < basis.size(); ++i) {
            const Rat coeff = ip(basis[i], v, 0) / sq[i];
            for (size_t a = 0; a < basis[i].size(); ++a) v[a] -= coeff * basis[i][a];
        }
        const Rat n2 = ip(v, v, 0);
        if (n2 < 0) throw numeric_error("not-a-law: Hankel matrix is indefinite");
        if (n2 == 0) break; // finite support: the basis is complete
        basis.push_back(std::move(v));
        sq.push_back(n2);
    }
    const int r = static_cast<int>(basis.size());
    Eigen::MatrixXd A(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const Rat c = ip(basis[i], basis[j], 1);
            A(i, j) = to_double(c) / std::sqrt(to_double(sq[i]) * to_double(sq[j]));
        }
    return A;
}

Eigen::MatrixXd gns_float(const std::vector<double>& mom, int p) {
    Eigen::MatrixXd H(p + 1, p + 1), H1(p + 1, p + 1);
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) {
            H(i, j) = mom[i + j];
            H1(i, j) = mom[i + j + 1];
        }
    double scale = 1.0;
    for (int i = 0; i <= p; ++i) scale = std::max(scale, std::abs(H(i, i)));
    const double tol = 1e-10 * scale;
    std::vector<Eigen::VectorXd> basis;
    for (int k = 0; k <= p; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(p + 1);
        v(k) = 1.0;
        for (const auto& e : basis) v -= (e.dot(H * v)) * e;
        for (const auto& e : basis) v -= (e.dot(H * v)) * e; // re-orthogonalize
        const double norm2 = v.dot(H * v);
        if (norm2 < -tol) throw numeric_error("not-a-law: Hankel matrix is indefinite");
        if (norm2 <= tol) break;
        basis.push_back(v / std::sqrt(norm2));
    }
    const int r = static_cast<int>(basis.size());
    Eigen::MatrixXd A(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) A(i, j) = basis[i].dot(H1 * basis[j]);
    return 0.5 * (A + A.transpose());
}

} // namespace

PointedModel gns_realize(const ScalarLaw& mu, int degree) {
    if (degree < 0) throw validation_error("gns degree must be >= 0");
    if (mu.order() < 2 * degree)
        throw validation_error("order error: gns needs moments up to twice the degree");
    const int p = degree;

    Eigen::MatrixXd A;
    if (mu.is_exact()) {
        std::vector<Rat> mom(2 * p + 2, Rat(0));
        mom[0] = 1;
        for (int l = 1; l <= 2 * p + 1 && l <= mu.order(); ++l) mom[l] = mu.rat_moments()[l - 1];
        A = gns_exact(mom, p);
    } else {
        std::vector<double> mom(2 * p + 2, 0.0);
        mom[0] = 1;
        for (int l = 1; l <= 2 * p + 1 && l <= mu.order(); ++l) mom[l] = mu.float_moment(l);
        A = gns_float(mom, p);
    }
    if (A.rows() == 0) throw numeric_error("not-a-law: empty GNS basis");

    PointedModel model(A.cast<Cx>(), PointedModel::Tag::self_adjoint);

    // The compression reproduces the moments up to order 2p-1.
    const int check_to = std::min(mu.order(), std::max(0, 2 * p - 1));
    const auto got = model.vector_moments(check_to);
    for (int l = 1; l <= check_to; ++l) {
        const double want = mu.float_moment(l);
        if (std::abs(got[l].real() - want) > 1e-7 * std::max(1.0, std::abs(want)) ||
            std::abs(got[l].imag()) > 1e-9)
            throw numeric_error("gns moment verification failed");
    }
    return model;
}

// ---------------------------------------------------------------------------
// ProductModel

std::int64_t default_dim_cap() {
    if (const char* env = std::getenv("TREEFREE_MAX_DIM")) {
        const long long v = std::atoll(env);
        if (v > 0) return v;
    }
    return 200000;
}

ProductModel::ProductModel(TreeSpec spec, std::vector<int> dims, int level,
                           std::optional<std::int64_t> dim_cap)
    : spec_(std::move(spec)), ball_(truncate(spec_, level)), dims_(std::move(dims)) {
    if (static_cast<int>(dims_.size()) != spec_.alphabet())
        throw validation_error("product model needs one factor dimension per letter");
    for (int d : dims_)
        if (d < 1) throw validation_error("factor dimensions must be >= 1");
    const std::int64_t cap = dim_cap ? *dim_cap : default_dim_cap();
    offset_.resize(ball_.size());
    vdim_.resize(ball_.size());
    total_ = 0;
    for (size_t i = 0; i < ball_.size(); ++i) {
        std::int64_t d = 1;
        for (int letter : ball_.vertices()[i]) d *= dims_[letter - 1] - 1;
        offset_[i] = total_;
        vdim_[i] = d;
        total_ += d;
        if (total_ > cap)
            throw size_limit_error("product space dimension exceeds the cap (" +
                                   std::to_string(cap) + ")");
    }
}

Vector ProductModel::vacuum() const {
    Vector v = Vector::Zero(total_);
    v(0) = 1;
    return v;
}

Vector ProductModel::apply_lambda(int j, const Matrix& a, const Vector& x) const {
    if (j < 1 || j > factor_count()) throw validation_error("letter out of range");
    const int dj = dims_[j - 1];
    if (a.rows() != dj || a.cols() != dj)
        throw validation_error("factor matrix has the wrong dimension");
    Vector out = Vector::Zero(total_);
    const int q = dj - 1;
    for (size_t sid = 0; sid < ball_.size(); ++sid) {
        const Str& s = ball_.vertices()[sid];
        if (!s.empty() && s[0] == j) continue; // covered as the upper half of its pair
        Str js;
        js.reserve(s.size() + 1);
        js.push_back(j);
        js.insert(js.end(), s.begin(), s.end());
        const int jsid = ball_.vertex_id(js);
        if (jsid < 0) continue; // js outside the ball: lambda_j vanishes here
        const std::int64_t m = vdim_[sid];
        const std::int64_t off_s = offset_[sid];
        const std::int64_t off_js = offset_[jsid];
        for (std::int64_t mm = 0; mm < m; ++mm) {
            const Cx c = x(off_s + mm);
            Cx nc = a(0, 0) * c;
            for (int qq = 0; qq < q; ++qq) nc += a(0, qq + 1) * x(off_js + qq * m + mm);
            out(off_s + mm) += nc;
            for (int qq = 0; qq < q; ++qq) {
                Cx nw = a(qq + 1, 0) * c;
                for (int q2 = 0; q2 < q; ++q2)
                    nw += a(qq + 1, q2 + 1) * x(off_js + q2 * m + mm);
                out(off_js + qq * m + mm) += nw;
            }
        }
    }
    return out;
}

Matrix ProductModel::lambda_dense(int j, const Matrix& a) const {
    if (total_ > 4096) throw size_limit_error("dense assembly requested on a large product space");
    Matrix out(total_, total_);
    Vector e = Vector::Zero(total_);
    for (std::int64_t c = 0; c < total_; ++c) {
        e(c) = 1;
        out.col(c) = apply_lambda(j, a, e);
        e(c) = 0;
    }
    return out;
}

ProductModel build_product(const TreeSpec& spec, const std::vector<PointedModel>& models,
                           int level, std::optional<std::int64_t> dim_cap) {
    std::vector<int> dims;
    dims.reserve(models.size());
    for (auto& m : models) dims.push_back(m.dim());
    return ProductModel(spec, std::move(dims), level, dim_cap);
}

Cx word_expectation(const ProductModel& pm, const std::vector<WordFactor>& word) {
    if (static_cast<int>(word.size()) > pm.level())
        throw validation_error("truncation error: word longer than the product level");
    Vector v = pm.vacuum();
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        v = pm.apply_lambda(it->letter, it->a, v);
    return v(0);
}

std::vector<Cx> sum_moments(const ProductModel& pm, const std::vector<Matrix>& a, int L) {
    if (L > pm.level())
        throw validation_error("truncation error: moment order beyond the product level");
    if (static_cast<int>(a.size()) != pm.factor_count())
        throw validation_error("need one summand per letter");
    std::vector<Cx> out(L);
    Vector v = pm.vacuum();
    for (int l = 1; l <= L; ++l) {
        Vector next = Vector::Zero(pm.total_dim());
        for (int j = 1; j <= pm.factor_count(); ++j) next += pm.apply_lambda(j, a[j - 1], v);
        v = next;
        out[l - 1] = v(0);
    }
    return out;
}

NormCheck norm_bound_check(const ProductModel& pm, const std::vector<Matrix>& a) {
    if (static_cast<int>(a.size()) != pm.factor_count())
        throw validation_error("need one summand per letter");
    for (int j = 1; j <= pm.factor_count(); ++j) {
        if (a[j - 1].rows() != pm.factor_dim(j) || a[j - 1].cols() != pm.factor_dim(j))
            throw validation_error("summand dimension mismatch");
        if (std::abs(a[j - 1](0, 0)) > 1e-12)
            throw validation_error("norm bound needs centered summands (<xi, a xi> = 0)");
    }
    NormCheck out;

    std::vector<double> col(a.size()), row(a.size()), norms(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        col[i] = a[i].col(0).squaredNorm();
        row[i] = a[i].row(0).squaredNorm();
        norms[i] = matrix_norm(a[i]);
        out.max_op_norm = std::max(out.max_op_norm, norms[i]);
        out.sum_sq_norms += norms[i] * norms[i];
    }

    // Sup over vertices of the child-set sums, evaluated against the spec.
    double best_col = 0, best_row = 0;
    for (auto& s : pm.ball().vertices()) {
        double cs = 0, rs = 0;
        int deg = 0;
        for (int j = 1; j <= pm.factor_count(); ++j) {
            if (!s.empty() && s[0] == j) continue;
            Str js;
            js.reserve(s.size() + 1);
            js.push_back(j);
            js.insert(js.end(), s.begin(), s.end());
            if (!pm.spec().contains(js)) continue;
            cs += col[j - 1];
            rs += row[j - 1];
            ++deg;
        }
        best_col = std::max(best_col, cs);
        best_row = std::max(best_row, rs);
        out.max_up_degree = std::max(out.max_up_degree, deg);
    }
    out.bound = std::sqrt(best_col) + std::sqrt(best_row) + out.max_op_norm;

    out.truncated_norm = operator_norm(
        [&](const Vector& x) {
            Vector y = Vector::Zero(pm.total_dim());
            for (int j = 1; j <= pm.factor_count(); ++j) y += pm.apply_lambda(j, a[j - 1], x);
            return y;
        },
        [&](const Vector& x) {
            Vector y = Vector::Zero(pm.total_dim());
            for (int j = 1; j <= pm.factor_count(); ++j)
                y += pm.apply_lambda(j, Matrix(a[j - 1].adjoint()), x);
            return y;
        },
        static_cast<int>(pm.total_dim()));
    out.pass = out.truncated_norm <= out.bound + 1e-9;
    return out;
}

TreeSpec self_composition_power(const TreeSpec& tree, int k) {
    if (k < 0) throw validation_error("self-composition power needs k >= 0");
    if (k == 0) return TreeSpec::identity();
    TreeSpec out = tree;
    for (int i = 2; i <= k; ++i)
        out = compose(tree, std::vector<TreeSpec>(tree.alphabet(), out));
    return out;
}

CouplingReport clt_coupling(const TreeSpec& tree, const std::vector<PointedModel>& models, int k,
                            int level, std::optional<std::int64_t> dim_cap) {
    if (models.empty()) throw validation_error("coupling needs at least one model");
    const int N = tree.alphabet();
    const FiniteTree base_ball = truncate(tree, 1);
    require_root_degree(base_ball);
    const int n = base_ball.root_degree();

    const TreeSpec stage = self_composition_power(tree, k);
    const int count = stage.alphabet();

    std::vector<Matrix> y_ops(count), z_ops(count);
    std::vector<PointedModel> cycled;
    cycled.reserve(count);
    double max_rad = 0, variance = 0;
    for (int i = 0; i < count; ++i) {
        const PointedModel& m = models[i % models.size()];
        const Matrix& Y = m.op();
        if (std::abs(Y(0, 0)) > 1e-12)
            throw validation_error("coupling needs centered models");
        Matrix Z = Matrix::Zero(Y.rows(), Y.cols());
        Z.row(0) = Y.row(0);
        Z.col(0) = Y.col(0);
        Z(0, 0) = 0;
        y_ops[i] = Y;
        z_ops[i] = Z;
        cycled.push_back(m);
        max_rad = std::max(max_rad, matrix_norm(Y));
        variance = std::max(variance, Y.col(0).squaredNorm());
    }

    const ProductModel pm = build_product(stage, cycled, level, dim_cap);
    const double scale = std::pow(static_cast<double>(n), -0.5 * k);

    auto sum_apply = [&](const std::vector<Matrix>& ops, bool adjoint) {
        return [&pm, &ops, adjoint, scale](const Vector& x) {
            Vector y = Vector::Zero(pm.total_dim());
            for (int j = 1; j <= pm.factor_count(); ++j) {
                const Matrix m = adjoint ? Matrix(ops[j - 1].adjoint()) : ops[j - 1];
                y += pm.apply_lambda(j, m, x);
            }
            return Vector(scale * y);
        };
    };

    std::vector<Matrix> diff(count);
    for (int i = 0; i < count; ++i) diff[i] = y_ops[i] - z_ops[i];

    CouplingReport rep;
    rep.diff_norm = operator_norm(sum_apply(diff, false), sum_apply(diff, true),
                                  static_cast<int>(pm.total_dim()));
    rep.z_norm = operator_norm(sum_apply(z_ops, false), sum_apply(z_ops, true),
                               static_cast<int>(pm.total_dim()));
    rep.diff_bound = scale * max_rad;
    rep.z_bound = (N == 1 && n == 1)
                      ? 2 * std::sqrt(variance)
                      : 2 * std::sqrt(static_cast<double>(N - 1) / (n - 1) * variance);
    rep.pass = rep.diff_norm <= rep.diff_bound + 1e-9 && rep.z_norm <= rep.z_bound + 1e-9;
    return rep;
}

namespace {

Vector apply_product_unitary(const ProductModel& pm, const std::vector<Matrix>& u, bool adjoint,
                             const Vector& x) {
    // V = [l_1(U_1 - 1) + 1] ... [l_N(U_N - 1) + 1]; factors applied right to
    // left, adjoints in the reverse order.
    Vector v = x;
    const int N = pm.factor_count();
    for (int step = 0; step < N; ++step) {
        const int j = adjoint ? step + 1 : N - step;
        const Matrix& U = u[j - 1];
        const Matrix f = adjoint ? Matrix(U.adjoint() - Matrix::Identity(U.rows(), U.cols()))
                                 : Matrix(U - Matrix::Identity(U.rows(), U.cols()));
        v = v + pm.apply_lambda(j, f, v);
    }
    return v;
}

} // namespace

Cx multiplicative_moments(const ProductModel& pm, const std::vector<Matrix>& unitaries,
                          const std::vector<int>& star_word) {
    if (static_cast<int>(unitaries.size()) != pm.factor_count())
        throw validation_error("need one unitary per letter");
    for (int j = 1; j <= pm.factor_count(); ++j) {
        const Matrix& U = unitaries[j - 1];
        if (U.rows() != pm.factor_dim(j) || U.cols() != pm.factor_dim(j))
            throw validation_error("unitary dimension mismatch");
        const Matrix g = U.adjoint() * U - Matrix::Identity(U.rows(), U.cols());
        if (g.cwiseAbs().maxCoeff() > 1e-10)
            throw validation_error("factor is not unitary within 1e-10");
    }
    if (static_cast<int>(star_word.size()) > pm.level())
        throw validation_error("truncation error: star word longer than the product level");
    Vector v = pm.vacuum();
    for (auto it = star_word.rbegin(); it != star_word.rend(); ++it) {
        if (*it != 1 && *it != -1) throw validation_error("star word entries must be +-1");
        v = apply_product_unitary(pm, unitaries, *it == -1, v);
    }
    return v(0);
}

Matrix multiplicative_product_dense(const ProductModel& pm, const std::vector<Matrix>& unitaries) {
    if (pm.total_dim() > 4096)
        throw size_limit_error("dense assembly requested on a large product space");
    Matrix out(pm.total_dim(), pm.total_dim());
    Vector e = Vector::Zero(pm.total_dim());
    for (std::int64_t c = 0; c < pm.total_dim(); ++c) {
        e(c) = 1;
        out.col(c) = apply_product_unitary(pm, unitaries, false, e);
        e(c) = 0;
    }
    return out;
}

} // namespace treefree
