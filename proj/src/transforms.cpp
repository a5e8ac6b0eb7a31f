#include "treefree/transforms.hpp"

#include "treefree/model.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace treefree {

namespace {

class ResolventHandle final : public TransformHandle {
  public:
    ResolventHandle(Eigen::MatrixXd jacobi, double radius)
        : jacobi_(std::move(jacobi)), radius_(radius) {}

    Cx G(Cx z) const override {
        const int n = static_cast<int>(jacobi_.rows());
        Matrix A = -jacobi_.cast<Cx>();
        A.diagonal().array() += z;
        Vector e1 = Vector::Zero(n);
        e1(0) = 1;
        return A.partialPivLu().solve(e1)(0);
    }

    double radius() const override { return radius_; }

  private:
    Eigen::MatrixXd jacobi_;
    double radius_;
};

class DeltaHandle final : public TransformHandle {
  public:
    explicit DeltaHandle(double c) : c_(c) {}
    Cx G(Cx z) const override { return Cx(1.0) / (z - c_); }
    double radius() const override { return std::abs(c_); }

  private:
    double c_;
};

class BooleanHandle final : public TransformHandle {
  public:
    BooleanHandle(HandlePtr a, HandlePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    Cx G(Cx z) const override { return Cx(1.0) / (z - a_->K(z) - b_->K(z)); }
    double radius() const override { return a_->radius() + b_->radius(); }

  private:
    HandlePtr a_, b_;
};

class MonotoneHandle final : public TransformHandle {
  public:
    MonotoneHandle(HandlePtr a, HandlePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    Cx G(Cx z) const override { return a_->G(b_->F(z)); }
    double radius() const override { return a_->radius() + b_->radius(); }

  private:
    HandlePtr a_, b_;
};

class OrthogonalHandle final : public TransformHandle {
  public:
    OrthogonalHandle(HandlePtr a, HandlePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    Cx G(Cx z) const override { return Cx(1.0) / (z - a_->K(b_->F(z))); }
    double radius() const override { return a_->radius() + b_->radius(); }

  private:
    HandlePtr a_, b_;
};

class FiniteTreeHandle final : public TransformHandle {
  public:
    FiniteTreeHandle(FiniteTree tree, std::vector<HandlePtr> laws)
        : tree_(std::move(tree)), laws_(std::move(laws)) {
        radius_ = 0;
        for (auto& h : laws_) radius_ += h->radius();
    }

    Cx G(Cx z) const override { return Cx(1.0) / (z - finite_tree_K(tree_, laws_, z)); }
    double radius() const override { return radius_; }

  private:
    FiniteTree tree_;
    std::vector<HandlePtr> laws_;
    double radius_ = 0;
};

class DigraphHandle final : public TransformHandle {
  public:
    DigraphHandle(Digraph g, std::vector<HandlePtr> laws, double tol, int max_iter)
        : g_(std::move(g)), laws_(std::move(laws)), tol_(tol), max_iter_(max_iter) {
        radius_ = 0;
        for (auto& h : laws_) radius_ += h->radius();
    }

    Cx G(Cx z) const override {
        return Cx(1.0) / (z - digraph_fixed_point(g_, laws_, z, tol_, max_iter_).K_total);
    }
    double radius() const override { return radius_; }

  private:
    Digraph g_;
    std::vector<HandlePtr> laws_;
    double tol_;
    int max_iter_;
    double radius_ = 0;
};

} // namespace

HandlePtr cauchy_from_law(const ScalarLaw& mu, int degree) {
    // Reuse the GNS compression; its matrix is the Jacobi truncation.
    const PointedModel model = gns_realize(mu, degree);
    Eigen::MatrixXd J = model.op().real();
    const double rad = mu.radius() ? to_double(*mu.radius()) : matrix_norm(model.op());
    return std::make_shared<ResolventHandle>(std::move(J), rad);
}

HandlePtr cauchy_delta(double c) { return std::make_shared<DeltaHandle>(c); }

HandlePtr conv_boolean(HandlePtr a, HandlePtr b) {
    return std::make_shared<BooleanHandle>(std::move(a), std::move(b));
}

HandlePtr conv_monotone(HandlePtr a, HandlePtr b) {
    return std::make_shared<MonotoneHandle>(std::move(a), std::move(b));
}

HandlePtr conv_orthogonal(HandlePtr a, HandlePtr b) {
    return std::make_shared<OrthogonalHandle>(std::move(a), std::move(b));
}

namespace {

Cx finite_tree_K_rec(const FiniteTree& T, const std::vector<HandlePtr>& laws, Cx z,
                     std::map<std::string, Cx>& memo) {
    if (T.depth() == 0 || T.size() <= 1) return Cx(0);
    const auto key = T.key();
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Cx total(0);
    for (int j = 1; j <= T.alphabet(); ++j) {
        if (!T.contains(Str{j})) continue;
        const FiniteTree branch = T.branch(j);
        const Cx kb = finite_tree_K_rec(branch, laws, z, memo);
        total += laws[j - 1]->K(z - kb);
    }
    memo.emplace(key, total);
    return total;
}

} // namespace

Cx finite_tree_K(const FiniteTree& T, const std::vector<HandlePtr>& laws, Cx z) {
    if (static_cast<int>(laws.size()) != T.alphabet())
        throw validation_error("finite_tree_K: need one transform per letter");
    std::map<std::string, Cx> memo;
    return finite_tree_K_rec(T, laws, z, memo);
}

HandlePtr finite_tree_handle(const FiniteTree& T, std::vector<HandlePtr> laws) {
    if (static_cast<int>(laws.size()) != T.alphabet())
        throw validation_error("finite_tree_handle: need one transform per letter");
    return std::make_shared<FiniteTreeHandle>(T, std::move(laws));
}

FixedPointResult digraph_fixed_point(const Digraph& g, const std::vector<HandlePtr>& laws, Cx z,
                                     double tol, int max_iter) {
    const int N = g.vertex_count();
    if (static_cast<int>(laws.size()) != N)
        throw validation_error("digraph_fixed_point: need one transform per vertex");
    double rsum = 0;
    for (auto& h : laws) rsum += h->radius();
    const double zmin = 4 * rsum;
    if (std::abs(z) < zmin && z.imag() < zmin)
        throw validation_error("fixed-point evaluation outside the iteration domain");

    std::vector<std::vector<int>> nbrs(N);
    for (int j = 1; j <= N; ++j) nbrs[j - 1] = g.out_neighbors(j);

    FixedPointResult res;
    res.K_vertex.assign(N, Cx(0));
    std::vector<Cx> next(N);
    for (int it = 0; it < max_iter; ++it) {
        double delta = 0;
        for (int j = 0; j < N; ++j) {
            Cx shift(0);
            for (int i : nbrs[j]) shift += res.K_vertex[i - 1];
            next[j] = laws[j]->K(z - shift);
            delta = std::max(delta, std::abs(next[j] - res.K_vertex[j]));
        }
        res.K_vertex.swap(next);
        res.iterations = it + 1;
        if (delta < tol) {
            res.K_total = Cx(0);
            for (auto& k : res.K_vertex) res.K_total += k;
            return res;
        }
    }
    throw numeric_error("convergence error: digraph fixed point did not settle (residual above " +
                        std::to_string(tol) + ")");
}

HandlePtr digraph_handle(const Digraph& g, std::vector<HandlePtr> laws, double tol,
                         int max_iter) {
    if (static_cast<int>(laws.size()) != g.vertex_count())
        throw validation_error("digraph_handle: need one transform per vertex");
    return std::make_shared<DigraphHandle>(g, std::move(laws), tol, max_iter);
}

namespace {

std::vector<double> contour_pass(const TransformHandle& h, int order, double rho, int nodes) {
    // m_l = (1/2pi) \int z^{l+1} G(z) dtheta on |z| = rho; real symmetric
    // handles make the result real.
    std::vector<Cx> acc(order + 1, Cx(0));
    for (int k = 0; k < nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / nodes;
        const Cx z = rho * Cx(std::cos(theta), std::sin(theta));
        const Cx gz = h.G(z);
        Cx zp = z; // z^{l+1} built incrementally
        for (int l = 0; l <= order; ++l) {
            acc[l] += zp * gz;
            zp *= z;
        }
    }
    std::vector<double> out(order);
    for (int l = 1; l <= order; ++l) out[l - 1] = (acc[l] / static_cast<double>(nodes)).real();
    return out;
}

} // namespace

std::vector<double> moments_from_handle(const TransformHandle& h, int order, double rho,
                                        int nodes, double tol) {
    if (rho <= h.radius())
        throw validation_error("contour radius must exceed the handle's radius bound");
    const auto coarse = contour_pass(h, order, rho, nodes);
    const auto fine = contour_pass(h, order, rho, 2 * nodes);
    for (int l = 1; l <= order; ++l) {
        const double gap = std::abs(coarse[l - 1] - fine[l - 1]);
        if (gap > tol * std::max(1.0, std::abs(fine[l - 1])))
            throw numeric_error("precision error: contour refinement is inconsistent at order " +
                                std::to_string(l));
    }
    return fine;
}

double density_at(const TransformHandle& h, double x, double eps) {
    return -h.G(Cx(x, eps)).imag() / std::numbers::pi;
}

} // namespace treefree
