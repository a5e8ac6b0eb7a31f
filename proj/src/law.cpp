#include "treefree/law.hpp"

#include <algorithm>
#include <cmath>

namespace treefree {

ScalarLaw ScalarLaw::exact(std::vector<Rat> moments, std::optional<Rat> radius) {
    ScalarLaw out;
    out.m_ = std::move(moments);
    out.radius_ = std::move(radius);
    return out;
}

ScalarLaw ScalarLaw::approx(std::vector<double> moments, std::optional<double> radius) {
    ScalarLaw out;
    out.m_ = std::move(moments);
    if (radius) out.radius_ = Rat(*radius);
    return out;
}

ScalarLaw ScalarLaw::delta(const Rat& c, int order) {
    std::vector<Rat> m(order);
    Rat p(1);
    for (int l = 1; l <= order; ++l) {
        p *= c;
        m[l - 1] = p;
    }
    return exact(std::move(m), abs(c));
}

ScalarLaw ScalarLaw::bernoulli(int order) {
    std::vector<Rat> m(order);
    for (int l = 2; l <= order; l += 2) m[l - 1] = 1;
    return exact(std::move(m), Rat(1));
}

ScalarLaw ScalarLaw::atomic(const std::vector<std::pair<Rat, Rat>>& atom_weight_pairs, int order) {
    Rat total(0), rad(0);
    for (auto& [x, w] : atom_weight_pairs) {
        if (w <= 0) throw validation_error("atomic law weights must be positive");
        total += w;
        rad = std::max(rad, Rat(abs(x)));
    }
    if (total != 1) throw validation_error("atomic law weights must sum to one");
    std::vector<Rat> m(order, Rat(0));
    for (auto& [x, w] : atom_weight_pairs) {
        Rat p(1);
        for (int l = 1; l <= order; ++l) {
            p *= x;
            m[l - 1] += w * p;
        }
    }
    return exact(std::move(m), rad);
}

int ScalarLaw::order() const {
    if (is_exact()) return static_cast<int>(std::get<std::vector<Rat>>(m_).size());
    return static_cast<int>(std::get<std::vector<double>>(m_).size());
}

const std::vector<Rat>& ScalarLaw::rat_moments() const {
    if (!is_exact()) throw validation_error("law does not carry exact moments");
    return std::get<std::vector<Rat>>(m_);
}

std::vector<double> ScalarLaw::float_moments() const {
    if (!is_exact()) return std::get<std::vector<double>>(m_);
    const auto& rm = std::get<std::vector<Rat>>(m_);
    std::vector<double> out(rm.size());
    for (size_t i = 0; i < rm.size(); ++i) out[i] = to_double(rm[i]);
    return out;
}

double ScalarLaw::float_moment(int l) const {
    if (l == 0) return 1.0;
    if (l < 0 || l > order()) throw validation_error("moment order out of range");
    if (is_exact()) return to_double(std::get<std::vector<Rat>>(m_)[l - 1]);
    return std::get<std::vector<double>>(m_)[l - 1];
}

double ScalarLaw::float_radius_or(double fallback) const {
    return radius_ ? to_double(*radius_) : fallback;
}

ScalarLaw ScalarLaw::truncated(int L) const {
    if (L > order()) throw validation_error("order error: law has too few moments");
    ScalarLaw out(*this);
    if (is_exact()) {
        auto m = std::get<std::vector<Rat>>(m_);
        m.resize(L);
        out.m_ = std::move(m);
    } else {
        auto m = std::get<std::vector<double>>(m_);
        m.resize(L);
        out.m_ = std::move(m);
    }
    return out;
}

ScalarLaw ScalarLaw::to_float() const {
    ScalarLaw out;
    out.m_ = float_moments();
    out.radius_ = radius_;
    return out;
}

namespace {

// Exact PSD test by symmetric elimination: a negative pivot or a zero pivot
// with a nonzero residual row witnesses indefiniteness.
bool psd_exact(std::vector<std::vector<Rat>> H) {
    const size_t n = H.size();
    for (size_t k = 0; k < n; ++k) {
        if (H[k][k] < 0) return false;
        if (H[k][k] == 0) {
            for (size_t j = k; j < n; ++j)
                if (H[k][j] != 0) return false;
            continue;
        }
        for (size_t i = k + 1; i < n; ++i) {
            const Rat f = H[i][k] / H[k][k];
            for (size_t j = k; j < n; ++j) H[i][j] -= f * H[k][j];
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k; j < n; ++j) H[j][i] = H[i][j];
    }
    return true;
}

bool psd_float(std::vector<std::vector<double>> H, double tol) {
    const size_t n = H.size();
    double scale = 1.0;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(H[i][i]));
    for (size_t k = 0; k < n; ++k) {
        // Diagonal pivoting: bring the largest remaining diagonal entry up.
        size_t p = k;
        for (size_t i = k + 1; i < n; ++i)
            if (H[i][i] > H[p][p]) p = i;
        if (p != k) {
            std::swap(H[p], H[k]);
            for (size_t i = 0; i < n; ++i) std::swap(H[i][p], H[i][k]);
        }
        if (H[k][k] < -tol * scale) return false;
        if (H[k][k] <= tol * scale) {
            for (size_t j = k; j < n; ++j)
                if (std::abs(H[k][j]) > tol * scale) return false;
            continue;
        }
        for (size_t i = k + 1; i < n; ++i) {
            const double f = H[i][k] / H[k][k];
            for (size_t j = k; j < n; ++j) H[i][j] -= f * H[k][j];
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k; j < n; ++j) H[j][i] = H[i][j];
    }
    return true;
}

} // namespace

bool ScalarLaw::hankel_psd(double tol) const {
    const int p = order() / 2;
    if (is_exact()) {
        const auto& m = rat_moments();
        std::vector<std::vector<Rat>> H(p + 1, std::vector<Rat>(p + 1));
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j) H[i][j] = (i + j == 0) ? Rat(1) : m[i + j - 1];
        return psd_exact(std::move(H));
    }
    const auto m = float_moments();
    std::vector<std::vector<double>> H(p + 1, std::vector<double>(p + 1));
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) H[i][j] = (i + j == 0) ? 1.0 : m[i + j - 1];
    return psd_float(std::move(H), tol);
}

// ---------------------------------------------------------------------------
// Convolution

namespace {

// Recursive walk over one nesting-tree branch: block `b` of `pi` sits above
// the ball vertex `vid`; sum over the admissible letters j (children of the
// vertex) of the block's Boolean cumulant weight times the child products.
template <class S>
S branch_value(const FiniteTree& ball, const NCPartition& pi,
               const std::vector<std::vector<S>>& bool_cums, int b, int vid) {
    const Str& s = ball.vertices()[vid];
    S sum = S(0);
    for (int j : ball.child_letters(vid)) {
        Str js;
        js.reserve(s.size() + 1);
        js.push_back(j);
        js.insert(js.end(), s.begin(), s.end());
        const int cid = ball.vertex_id(js);
        S term = bool_cums[j - 1][pi.blocks()[b].size() - 1];
        if (term == S(0)) continue;
        for (int w : pi.children(b)) {
            term *= branch_value(ball, pi, bool_cums, w, cid);
            if (term == S(0)) break;
        }
        sum += term;
    }
    return sum;
}

template <class S>
std::vector<S> convolve_impl(const FiniteTree& ball, const std::vector<std::vector<S>>& bool_cums,
                             int order) {
    std::vector<S> m(order);
    const int root = ball.vertex_id(Str{});
    for (int l = 1; l <= order; ++l) {
        S acc = S(0);
        for (const auto& pi : enumerate_nc(l)) {
            S prod = S(1);
            for (int b : pi.outer_blocks()) {
                prod *= branch_value(ball, pi, bool_cums, b, root);
                if (prod == S(0)) break;
            }
            acc += prod;
        }
        m[l - 1] = acc;
    }
    return m;
}

} // namespace

ScalarLaw convolve(const TreeSpec& tree, const std::vector<ScalarLaw>& laws, int order) {
    const int N = tree.alphabet();
    if (static_cast<int>(laws.size()) != N)
        throw validation_error("convolve: need one law per tree letter");
    for (auto& mu : laws)
        if (mu.order() < order)
            throw validation_error("order error: law has fewer moments than requested");
    const FiniteTree ball = truncate(tree, order);

    std::optional<Rat> radius;
    bool have_radius = true;
    Rat rsum(0);
    for (auto& mu : laws) {
        if (!mu.radius()) {
            have_radius = false;
            break;
        }
        rsum += *mu.radius();
    }
    if (have_radius) radius = rsum;

    const bool exact = std::all_of(laws.begin(), laws.end(),
                                   [](const ScalarLaw& m) { return m.is_exact(); });
    if (exact) {
        std::vector<std::vector<Rat>> bc;
        bc.reserve(laws.size());
        for (auto& mu : laws)
            bc.push_back(boolean_cumulants_from_moments(
                std::vector<Rat>(mu.rat_moments().begin(), mu.rat_moments().begin() + order)));
        auto m = convolve_impl<Rat>(ball, bc, order);
        return ScalarLaw::exact(std::move(m), radius);
    }
    std::vector<std::vector<double>> bc;
    bc.reserve(laws.size());
    for (auto& mu : laws) {
        auto fm = mu.float_moments();
        fm.resize(order);
        bc.push_back(boolean_cumulants_from_moments(fm));
    }
    auto m = convolve_impl<double>(ball, bc, order);
    ScalarLaw out;
    out = ScalarLaw::approx(std::move(m));
    out.set_radius(radius);
    return out;
}

namespace {

template <class S>
S word_moment_impl(const TreeSpec& tree, const std::vector<ScalarLaw>& laws,
                   const std::vector<int>& chi) {
    const int l = static_cast<int>(chi.size());
    const int N = tree.alphabet();
    for (int c : chi)
        if (c < 1 || c > N) throw validation_error("coloring letter out of range");
    const FiniteTree ball = truncate(tree, l);
    std::vector<std::vector<S>> bc(laws.size());
    for (size_t i = 0; i < laws.size(); ++i) {
        if (laws[i].order() < l)
            throw validation_error("order error: law has fewer moments than the word length");
        if constexpr (std::is_same_v<S, Rat>)
            bc[i] = boolean_cumulants_from_moments(
                std::vector<Rat>(laws[i].rat_moments().begin(), laws[i].rat_moments().begin() + l));
        else {
            auto fm = laws[i].float_moments();
            fm.resize(l);
            bc[i] = boolean_cumulants_from_moments(fm);
        }
    }
    S acc = S(0);
    for (const auto& pi : enumerate_nc(l)) {
        // The position coloring must be constant on blocks.
        BlockColoring bchi(pi.block_count());
        bool constant = true;
        for (int b = 0; b < pi.block_count() && constant; ++b) {
            bchi[b] = chi[pi.blocks()[b][0] - 1];
            for (int e : pi.blocks()[b])
                if (chi[e - 1] != bchi[b]) {
                    constant = false;
                    break;
                }
        }
        if (!constant || !compatible(pi, bchi, ball)) continue;
        S prod = S(1);
        for (int b = 0; b < pi.block_count(); ++b)
            prod *= bc[bchi[b] - 1][pi.blocks()[b].size() - 1];
        acc += prod;
    }
    return acc;
}

} // namespace

Rat word_moment_exact(const TreeSpec& tree, const std::vector<ScalarLaw>& laws,
                      const std::vector<int>& chi) {
    return word_moment_impl<Rat>(tree, laws, chi);
}

double word_moment(const TreeSpec& tree, const std::vector<ScalarLaw>& laws,
                   const std::vector<int>& chi) {
    return word_moment_impl<double>(tree, laws, chi);
}

ScalarLaw convolution_power(const ScalarLaw& mu, const TreeSpec& tree, const Rat& t, int order) {
    if (t < 0) throw validation_error("convolution power needs t >= 0");
    if (mu.order() < order) throw validation_error("order error: law has too few moments");
    const FiniteTree ball = truncate(tree, order);
    if (mu.is_exact()) {
        auto kappa = tfree_cumulants_from_moments(
            std::vector<Rat>(mu.rat_moments().begin(), mu.rat_moments().begin() + order), ball);
        for (auto& k : kappa) k *= t;
        auto m = moments_from_tfree_cumulants(kappa, ball);
        return ScalarLaw::exact(std::move(m));
    }
    auto fm = mu.float_moments();
    fm.resize(order);
    auto kappa = tfree_cumulants_from_moments(fm, ball);
    const double td = to_double(t);
    for (auto& k : kappa) k *= td;
    return ScalarLaw::approx(moments_from_tfree_cumulants(kappa, ball));
}

ScalarLaw dilate(const Rat& c, const ScalarLaw& mu) {
    if (mu.is_exact()) {
        auto m = mu.rat_moments();
        Rat p(1);
        for (auto& x : m) {
            p *= c;
            x *= p;
        }
        std::optional<Rat> radius;
        if (mu.radius()) radius = *mu.radius() * abs(c);
        return ScalarLaw::exact(std::move(m), radius);
    }
    return dilate(to_double(c), mu);
}

ScalarLaw dilate(double c, const ScalarLaw& mu) {
    auto m = mu.float_moments();
    double p = 1;
    for (auto& x : m) {
        p *= c;
        x *= p;
    }
    ScalarLaw out = ScalarLaw::approx(std::move(m));
    if (mu.radius()) out.set_radius(Rat(to_double(*mu.radius()) * std::abs(c)));
    return out;
}

ScalarLaw clt_law(const TreeSpec& tree, const Rat& variance, int order) {
    const FiniteTree ball = truncate(tree, order);
    std::vector<Rat> kappa(order, Rat(0));
    if (order >= 2) kappa[1] = variance;
    auto m = moments_from_tfree_cumulants(kappa, ball);
    // Support bound 2 sqrt((N-1)/(n-1) * variance), rounded up a hair to
    // stay an upper bound after the irrational square root.
    const int N = ball.alphabet();
    const int n = ball.root_degree();
    const double bound =
        2 * std::sqrt(static_cast<double>(N - 1) / (n - 1) * to_double(variance));
    return ScalarLaw::exact(std::move(m), Rat(bound * (1 + 1e-12)));
}

std::vector<CltRow> clt_convergence(const ScalarLaw& mu, const TreeSpec& tree, int k_max,
                                    int order) {
    if (mu.order() < order) throw validation_error("order error: law has too few moments");
    if (mu.float_moment(1) != 0.0)
        throw validation_error("clt_convergence needs a centered law");
    const FiniteTree ball = truncate(tree, order);
    require_root_degree(ball);
    const int n = ball.root_degree();

    std::vector<double> kappa;
    std::vector<Rat> kappa_exact;
    if (mu.is_exact()) {
        kappa_exact = tfree_cumulants_from_moments(
            std::vector<Rat>(mu.rat_moments().begin(), mu.rat_moments().begin() + order), ball);
    } else {
        auto fm = mu.float_moments();
        fm.resize(order);
        kappa = tfree_cumulants_from_moments(fm, ball);
    }
    const Rat variance = mu.is_exact() ? kappa_exact[1] : Rat(kappa[1]);
    const auto limit = clt_law(tree, variance, order).float_moments();

    std::vector<CltRow> rows;
    for (int k = 0; k <= k_max; ++k) {
        // Cumulant scaling by n^k, then dilation by n^{-k/2}:
        // kappa_l -> n^{k(1 - l/2)} kappa_l.
        std::vector<double> scaled(order);
        for (int l = 1; l <= order; ++l) {
            const double factor = std::pow(static_cast<double>(n), k * (1.0 - l / 2.0));
            const double base =
                mu.is_exact() ? to_double(kappa_exact[l - 1]) : kappa[l - 1];
            scaled[l - 1] = factor * base;
        }
        const auto mk = moments_from_tfree_cumulants(scaled, ball);
        for (int l = 1; l <= order; ++l)
            rows.push_back({k, l, std::abs(mk[l - 1] - limit[l - 1])});
    }
    return rows;
}

ScalarLaw id_law(const TreeSpec& tree, const Rat& c, const Rat& sigma_mass,
                 const ScalarLaw& sigma, int order) {
    if (order >= 3 && sigma.order() < order - 2)
        throw validation_error("order error: sigma needs at least order-2 moments");
    const FiniteTree ball = truncate(tree, order);
    if (sigma.is_exact()) {
        std::vector<Rat> kappa(order, Rat(0));
        if (order >= 1) kappa[0] = c;
        if (order >= 2) kappa[1] = sigma_mass;
        for (int l = 3; l <= order; ++l) kappa[l - 1] = sigma_mass * sigma.rat_moments()[l - 3];
        return ScalarLaw::exact(moments_from_tfree_cumulants(kappa, ball));
    }
    std::vector<double> kappa(order, 0.0);
    if (order >= 1) kappa[0] = to_double(c);
    if (order >= 2) kappa[1] = to_double(sigma_mass);
    for (int l = 3; l <= order; ++l)
        kappa[l - 1] = to_double(sigma_mass) * sigma.float_moment(l - 2);
    return ScalarLaw::approx(moments_from_tfree_cumulants(kappa, ball));
}

ScalarLaw bp_bijection(const ScalarLaw& mu, const TreeSpec& from_tree, const TreeSpec& to_tree,
                       int order) {
    if (mu.order() < order) throw validation_error("order error: law has too few moments");
    const FiniteTree from_ball = truncate(from_tree, order);
    const FiniteTree to_ball = truncate(to_tree, order);
    if (mu.is_exact()) {
        auto kappa = tfree_cumulants_from_moments(
            std::vector<Rat>(mu.rat_moments().begin(), mu.rat_moments().begin() + order),
            from_ball);
        return ScalarLaw::exact(moments_from_tfree_cumulants(kappa, to_ball));
    }
    auto fm = mu.float_moments();
    fm.resize(order);
    auto kappa = tfree_cumulants_from_moments(fm, from_ball);
    return ScalarLaw::approx(moments_from_tfree_cumulants(kappa, to_ball));
}

ScalarLaw bn_semigroup(const ScalarLaw& mu, const Rat& t, int order) {
    if (t < 0) throw validation_error("bn_semigroup needs t >= 0");
    const auto free2 = TreeSpec::free_tree(2);
    const auto bool2 = TreeSpec::bool_tree(2);
    const ScalarLaw stretched = convolution_power(mu, free2, Rat(1) + t, order);
    return convolution_power(stretched, bool2, Rat(1) / (Rat(1) + t), order);
}

double moment_metric(const ScalarLaw& a, const ScalarLaw& b, double R) {
    const int L = std::min(a.order(), b.order());
    double out = 0;
    double denom = 1;
    for (int l = 1; l <= L; ++l) {
        denom *= 2 * R;
        out = std::max(out, std::abs(a.float_moment(l) - b.float_moment(l)) / denom);
    }
    return out;
}

} // namespace treefree
