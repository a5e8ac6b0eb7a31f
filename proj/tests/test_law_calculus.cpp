#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "treefree/expr.hpp"
#include "treefree/law.hpp"

using namespace treefree;

namespace {

bool same_moments(const ScalarLaw& a, const ScalarLaw& b) {
    if (a.order() != b.order()) return false;
    if (a.is_exact() && b.is_exact()) return a.rat_moments() == b.rat_moments();
    for (int l = 1; l <= a.order(); ++l)
        if (std::abs(a.float_moment(l) - b.float_moment(l)) > 1e-10) return false;
    return true;
}

Bindings bind_two(std::mt19937& rng, int order) {
    return Bindings{{"m", oracle::random_atomic_law(rng, order)},
                    {"n", oracle::random_atomic_law(rng, order)}};
}

} // namespace

TEST_CASE("law construction and validation") {
    const ScalarLaw b = ScalarLaw::bernoulli(6);
    CHECK(b.rat_moments() == std::vector<Rat>{0, 1, 0, 1, 0, 1});
    CHECK(b.hankel_psd());
    CHECK(ScalarLaw::delta(Rat(2), 4).rat_moments() == std::vector<Rat>{2, 4, 8, 16});
    // A sequence violating positivity: m2 < m1^2.
    const ScalarLaw bad = ScalarLaw::exact({Rat(1), Rat(0)});
    CHECK_FALSE(bad.hankel_psd());
    CHECK_FALSE(ScalarLaw::approx({1.0, 0.0}).hankel_psd());
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial)
        CHECK(oracle::random_atomic_law(rng, 8).hankel_psd());
}

TEST_CASE("boolean convolution of coin flips") {
    const ScalarLaw b = ScalarLaw::bernoulli(8);
    const ScalarLaw sum = convolve(TreeSpec::bool_tree(2), {b, b}, 8);
    // The sum is a +-sqrt(2) coin flip: even moments 2^{l/2}.
    CHECK(sum.rat_moments() == std::vector<Rat>{0, 2, 0, 4, 0, 8, 0, 16});
    REQUIRE(sum.radius().has_value());
    CHECK(*sum.radius() == 2);
}

TEST_CASE("convolving with a point mass at zero") {
    std::mt19937 rng(5);
    for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::mono_tree(2),
                              TreeSpec::regular_tree(2, 2), TreeSpec::bool_tree(2)}) {
        const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
        std::vector<ScalarLaw> laws(t.alphabet(), ScalarLaw::delta(Rat(0), 8));
        laws[0] = mu;
        const ScalarLaw out = convolve(t, laws, 8);
        CHECK(out.rat_moments() == mu.rat_moments());
    }
}

TEST_CASE("letter subsets behave like padding with point masses") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        const TreeSpec big = oracle::random_explicit_tree(rng, 3, 4);
        // Restriction to letters {1, 2}: vertices using only those letters.
        std::vector<Str> small_verts;
        const FiniteTree big_ball = truncate(big, 8);
        for (auto& s : big_ball.vertices())
            if (std::all_of(s.begin(), s.end(), [](int x) { return x <= 2; }))
                small_verts.push_back(s);
        const TreeSpec small = TreeSpec::explicit_tree(2, small_verts);
        const ScalarLaw m1 = oracle::random_atomic_law(rng, 8);
        const ScalarLaw m2 = oracle::random_atomic_law(rng, 8);
        const ScalarLaw lhs = convolve(small, {m1, m2}, 8);
        const ScalarLaw rhs = convolve(big, {m1, m2, ScalarLaw::delta(Rat(0), 8)}, 8);
        CHECK(lhs.rat_moments() == rhs.rat_moments());
    }
}

TEST_CASE("second moments add for centered laws") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const ScalarLaw a = oracle::random_centered_law(rng, 2);
        const ScalarLaw b = oracle::random_centered_law(rng, 2);
        const TreeSpec t = oracle::random_explicit_tree(rng, 2, 2); // keeps both letters
        const ScalarLaw s = convolve(t, {a, b}, 2);
        CHECK(s.rat_moments()[1] == a.rat_moments()[1] + b.rat_moments()[1]);
        CHECK(s.rat_moments()[0] == 0);
    }
}

TEST_CASE("radius bound on computed moments") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const ScalarLaw a = oracle::random_atomic_law(rng, 8);
        const ScalarLaw b = oracle::random_atomic_law(rng, 8);
        const ScalarLaw s = convolve(TreeSpec::free_tree(2), {a, b}, 8);
        REQUIRE(s.radius().has_value());
        Rat p(1);
        for (int l = 1; l <= 8; ++l) {
            p *= *s.radius();
            CHECK(abs(s.rat_moments()[l - 1]) <= p);
        }
    }
}

TEST_CASE("dilation homogeneity") {
    std::mt19937 rng(17);
    const Rat c(-3, 2);
    for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::mono_tree(2)}) {
        const ScalarLaw a = oracle::random_atomic_law(rng, 6);
        const ScalarLaw b = oracle::random_atomic_law(rng, 6);
        const ScalarLaw lhs = convolve(t, {dilate(c, a), dilate(c, b)}, 6);
        const ScalarLaw rhs = dilate(c, convolve(t, {a, b}, 6));
        CHECK(lhs.rat_moments() == rhs.rat_moments());
    }
}

TEST_CASE("permutation equivariance of the joint law") {
    std::mt19937 rng(19);
    const std::vector<std::vector<int>> perms{{2, 1, 3}, {3, 1, 2}, {2, 3, 1}, {1, 3, 2}};
    for (int trial = 0; trial < 4; ++trial) {
        const TreeSpec t = oracle::random_explicit_tree(rng, 3, 3);
        std::vector<ScalarLaw> laws;
        for (int i = 0; i < 3; ++i) laws.push_back(oracle::random_atomic_law(rng, 6));
        const auto base = convolve(t, laws, 6);
        for (auto& sigma : perms) {
            std::vector<ScalarLaw> permuted(3);
            for (int j = 1; j <= 3; ++j) permuted[j - 1] = laws[sigma[j - 1] - 1];
            const auto lhs = convolve(permute(t, sigma), permuted, 6);
            CHECK(lhs.rat_moments() == base.rat_moments());
        }
    }
}

TEST_CASE("moment metric continuity in the tree") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const TreeSpec a = oracle::random_explicit_tree(rng, 2, 4);
        const TreeSpec b = oracle::random_explicit_tree(rng, 2, 4);
        const int agree = ball_agreement_depth(a, b, 6);
        if (agree == 0) continue;
        const ScalarLaw m1 = oracle::random_atomic_law(rng, 6);
        const ScalarLaw m2 = oracle::random_atomic_law(rng, 6);
        const auto la = convolve(a, {m1, m2}, 6);
        const auto lb = convolve(b, {m1, m2}, 6);
        for (int l = 1; l <= std::min(agree, 6); ++l)
            CHECK(la.rat_moments()[l - 1] == lb.rat_moments()[l - 1]);
    }
}

TEST_CASE("binary associativity and commutativity at the moment level") {
    std::mt19937 rng(29);
    const ScalarLaw a = oracle::random_atomic_law(rng, 6);
    const ScalarLaw b = oracle::random_atomic_law(rng, 6);
    const ScalarLaw c = oracle::random_atomic_law(rng, 6);
    for (const TreeSpec& t :
         {TreeSpec::free_tree(2), TreeSpec::bool_tree(2), TreeSpec::mono_tree(2)}) {
        const auto ab_c = convolve(t, {convolve(t, {a, b}, 6), c}, 6);
        const auto a_bc = convolve(t, {a, convolve(t, {b, c}, 6)}, 6);
        CHECK(ab_c.rat_moments() == a_bc.rat_moments());
    }
    for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::bool_tree(2)}) {
        CHECK(convolve(t, {a, b}, 6).rat_moments() == convolve(t, {b, a}, 6).rat_moments());
    }
}

TEST_CASE("convolution powers") {
    std::mt19937 rng(31);
    SUBCASE("power one is the identity") {
        const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
        const auto out = convolution_power(mu, TreeSpec::mono_tree(2), Rat(1), 8);
        CHECK(out.rat_moments() == mu.rat_moments());
    }
    SUBCASE("power n equals the n-fold self-join") {
        for (const TreeSpec& t :
             {TreeSpec::free_tree(2), TreeSpec::mono_tree(3), TreeSpec::regular_tree(2, 2)}) {
            const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
            const int n = truncate(t, 1).root_degree();
            const std::vector<ScalarLaw> copies(t.alphabet(), mu);
            const auto direct = convolve(t, copies, 8);
            const auto scaled = convolution_power(mu, t, Rat(n), 8);
            CHECK(direct.rat_moments() == scaled.rat_moments());
        }
    }
    SUBCASE("free and boolean powers interchange") {
        // pq = p'q' and p - 1 = (p' - 1) q' with p = 3, q = 2, p' = 3/2, q' = 4.
        const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
        const auto free2 = TreeSpec::free_tree(2);
        const auto bool2 = TreeSpec::bool_tree(2);
        const auto lhs =
            convolution_power(convolution_power(mu, free2, Rat(3), 8), bool2, Rat(2), 8);
        const auto rhs =
            convolution_power(convolution_power(mu, bool2, Rat(4), 8), free2, Rat(3, 2), 8);
        CHECK(lhs.rat_moments() == rhs.rat_moments());
    }
}

TEST_CASE("central limit laws") {
    SUBCASE("free: fourth moment 2") {
        const auto law = clt_law(TreeSpec::free_tree(2), Rat(1), 4);
        CHECK(law.rat_moments() == std::vector<Rat>{0, 1, 0, 2});
    }
    SUBCASE("boolean: fourth moment 1") {
        const auto law = clt_law(TreeSpec::bool_tree(2), Rat(1), 4);
        CHECK(law.rat_moments() == std::vector<Rat>{0, 1, 0, 1});
    }
    SUBCASE("regular trees interpolate") {
        for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}}) {
            const auto law = clt_law(TreeSpec::regular_tree(n, d), Rat(1), 4);
            CHECK(law.rat_moments()[3] == Rat(1) + Rat(d, n - 1));
        }
    }
    SUBCASE("odd moments vanish") {
        const auto law = clt_law(TreeSpec::mono_tree(2), Rat(2), 7);
        for (int l = 1; l <= 7; l += 2) CHECK(law.rat_moments()[l - 1] == 0);
    }
}

TEST_CASE("clt convergence table") {
    SUBCASE("rejects non-centered input") {
        CHECK_THROWS_AS(clt_convergence(ScalarLaw::delta(Rat(1), 6), TreeSpec::free_tree(2), 2, 6),
                        validation_error);
    }
    SUBCASE("scaling route matches the iterated convolution route") {
        std::mt19937 rng(37);
        for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::mono_tree(2)}) {
            const ScalarLaw mu = oracle::random_centered_law(rng, 6);
            const int n = truncate(t, 1).root_degree();
            ScalarLaw iterated = mu;
            for (int k = 1; k <= 2; ++k) {
                iterated = convolve(t, std::vector<ScalarLaw>(t.alphabet(), iterated), 6);
                const auto powered = convolution_power(mu, t, rat_pow(Rat(n), k), 6);
                CHECK(iterated.rat_moments() == powered.rat_moments());
            }
        }
    }
    SUBCASE("k = 0 row reports the raw gap and the order-6 gap shrinks") {
        const ScalarLaw mu = ScalarLaw::bernoulli(6);
        const auto rows = clt_convergence(mu, TreeSpec::free_tree(2), 4, 6);
        const auto limit = clt_law(TreeSpec::free_tree(2), Rat(1), 6);
        double gap6_prev = -1;
        for (const auto& row : rows) {
            if (row.k == 0)
                CHECK(row.gap == doctest::Approx(std::abs(mu.float_moment(row.order) -
                                                          limit.float_moment(row.order)))
                                     .epsilon(1e-12));
            if (row.order == 6) {
                if (gap6_prev > 0) CHECK(row.gap < gap6_prev);
                gap6_prev = row.gap;
            }
        }
    }
}

TEST_CASE("infinitely divisible laws") {
    std::mt19937 rng(41);
    SUBCASE("pure variance data reproduces the central limit law") {
        for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::regular_tree(2, 2)}) {
            const auto lhs = id_law(t, Rat(0), Rat(3, 2), ScalarLaw::delta(Rat(0), 6), 8);
            const auto rhs = clt_law(t, Rat(3, 2), 8);
            CHECK(lhs.rat_moments() == rhs.rat_moments());
        }
    }
    SUBCASE("boolean tree gives boolean cumulant data directly") {
        const ScalarLaw sigma = oracle::random_atomic_law(rng, 6);
        const Rat c(1, 3), mass(2, 5);
        const auto mu = id_law(TreeSpec::bool_tree(2), c, mass, sigma, 8);
        const auto b = boolean_cumulants_from_moments(mu.rat_moments());
        CHECK(b[0] == c);
        CHECK(b[1] == mass);
        for (int l = 3; l <= 8; ++l) CHECK(b[l - 1] == mass * sigma.rat_moments()[l - 3]);
    }
    SUBCASE("divisor round trip is exact") {
        for (const TreeSpec& t : {TreeSpec::mono_tree(2), TreeSpec::regular_tree(2, 2)}) {
            const int n = truncate(t, 1).root_degree();
            const ScalarLaw sigma = oracle::random_atomic_law(rng, 6);
            const Rat c(-2, 3), mass(1, 2);
            const auto mu = id_law(t, c, mass, sigma, 8);
            for (int k = 1; k <= 3; ++k) {
                const Rat scale = rat_pow(Rat(n), -k);
                const auto divisor = id_law(t, c * scale, mass * scale, sigma, 8);
                const auto recomposed = convolution_power(divisor, t, rat_pow(Rat(n), k), 8);
                CHECK(recomposed.rat_moments() == mu.rat_moments());
            }
        }
    }
}

TEST_CASE("cumulant transplantation and the two-parameter semigroup") {
    std::mt19937 rng(43);
    SUBCASE("transplanting onto the same tree is the identity") {
        const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
        const auto out = bp_bijection(mu, TreeSpec::mono_tree(2), TreeSpec::mono_tree(2), 8);
        CHECK(out.rat_moments() == mu.rat_moments());
    }
    SUBCASE("boolean-to-regular transplantation is the semigroup map") {
        for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {2, 2}}) {
            const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
            const auto lhs =
                bp_bijection(mu, TreeSpec::bool_tree(2), TreeSpec::regular_tree(n, d), 8);
            const auto rhs = bn_semigroup(mu, Rat(d, n - 1), 8);
            CHECK(lhs.rat_moments() == rhs.rat_moments());
        }
    }
    SUBCASE("explicit join expression for the boolean transplantation") {
        for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {2, 2}}) {
            const TreeSpec t = TreeSpec::regular_tree(n, d);
            const ScalarLaw mu = oracle::random_atomic_law(rng, 8);
            const auto lhs = bp_bijection(mu, TreeSpec::bool_tree(2), t, 8);
            const auto inner = convolution_power(mu, TreeSpec::bool_tree(2), Rat(1, n - 1), 8);
            const auto joined = convolve(t, std::vector<ScalarLaw>(t.alphabet(), inner), 8);
            const auto rhs = convolution_power(joined, TreeSpec::bool_tree(2), Rat(n - 1, n), 8);
            CHECK(lhs.rat_moments() == rhs.rat_moments());
        }
    }
}

TEST_CASE("expression evaluation and identity checking") {
    std::mt19937 rng(47);
    SUBCASE("named convolution identities hold exactly at order eight") {
        const std::vector<std::string> identities{
            "(mono m n) == (bool (orth m n) n)",
            "(free m n) == (antimono (sub m n) n)",
            "(free m n) == (bool (sub m n) (sub n m))",
            "(sub m n) == (orth m (sub n m))",
            "(sub (free m n) p) == (free (sub m p) (sub n p))",
        };
        for (int trial = 0; trial < 3; ++trial) {
            Bindings env = bind_two(rng, 8);
            env.emplace("p", oracle::random_atomic_law(rng, 8));
            for (const auto& text : identities) {
                const auto [lhs, rhs] = parse_identity(text);
                const auto verdict = check_identity(*lhs, *rhs, env, 8);
                INFO("identity: " << text);
                CHECK(verdict.equal);
                CHECK(verdict.exact);
            }
        }
    }
    SUBCASE("a false identity reports the first differing order") {
        Bindings env = bind_two(rng, 8);
        const auto [lhs, rhs] = parse_identity("(free m n) == (bool m n)");
        const auto verdict = check_identity(*lhs, *rhs, env, 8);
        CHECK_FALSE(verdict.equal);
        CHECK(verdict.first_differing_order >= 3);
    }
    SUBCASE("unbound symbols are rejected") {
        const auto [lhs, rhs] = parse_identity("m == n");
        CHECK_THROWS_AS(check_identity(*lhs, *rhs, Bindings{}, 4), validation_error);
    }
    SUBCASE("power and semigroup operators parse") {
        Bindings env = bind_two(rng, 8);
        const auto [lhs, rhs] = parse_identity(
            "(pow bool:2 2 (pow free:2 3 m)) == (pow free:2 3/2 (pow bool:2 4 m))");
        const auto verdict = check_identity(*lhs, *rhs, env, 8);
        CHECK(verdict.equal);
        CHECK(verdict.exact);
    }
}

TEST_CASE("tree composition matches nested joins at the moment level") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 6; ++trial) {
        const TreeSpec outer = oracle::random_explicit_tree(rng, 2, 3);
        const TreeSpec t1 = oracle::random_explicit_tree(rng, 2, 3);
        const TreeSpec t2 = oracle::random_explicit_tree(rng, 2, 3);
        std::vector<ScalarLaw> laws;
        for (int i = 0; i < 4; ++i) laws.push_back(oracle::random_atomic_law(rng, 8));
        const auto composite = convolve(compose(outer, {t1, t2}), laws, 8);
        const auto nested = convolve(
            outer, {convolve(t1, {laws[0], laws[1]}, 8), convolve(t2, {laws[2], laws[3]}, 8)}, 8);
        CHECK(same_moments(composite, nested));
    }
}

TEST_CASE("mixed exactness promotes to floating point") {
    const ScalarLaw e = ScalarLaw::bernoulli(4);
    const ScalarLaw f = ScalarLaw::approx({0.0, 1.0, 0.0, 1.0});
    const auto out = convolve(TreeSpec::bool_tree(2), {e, f}, 4);
    CHECK_FALSE(out.is_exact());
    CHECK(out.float_moment(2) == doctest::Approx(2.0));
}

namespace {

// Naive oracle for the joint-law moments: a double sum over position
// colorings and compatible partitions, with no coloring folding.
Rat convolve_moment_brute(const TreeSpec& tree, const std::vector<ScalarLaw>& laws, int l) {
    const int N = tree.alphabet();
    const FiniteTree ball = truncate(tree, l);
    std::vector<std::vector<Rat>> bc;
    for (auto& mu : laws)
        bc.push_back(boolean_cumulants_from_moments(
            std::vector<Rat>(mu.rat_moments().begin(), mu.rat_moments().begin() + l)));
    Rat acc(0);
    std::vector<int> chi(l, 1);
    while (true) {
        for (const auto& pi : enumerate_nc(l)) {
            BlockColoring bchi(pi.block_count());
            bool constant = true;
            for (int b = 0; b < pi.block_count() && constant; ++b) {
                bchi[b] = chi[pi.blocks()[b][0] - 1];
                for (int e : pi.blocks()[b])
                    if (chi[e - 1] != bchi[b]) constant = false;
            }
            if (!constant || !compatible(pi, bchi, ball)) continue;
            Rat prod(1);
            for (int b = 0; b < pi.block_count(); ++b)
                prod *= bc[bchi[b] - 1][pi.blocks()[b].size() - 1];
            acc += prod;
        }
        int i = 0;
        while (i < l && chi[i] == N) chi[i++] = 1;
        if (i == l) break;
        ++chi[i];
    }
    return acc;
}

} // namespace

TEST_CASE("joint law agrees with the naive coloring sum") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 4; ++trial) {
        const TreeSpec tree = trial % 2 == 0 ? TreeSpec::regular_tree(2, 2)
                                             : oracle::random_explicit_tree(rng, 2, 3);
        std::vector<ScalarLaw> laws;
        for (int i = 0; i < tree.alphabet(); ++i)
            laws.push_back(oracle::random_atomic_law(rng, 5));
        const auto fast = convolve(tree, laws, 5);
        for (int l = 1; l <= 5; ++l)
            CHECK(fast.rat_moments()[l - 1] == convolve_moment_brute(tree, laws, l));
    }
}

TEST_CASE("derived laws stay positive") {
    std::mt19937 rng(67);
    SUBCASE("joins of laws are laws") {
        for (int trial = 0; trial < 5; ++trial) {
            const TreeSpec tree = trial % 2 == 0 ? TreeSpec::mono_tree(2)
                                                 : oracle::random_explicit_tree(rng, 2, 4);
            const auto out = convolve(
                tree, {oracle::random_atomic_law(rng, 8), oracle::random_atomic_law(rng, 8)}, 8);
            CHECK(out.hankel_psd());
        }
    }
    SUBCASE("central limit laws are laws") {
        for (const TreeSpec& t : {TreeSpec::free_tree(2), TreeSpec::mono_tree(3),
                                  TreeSpec::regular_tree(2, 2), TreeSpec::regular_tree(4, 1)})
            CHECK(clt_law(t, Rat(1), 8).hankel_psd());
    }
    SUBCASE("divisible laws built from positive data are laws") {
        for (int trial = 0; trial < 4; ++trial) {
            const TreeSpec tree =
                trial % 2 == 0 ? TreeSpec::regular_tree(2, 2) : TreeSpec::mono_tree(2);
            const auto mu = id_law(tree, Rat(trial - 2, 2), Rat(1 + trial, 3),
                                   oracle::random_atomic_law(rng, 6), 8);
            CHECK(mu.hankel_psd());
        }
    }
}

TEST_CASE("word moments with a fixed position coloring") {
    // Alternating centered word in the free join vanishes.
    std::mt19937 rng(59);
    const ScalarLaw a = oracle::random_centered_law(rng, 6);
    const ScalarLaw b = oracle::random_centered_law(rng, 6);
    CHECK(word_moment_exact(TreeSpec::free_tree(2), {a, b}, {1, 2, 1, 2}) == 0);
    CHECK(word_moment_exact(TreeSpec::free_tree(2), {a, b}, {1, 2, 2, 1}) ==
          a.rat_moments()[1] * b.rat_moments()[1]);
}

TEST_CASE("classical moment conditions of the three named joins") {
    std::mt19937 rng(73);
    std::vector<ScalarLaw> laws{oracle::random_atomic_law(rng, 6),
                                oracle::random_atomic_law(rng, 6),
                                oracle::random_atomic_law(rng, 6)};
    auto mean = [&](int j) { return laws[j - 1].rat_moments()[0]; };

    SUBCASE("two-sided depth-one join factorizes alternating words") {
        const TreeSpec bool3 = TreeSpec::bool_tree(3);
        for (const auto& chi : std::vector<std::vector<int>>{
                 {1, 2}, {2, 1, 3}, {1, 2, 1, 3}, {3, 1, 2, 1, 2}}) {
            Rat prod(1);
            for (int c : chi) prod *= mean(c);
            CHECK(word_moment_exact(bool3, laws, chi) == prod);
        }
    }
    SUBCASE("chained join pulls out locally maximal letters") {
        const TreeSpec mono3 = TreeSpec::mono_tree(3);
        // Position colorings with an interior strict local maximum at k.
        const std::vector<std::pair<std::vector<int>, int>> cases{
            {{1, 3, 2}, 2}, {{2, 3, 1, 2}, 2}, {{1, 2, 1, 3, 1}, 4}, {{3, 1, 2}, 1}};
        for (const auto& [chi, k] : cases) {
            std::vector<int> reduced;
            for (size_t i = 0; i < chi.size(); ++i)
                if (static_cast<int>(i) != k - 1) reduced.push_back(chi[i]);
            CHECK(word_moment_exact(mono3, laws, chi) ==
                  mean(chi[k - 1]) * word_moment_exact(mono3, laws, reduced));
        }
    }
    SUBCASE("full join kills alternating centered words of every length") {
        std::vector<ScalarLaw> centered{oracle::random_centered_law(rng, 6),
                                        oracle::random_centered_law(rng, 6),
                                        oracle::random_centered_law(rng, 6)};
        const TreeSpec free3 = TreeSpec::free_tree(3);
        for (const auto& chi : std::vector<std::vector<int>>{
                 {1, 2}, {1, 2, 3}, {2, 1, 2, 3}, {1, 3, 1, 2, 1, 3}})
            CHECK(word_moment_exact(free3, centered, chi) == 0);
    }
}

TEST_CASE("float laws flow through the checker with an approximate verdict") {
    Bindings env{{"m", ScalarLaw::approx({0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0})},
                 {"n", ScalarLaw::bernoulli(8)}};
    const auto [lhs, rhs] = parse_identity("(mono m n) == (bool (orth m n) n)");
    const auto verdict = check_identity(*lhs, *rhs, env, 8);
    CHECK(verdict.equal);
    CHECK_FALSE(verdict.exact);
}
