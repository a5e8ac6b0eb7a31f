#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "treefree/model.hpp"

using namespace treefree;

namespace {

Matrix random_self_adjoint(std::mt19937& rng, int dim) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Cx(unif(rng), unif(rng));
    return 0.5 * (a + Matrix(a.adjoint()));
}

Matrix random_centered(std::mt19937& rng, int dim) {
    Matrix a = random_self_adjoint(rng, dim);
    a(0, 0) = 0;
    return a;
}

Matrix random_unitary(std::mt19937& rng, int dim) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Cx(unif(rng), unif(rng));
    return a.householderQr().householderQ();
}

ScalarLaw law_of_model(const Matrix& a, int order) {
    const PointedModel m(a, PointedModel::Tag::self_adjoint);
    const auto vm = m.vector_moments(order);
    std::vector<double> moments(order);
    for (int l = 1; l <= order; ++l) moments[l - 1] = vm[l].real();
    return ScalarLaw::approx(std::move(moments), matrix_norm(a));
}

const Matrix kBernoulli = [] {
    Matrix b(2, 2);
    b << 0, 1, 1, 0;
    return b;
}();

} // namespace

TEST_CASE("pointed model validation") {
    Matrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(PointedModel(bad, PointedModel::Tag::self_adjoint), validation_error);
    CHECK_THROWS_AS(PointedModel(2.0 * kBernoulli, PointedModel::Tag::unitary), validation_error);
    CHECK_NOTHROW(PointedModel(kBernoulli, PointedModel::Tag::unitary));
}

TEST_CASE("gns realization") {
    SUBCASE("point mass is one-dimensional") {
        const auto m = gns_realize(ScalarLaw::delta(Rat(5, 2), 8), 4);
        CHECK(m.dim() == 1);
        CHECK(m.op()(0, 0).real() == doctest::Approx(2.5));
    }
    SUBCASE("coin flip gives the two-dimensional flip matrix") {
        const auto m = gns_realize(ScalarLaw::bernoulli(8), 4);
        REQUIRE(m.dim() == 2);
        const auto vm = m.vector_moments(8);
        for (int l = 1; l <= 8; ++l)
            CHECK(vm[l].real() == doctest::Approx(l % 2 == 0 ? 1.0 : 0.0).epsilon(1e-12));
    }
    SUBCASE("semicircle data gives unit off-diagonals") {
        // Catalan moments to order 8.
        const ScalarLaw semi = ScalarLaw::exact({Rat(0), Rat(1), Rat(0), Rat(2), Rat(0), Rat(5),
                                                 Rat(0), Rat(14)},
                                                Rat(2));
        const auto m = gns_realize(semi, 4);
        REQUIRE(m.dim() == 5);
        for (int i = 0; i + 1 < 5; ++i) {
            CHECK(m.op()(i, i + 1).real() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(m.op()(i, i).real() == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
    SUBCASE("atomic laws shrink to their support size") {
        std::mt19937 rng(3);
        const auto mu = oracle::random_atomic_law(rng, 12, 3);
        const auto m = gns_realize(mu, 6);
        CHECK(m.dim() <= 3);
        const auto vm = m.vector_moments(11);
        for (int l = 1; l <= 11; ++l)
            CHECK(vm[l].real() == doctest::Approx(mu.float_moment(l)).epsilon(1e-8));
    }
    SUBCASE("indefinite data is rejected") {
        CHECK_THROWS_AS(gns_realize(ScalarLaw::exact({Rat(1), Rat(0)}), 1), numeric_error);
    }
}

TEST_CASE("product space dimensions") {
    std::vector<PointedModel> two{PointedModel(kBernoulli, PointedModel::Tag::self_adjoint),
                                  PointedModel(kBernoulli, PointedModel::Tag::self_adjoint)};
    CHECK(build_product(TreeSpec::bool_tree(2), two, 1).total_dim() == 3);
    CHECK(build_product(TreeSpec::free_tree(2), two, 3).total_dim() == 7);
    const auto orth = build_product(TreeSpec::orth_tree(), two, 9);
    CHECK(orth.ball().vertices() == std::vector<Str>{{}, {1}, {2, 1}});
    CHECK_THROWS_AS(build_product(TreeSpec::free_tree(2), two, 6, std::int64_t(4)),
                    size_limit_error);
}

TEST_CASE("word expectations") {
    std::vector<PointedModel> two{PointedModel(kBernoulli, PointedModel::Tag::self_adjoint),
                                  PointedModel(kBernoulli, PointedModel::Tag::self_adjoint)};
    const auto pm = build_product(TreeSpec::free_tree(2), two, 6);
    SUBCASE("empty word") { CHECK(word_expectation(pm, {}).real() == doctest::Approx(1.0)); }
    SUBCASE("length guard") {
        std::vector<WordFactor> w(7, WordFactor{1, kBernoulli});
        CHECK_THROWS_AS(word_expectation(pm, w), validation_error);
    }
    SUBCASE("alternating word matches the partition formula") {
        const std::vector<int> chi{1, 2, 1, 2};
        std::vector<WordFactor> w;
        for (int c : chi) w.push_back({c, kBernoulli});
        const double model_value = word_expectation(pm, w).real();
        const double comb_value = word_moment(
            TreeSpec::free_tree(2), {ScalarLaw::bernoulli(6), ScalarLaw::bernoulli(6)}, chi);
        CHECK(model_value == doctest::Approx(comb_value).epsilon(1e-12));
    }
    SUBCASE("alternating centered words vanish in the free product") {
        std::mt19937 rng(5);
        const Matrix a = random_centered(rng, 3), b = random_centered(rng, 3);
        std::vector<PointedModel> ms{PointedModel(a, PointedModel::Tag::self_adjoint),
                                     PointedModel(b, PointedModel::Tag::self_adjoint)};
        const auto fpm = build_product(TreeSpec::free_tree(2), ms, 5);
        const std::vector<WordFactor> w{{1, a}, {2, b}, {1, a}, {2, b}, {1, a}};
        CHECK(std::abs(word_expectation(fpm, w)) < 1e-12);
    }
}

TEST_CASE("model expectations agree with the partition formula on many trees") {
    std::mt19937 rng(7);
    std::vector<TreeSpec> trees{TreeSpec::free_tree(2), TreeSpec::bool_tree(2),
                                TreeSpec::mono_tree(2), TreeSpec::orth_tree(),
                                TreeSpec::sub_tree()};
    trees.push_back(oracle::random_explicit_tree(rng, 2, 3));
    trees.push_back(oracle::random_explicit_tree(rng, 2, 3));
    for (const auto& tree : trees) {
        std::uniform_int_distribution<int> dim(2, 3);
        const Matrix a = random_self_adjoint(rng, dim(rng));
        const Matrix b = random_self_adjoint(rng, dim(rng));
        std::vector<PointedModel> ms{PointedModel(a, PointedModel::Tag::self_adjoint),
                                     PointedModel(b, PointedModel::Tag::self_adjoint)};
        const auto pm = build_product(tree, ms, 6);
        const std::vector<ScalarLaw> laws{law_of_model(a, 6), law_of_model(b, 6)};
        std::uniform_int_distribution<int> letter(1, 2);
        for (int len = 1; len <= 6; ++len) {
            std::vector<int> chi(len);
            for (auto& c : chi) c = letter(rng);
            std::vector<WordFactor> w;
            for (int c : chi) w.push_back({c, c == 1 ? a : b});
            const Cx model_value = word_expectation(pm, w);
            const double comb_value = word_moment(tree, laws, chi);
            CHECK(std::abs(model_value - Cx(comb_value)) < 1e-10);
        }
    }
}

TEST_CASE("sum moments match the joint law") {
    std::mt19937 rng(11);
    for (const TreeSpec& tree : {TreeSpec::free_tree(2), TreeSpec::mono_tree(2)}) {
        const Matrix a = random_self_adjoint(rng, 3), b = random_self_adjoint(rng, 2);
        std::vector<PointedModel> ms{PointedModel(a, PointedModel::Tag::self_adjoint),
                                     PointedModel(b, PointedModel::Tag::self_adjoint)};
        const auto pm = build_product(tree, ms, 6);
        const auto got = sum_moments(pm, {a, b}, 6);
        const auto want = convolve(tree, {law_of_model(a, 6), law_of_model(b, 6)}, 6);
        for (int l = 1; l <= 6; ++l)
            CHECK(std::abs(got[l - 1] - Cx(want.float_moment(l))) < 1e-10);
    }
}

TEST_CASE("left actions respect products") {
    std::mt19937 rng(13);
    const Matrix a = random_self_adjoint(rng, 3), b = random_self_adjoint(rng, 3);
    std::vector<PointedModel> ms{PointedModel(a, PointedModel::Tag::self_adjoint),
                                 PointedModel(random_self_adjoint(rng, 2),
                                              PointedModel::Tag::self_adjoint)};
    const auto pm = build_product(TreeSpec::mono_tree(2), ms, 4);
    // <xi, l(a) l(b) xi> = <xi, l(ab) xi> and mixed three-letter words.
    const Cx split = word_expectation(pm, {{1, a}, {1, b}});
    const Cx joined = word_expectation(pm, {{1, Matrix(a * b)}});
    CHECK(std::abs(split - joined) < 1e-12);
    const Cx split3 = word_expectation(pm, {{2, ms[1].op()}, {1, a}, {1, b}});
    const Cx joined3 = word_expectation(pm, {{2, ms[1].op()}, {1, Matrix(a * b)}});
    CHECK(std::abs(split3 - joined3) < 1e-12);
}

TEST_CASE("composition isomorphism for expectations") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const TreeSpec outer = oracle::random_explicit_tree(rng, 2, 2);
        const TreeSpec t1 = oracle::random_explicit_tree(rng, 2, 2);
        const TreeSpec t2 = oracle::random_explicit_tree(rng, 2, 2);
        std::vector<Matrix> ops;
        std::vector<PointedModel> inner_models;
        for (int i = 0; i < 4; ++i) {
            ops.push_back(random_self_adjoint(rng, 2));
            inner_models.emplace_back(ops.back(), PointedModel::Tag::self_adjoint);
        }
        // One-stage product over the composed tree.
        const auto composite = build_product(
            compose(outer, {t1, t2}), inner_models, 4);
        // Two-stage: inner products materialized densely, then joined.
        const auto pm1 = build_product(t1, {inner_models[0], inner_models[1]}, 2);
        const auto pm2 = build_product(t2, {inner_models[2], inner_models[3]}, 2);
        ProductModel outer_pm(outer,
                              {static_cast<int>(pm1.total_dim()),
                               static_cast<int>(pm2.total_dim())},
                              4);
        auto lift = [&](int global_letter, const Matrix& x) {
            // Letter 1,2 live in the first inner factor; 3,4 in the second.
            if (global_letter <= 2) return std::pair(1, pm1.lambda_dense(global_letter, x));
            return std::pair(2, pm2.lambda_dense(global_letter - 2, x));
        };
        std::uniform_int_distribution<int> letter(1, 4);
        for (int len = 1; len <= 4; ++len) {
            std::vector<int> chi(len);
            for (auto& c : chi) c = letter(rng);
            std::vector<WordFactor> flat, nested;
            for (int c : chi) {
                flat.push_back({c, ops[c - 1]});
                auto [j, lifted] = lift(c, ops[c - 1]);
                nested.push_back({j, lifted});
            }
            const Cx lhs = word_expectation(composite, flat);
            const Cx rhs = word_expectation(outer_pm, nested);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("letter-subset expectations agree with the restricted product") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 4; ++trial) {
        const TreeSpec big = oracle::random_explicit_tree(rng, 3, 3);
        const FiniteTree big_ball = truncate(big, 6);
        std::vector<Str> small_verts;
        for (auto& s : big_ball.vertices())
            if (std::all_of(s.begin(), s.end(), [](int x) { return x <= 2; }))
                small_verts.push_back(s);
        const TreeSpec small = TreeSpec::explicit_tree(2, small_verts);
        std::vector<PointedModel> ms;
        for (int i = 0; i < 3; ++i)
            ms.emplace_back(random_self_adjoint(rng, 2), PointedModel::Tag::self_adjoint);
        const auto pm_big = build_product(big, ms, 5);
        const auto pm_small = build_product(small, {ms[0], ms[1]}, 5);
        std::uniform_int_distribution<int> letter(1, 2);
        for (int len = 1; len <= 5; ++len) {
            std::vector<int> chi(len);
            for (auto& c : chi) c = letter(rng);
            std::vector<WordFactor> w;
            for (int c : chi) w.push_back({c, ms[c - 1].op()});
            CHECK(std::abs(word_expectation(pm_big, w) - word_expectation(pm_small, w)) < 1e-12);
        }
    }
}

TEST_CASE("operator norm bounds") {
    std::mt19937 rng(23);
    SUBCASE("zero summands") {
        std::vector<PointedModel> ms{PointedModel(kBernoulli, PointedModel::Tag::self_adjoint),
                                     PointedModel(kBernoulli, PointedModel::Tag::self_adjoint)};
        const auto pm = build_product(TreeSpec::free_tree(2), ms, 4);
        const auto res =
            norm_bound_check(pm, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)});
        CHECK(res.truncated_norm == doctest::Approx(0.0));
        CHECK(res.pass);
    }
    SUBCASE("coin-flip generators in the free product") {
        std::vector<PointedModel> ms{PointedModel(kBernoulli, PointedModel::Tag::self_adjoint),
                                     PointedModel(kBernoulli, PointedModel::Tag::self_adjoint)};
        const auto pm = build_product(TreeSpec::free_tree(2), ms, 6);
        const auto res = norm_bound_check(pm, {kBernoulli, kBernoulli});
        CHECK(res.pass);
        // Aggregate form: 2 sqrt(sum of squared norms) + max norm.
        CHECK(res.truncated_norm <= 2 * std::sqrt(res.sum_sq_norms) + res.max_op_norm + 1e-9);
        // Degree form: (2 sqrt(max up-degree) + 1) * max norm.
        CHECK(res.truncated_norm <=
              (2 * std::sqrt(res.max_up_degree) + 1) * res.max_op_norm + 1e-9);
        // The truncated free sum of two coin flips approaches norm 2.
        CHECK(res.truncated_norm <= 2.0 + 1e-9);
        CHECK(res.truncated_norm > 1.8);
    }
    SUBCASE("random centered summands never violate the bound") {
        for (int trial = 0; trial < 8; ++trial) {
            const TreeSpec tree = trial % 2 == 0 ? TreeSpec::mono_tree(2)
                                                 : oracle::random_explicit_tree(rng, 2, 3);
            std::vector<PointedModel> ms;
            std::vector<Matrix> as;
            for (int i = 0; i < 2; ++i) {
                as.push_back(random_centered(rng, 3));
                ms.emplace_back(as.back(), PointedModel::Tag::self_adjoint);
            }
            const auto pm = build_product(tree, ms, 6);
            const auto res = norm_bound_check(pm, as);
            CHECK(res.pass);
        }
    }
    SUBCASE("non-centered input is rejected") {
        std::vector<PointedModel> ms{PointedModel(kBernoulli, PointedModel::Tag::self_adjoint),
                                     PointedModel(kBernoulli, PointedModel::Tag::self_adjoint)};
        const auto pm = build_product(TreeSpec::free_tree(2), ms, 3);
        Matrix shifted = kBernoulli;
        shifted(0, 0) = 1;
        CHECK_THROWS_AS(norm_bound_check(pm, {shifted, kBernoulli}), validation_error);
    }
}

TEST_CASE("coupling of a stage with its two-band part") {
    std::mt19937 rng(29);
    SUBCASE("coin flips couple exactly at stage zero") {
        const PointedModel coin(kBernoulli, PointedModel::Tag::self_adjoint);
        const auto rep = clt_coupling(TreeSpec::free_tree(2), {coin}, 0, 4);
        CHECK(rep.diff_norm == doctest::Approx(0.0));
        CHECK(rep.pass);
    }
    SUBCASE("three-dimensional centered models at stages zero and one") {
        for (const TreeSpec& tree : {TreeSpec::free_tree(2), TreeSpec::mono_tree(2)}) {
            for (int k : {0, 1}) {
                Matrix a = random_centered(rng, 3);
                // Normalize to unit variance.
                a /= std::sqrt(a.col(0).squaredNorm());
                const PointedModel m(a, PointedModel::Tag::self_adjoint);
                const auto rep = clt_coupling(tree, {m}, k, 6);
                CHECK(rep.diff_norm <= rep.diff_bound + 1e-9);
                CHECK(rep.z_norm <= rep.z_bound + 1e-9);
                CHECK(rep.pass);
            }
        }
    }
}

TEST_CASE("multiplicative joins of unitaries") {
    std::mt19937 rng(31);
    SUBCASE("identity unitaries give the constant law") {
        std::vector<PointedModel> ms{
            PointedModel(Matrix::Identity(2, 2), PointedModel::Tag::unitary),
            PointedModel(Matrix::Identity(2, 2), PointedModel::Tag::unitary)};
        const auto pm = build_product(TreeSpec::mono_tree(2), ms, 4);
        const std::vector<Matrix> us{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
        for (const auto& word :
             std::vector<std::vector<int>>{{1}, {1, 1}, {1, -1}, {-1, 1, 1, -1}})
            CHECK(std::abs(multiplicative_moments(pm, us, word) - Cx(1.0)) < 1e-12);
    }
    SUBCASE("composition morphism on small trees") {
        for (int trial = 0; trial < 3; ++trial) {
            const TreeSpec outer = oracle::random_explicit_tree(rng, 2, 2);
            const TreeSpec t1 = oracle::random_explicit_tree(rng, 2, 2);
            const TreeSpec t2 = oracle::random_explicit_tree(rng, 2, 2);
            std::vector<Matrix> us;
            std::vector<PointedModel> ms;
            for (int i = 0; i < 4; ++i) {
                us.push_back(random_unitary(rng, 2));
                ms.emplace_back(us.back(), PointedModel::Tag::unitary);
            }
            const auto composite = build_product(compose(outer, {t1, t2}), ms, 4);
            const auto pm1 = build_product(t1, {ms[0], ms[1]}, 2);
            const auto pm2 = build_product(t2, {ms[2], ms[3]}, 2);
            const Matrix v1 = multiplicative_product_dense(pm1, {us[0], us[1]});
            const Matrix v2 = multiplicative_product_dense(pm2, {us[2], us[3]});
            ProductModel outer_pm(outer,
                                  {static_cast<int>(pm1.total_dim()),
                                   static_cast<int>(pm2.total_dim())},
                                  4);
            for (const auto& word :
                 std::vector<std::vector<int>>{{1}, {1, 1}, {1, -1, 1}, {1, 1, -1, -1}}) {
                const Cx lhs = multiplicative_moments(composite, us, word);
                const Cx rhs = multiplicative_moments(outer_pm, {v1, v2}, word);
                CHECK(std::abs(lhs - rhs) < 1e-10);
            }
        }
    }
    SUBCASE("increasing relabelings preserve the product law") {
        // bool(orth, id) with duplicated second argument vs the monotone join.
        const TreeSpec src =
            compose(TreeSpec::bool_tree(2), {TreeSpec::orth_tree(), TreeSpec::identity()});
        const Matrix u1 = random_unitary(rng, 2), u2 = random_unitary(rng, 2);
        std::vector<PointedModel> src_models{PointedModel(u1, PointedModel::Tag::unitary),
                                             PointedModel(u2, PointedModel::Tag::unitary),
                                             PointedModel(u2, PointedModel::Tag::unitary)};
        std::vector<PointedModel> dst_models{PointedModel(u1, PointedModel::Tag::unitary),
                                             PointedModel(u2, PointedModel::Tag::unitary)};
        const auto src_pm = build_product(src, src_models, 4);
        const auto dst_pm = build_product(TreeSpec::mono_tree(2), dst_models, 4);
        for (const auto& word :
             std::vector<std::vector<int>>{{1}, {-1}, {1, 1}, {1, -1, 1}, {-1, 1, 1, -1}}) {
            const Cx lhs = multiplicative_moments(src_pm, {u1, u2, u2}, word);
            const Cx rhs = multiplicative_moments(dst_pm, {u1, u2}, word);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
    SUBCASE("non-unitary factors are rejected") {
        std::vector<PointedModel> ms{
            PointedModel(Matrix::Identity(2, 2), PointedModel::Tag::unitary),
            PointedModel(Matrix::Identity(2, 2), PointedModel::Tag::unitary)};
        const auto pm = build_product(TreeSpec::mono_tree(2), ms, 2);
        CHECK_THROWS_AS(multiplicative_moments(pm, {2.0 * Matrix::Identity(2, 2),
                                                    Matrix::Identity(2, 2)},
                                               {1}),
                        validation_error);
    }
}
