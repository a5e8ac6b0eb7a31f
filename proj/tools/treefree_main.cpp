// Command-line surface for the tree-indexed convolution toolkit.
//
// Subcommands: tree, digraph, alpha, cumulants, convolve, identity, clt,
// ktransform, model.  JSON on stdout for structured results, CSV for the
// batch drivers.  Exit codes: 0 success (and "equal" verdicts), 1 identity
// verdict "differ", 2 validation error, 3 numerical error, 4 size limit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "treefree/cumulants.hpp"
#include "treefree/expr.hpp"
#include "treefree/law.hpp"
#include "treefree/model.hpp"
#include "treefree/serialize.hpp"
#include "treefree/transforms.hpp"
#include "treefree/tree.hpp"

using namespace treefree;

namespace {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    Json j;
    in >> j;
    return j;
}

// Tree argument: shorthand (free:2, regular:2,1, ...) or @file.json.
TreeSpec parse_tree_arg(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return tree_from_json(load_json(arg.substr(1)));
    return parse_tree_shorthand(arg);
}

// Law argument: bernoulli | delta:<rat> | semicircle | @file.json.
ScalarLaw parse_law_arg(const std::string& arg, int order) {
    if (!arg.empty() && arg[0] == '@') return law_from_json(load_json(arg.substr(1)));
    if (arg == "bernoulli") return ScalarLaw::bernoulli(std::max(order, 1));
    if (arg == "semicircle") {
        std::vector<Rat> m(std::max(order, 1), Rat(0));
        Rat cat(1);
        for (int k = 1; 2 * k <= order; ++k) {
            cat = cat * Rat(2 * (2 * k - 1), k + 1);
            m[2 * k - 1] = cat;
        }
        return ScalarLaw::exact(std::move(m), Rat(2));
    }
    if (arg.rfind("delta:", 0) == 0)
        return ScalarLaw::delta(rat_from_string(arg.substr(6)), std::max(order, 1));
    throw validation_error("unknown law argument: " + arg);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

// Partition given as comma-separated block ids per element, e.g. "1,2,1".
NCPartition parse_partition_arg(const std::string& text) {
    std::vector<int> ids = parse_int_list(text);
    std::vector<int> relabel(ids.size() + 1, -1);
    std::vector<int> rgs;
    int next = 0;
    for (int raw : ids) {
        if (raw < 1 || raw > static_cast<int>(ids.size()))
            throw validation_error("partition block ids out of range");
        if (relabel[raw] < 0) relabel[raw] = next++;
        rgs.push_back(relabel[raw]);
    }
    return NCPartition(std::move(rgs));
}

void print_json(const Json& j) { std::cout << j.dump() << "\n"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json law_summary(const ScalarLaw& mu) { return law_to_json(mu); }

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"tree-indexed convolution toolkit"};
    app.require_subcommand(1);

    // --- tree ---------------------------------------------------------------
    auto* tree_cmd = app.add_subcommand("tree", "tree construction and comparison");
    tree_cmd->require_subcommand(1);

    std::string t_spec, t_size, t_outer, t_inners, t_sigma, t_src, t_dst, t_psi;
    int t_depth = 4, t_maxdepth = 5;

    auto* t_trunc = tree_cmd->add_subcommand("truncate", "ball of a tree");
    t_trunc->add_option("spec", t_spec, "tree spec (shorthand or @file)")->required();
    t_trunc->add_option("N", t_size, "alphabet size when the spec is a bare kind");
    t_trunc->add_option("--depth", t_depth, "truncation depth");
    t_trunc->callback([&] {
        const std::string spec_arg =
            t_size.empty() ? t_spec : t_spec + ":" + t_size; // "bool 3" == "bool:3"
        const FiniteTree ball = truncate(parse_tree_arg(spec_arg), t_depth);
        Json verts = Json::array();
        for (auto& v : ball.vertices()) verts.push_back(str_to_string(v));
        print_json(Json{{"vertices", verts}});
    });

    auto* t_comp = tree_cmd->add_subcommand("compose", "operad composition");
    t_comp->add_option("--outer", t_outer)->required();
    t_comp->add_option("--inners", t_inners, "comma-separated inner specs")->required();
    t_comp->add_option("--depth", t_depth);
    t_comp->callback([&] {
        std::vector<TreeSpec> inners;
        std::istringstream is(t_inners);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty()) inners.push_back(parse_tree_arg(tok));
        const TreeSpec composed = compose(parse_tree_arg(t_outer), inners);
        const FiniteTree ball = truncate(composed, t_depth);
        Json verts = Json::array();
        for (auto& v : ball.vertices()) verts.push_back(str_to_string(v));
        print_json(Json{{"spec", tree_to_json(composed)}, {"vertices", verts}});
    });

    auto* t_perm = tree_cmd->add_subcommand("permute", "letterwise relabeling");
    t_perm->add_option("spec", t_spec)->required();
    t_perm->add_option("--sigma", t_sigma, "comma-separated images of 1..N")->required();
    t_perm->add_option("--depth", t_depth);
    t_perm->callback([&] {
        const TreeSpec permuted = permute(parse_tree_arg(t_spec), parse_int_list(t_sigma));
        const FiniteTree ball = truncate(permuted, t_depth);
        Json verts = Json::array();
        for (auto& v : ball.vertices()) verts.push_back(str_to_string(v));
        print_json(Json{{"spec", tree_to_json(permuted)}, {"vertices", verts}});
    });

    auto* t_metric = tree_cmd->add_subcommand("metric", "ball agreement depth");
    t_metric->add_option("a", t_src)->required();
    t_metric->add_option("b", t_dst)->required();
    t_metric->add_option("--max-depth", t_maxdepth);
    t_metric->callback([&] {
        const int d =
            ball_agreement_depth(parse_tree_arg(t_src), parse_tree_arg(t_dst), t_maxdepth);
        if (d >= t_maxdepth)
            print_json(Json{{"agreement_depth", ">=" + std::to_string(t_maxdepth)}});
        else
            print_json(Json{{"agreement_depth", d}});
    });

    auto* t_push = tree_cmd->add_subcommand("pushforward-check", "letterwise map bijectivity");
    t_push->add_option("--src", t_src)->required();
    t_push->add_option("--dst", t_dst)->required();
    t_push->add_option("--psi", t_psi, "comma-separated images of the source letters")
        ->required();
    t_push->add_option("--depth", t_depth);
    t_push->callback([&] {
        const auto res =
            pushforward_check(parse_tree_arg(t_src), parse_tree_arg(t_dst),
                              parse_int_list(t_psi), t_depth);
        Json out{{"ok", res.ok}};
        if (res.witness) out["witness"] = str_to_string(*res.witness);
        print_json(out);
    });

    // --- digraph ------------------------------------------------------------
    auto* dg_cmd = app.add_subcommand("digraph", "digraph operad");
    dg_cmd->require_subcommand(1);
    std::string g_file, g_outer, g_inners;
    int g_depth = 4;

    auto* dg_walk = dg_cmd->add_subcommand("walk", "walk tree of a digraph");
    dg_walk->add_option("graph", g_file, "@file with digraph JSON")->required();
    dg_walk->add_option("--depth", g_depth);
    dg_walk->callback([&] {
        const Digraph g = digraph_from_json(load_json(g_file[0] == '@' ? g_file.substr(1)
                                                                       : g_file));
        const FiniteTree ball = truncate(walk_tree(g), g_depth);
        Json verts = Json::array();
        for (auto& v : ball.vertices()) verts.push_back(str_to_string(v));
        print_json(Json{{"vertices", verts}});
    });

    auto* dg_comp = dg_cmd->add_subcommand("compose", "digraph composition");
    dg_comp->add_option("--outer", g_outer)->required();
    dg_comp->add_option("--inners", g_inners)->required();
    dg_comp->callback([&] {
        auto load = [&](const std::string& a) {
            return digraph_from_json(load_json(a[0] == '@' ? a.substr(1) : a));
        };
        std::vector<Digraph> inners;
        std::istringstream is(g_inners);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty()) inners.push_back(load(tok));
        print_json(digraph_to_json(compose_digraph(load(g_outer), inners)));
    });

    // --- alpha --------------------------------------------------------------
    auto* alpha_cmd = app.add_subcommand("alpha", "moment-cumulant coefficient");
    std::string a_tree, a_partition;
    alpha_cmd->add_option("--tree", a_tree)->required();
    alpha_cmd->add_option("--partition", a_partition, "block ids per element, e.g. 1,2,1")
        ->required();
    alpha_cmd->callback([&] {
        const NCPartition pi = parse_partition_arg(a_partition);
        const FiniteTree ball = truncate(parse_tree_arg(a_tree), std::max(1, pi.max_depth()));
        std::cout << rat_to_string(alpha(ball, pi)) << "\n";
    });

    // --- cumulants ----------------------------------------------------------
    auto* cum_cmd = app.add_subcommand("cumulants", "moment <-> cumulant transforms");
    std::string c_law, c_tree = "bool:2", c_direction = "moments-to-cumulants";
    int c_order = 6;
    cum_cmd->add_option("--law", c_law)->required();
    cum_cmd->add_option("--tree", c_tree, "tree flavor (bool:N gives the interval cumulants)");
    cum_cmd->add_option("--order", c_order);
    cum_cmd->add_option("--direction", c_direction)
        ->check(CLI::IsMember({"moments-to-cumulants", "cumulants-to-moments"}));
    cum_cmd->callback([&] {
        const ScalarLaw mu = parse_law_arg(c_law, c_order);
        if (mu.order() < c_order)
            throw validation_error("order error: law has fewer moments than requested");
        const FiniteTree ball = truncate(parse_tree_arg(c_tree), c_order);
        Json values = Json::array();
        if (mu.is_exact()) {
            std::vector<Rat> in(mu.rat_moments().begin(), mu.rat_moments().begin() + c_order);
            const auto out = c_direction == "moments-to-cumulants"
                                 ? tfree_cumulants_from_moments(in, ball)
                                 : moments_from_tfree_cumulants(in, ball);
            for (auto& x : out) values.push_back(rat_to_string(x));
        } else {
            auto in = mu.float_moments();
            in.resize(c_order);
            const auto out = c_direction == "moments-to-cumulants"
                                 ? tfree_cumulants_from_moments(in, ball)
                                 : moments_from_tfree_cumulants(in, ball);
            for (double x : out) values.push_back(x);
        }
        print_json(Json{{"values", values}, {"exact", mu.is_exact()}});
    });

    // --- convolve -----------------------------------------------------------
    auto* conv_cmd = app.add_subcommand("convolve", "joint law along a tree");
    std::string v_tree, v_laws;
    int v_order = 6;
    conv_cmd->add_option("--tree", v_tree)->required();
    conv_cmd->add_option("--laws", v_laws, "comma-separated law arguments")->required();
    conv_cmd->add_option("--order", v_order);
    conv_cmd->callback([&] {
        std::vector<ScalarLaw> laws;
        std::istringstream is(v_laws);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty()) laws.push_back(parse_law_arg(tok, v_order));
        print_json(law_summary(convolve(parse_tree_arg(v_tree), laws, v_order)));
    });

    // --- identity -----------------------------------------------------------
    auto* id_cmd = app.add_subcommand("identity", "expression identity checker");
    std::string i_expr;
    std::vector<std::string> i_bindings;
    int i_order = 8;
    double i_tol = 1e-10;
    id_cmd->add_option("expression", i_expr, "<expr> == <expr>")->required();
    id_cmd->add_option("--law", i_bindings, "symbol=law bindings (repeatable)");
    id_cmd->add_option("--order", i_order);
    id_cmd->add_option("--tol", i_tol);
    id_cmd->callback([&] {
        Bindings env;
        for (const auto& b : i_bindings) {
            const auto eq = b.find('=');
            if (eq == std::string::npos)
                throw validation_error("law bindings have the form name=<law>");
            env.emplace(b.substr(0, eq), parse_law_arg(b.substr(eq + 1), i_order));
        }
        const auto [lhs, rhs] = parse_identity(i_expr);
        const auto verdict = check_identity(*lhs, *rhs, env, i_order, i_tol);
        Json out{{"verdict", verdict.equal ? (verdict.exact ? "equal-exact" : "equal-approx")
                                           : "differ"},
                 {"max_abs_gap", verdict.max_abs_gap}};
        if (!verdict.equal) out["first_differing_order"] = verdict.first_differing_order;
        print_json(out);
        if (!verdict.equal) std::exit(1);
    });

    // --- clt ----------------------------------------------------------------
    auto* clt_cmd = app.add_subcommand("clt", "central limit convergence table (CSV)");
    std::string l_tree, l_law;
    int l_kmax = 4, l_order = 6;
    clt_cmd->add_option("--tree", l_tree)->required();
    clt_cmd->add_option("--law", l_law)->required();
    clt_cmd->add_option("--kmax", l_kmax);
    clt_cmd->add_option("--order", l_order);
    clt_cmd->callback([&] {
        const auto rows =
            clt_convergence(parse_law_arg(l_law, l_order), parse_tree_arg(l_tree), l_kmax,
                            l_order);
        std::cout << "k,order,gap\r\n";
        for (const auto& r : rows)
            std::cout << r.k << "," << r.order << "," << csv_field(fmt_double(r.gap)) << "\r\n";
    });

    // --- ktransform ---------------------------------------------------------
    auto* kt_cmd = app.add_subcommand("ktransform", "density by boundary values (CSV)");
    std::string k_tree, k_laws;
    int k_depth = 6, k_steps = 200, k_degree = 12;
    double k_xmin = -4, k_xmax = 4, k_eps = 1e-3;
    kt_cmd->add_option("--tree", k_tree)->required();
    kt_cmd->add_option("--laws", k_laws)->required();
    kt_cmd->add_option("--depth", k_depth, "tree truncation depth");
    kt_cmd->add_option("--degree", k_degree, "resolvent degree per input law");
    kt_cmd->add_option("--xmin", k_xmin);
    kt_cmd->add_option("--xmax", k_xmax);
    kt_cmd->add_option("--steps", k_steps);
    kt_cmd->add_option("--eps", k_eps);
    kt_cmd->callback([&] {
        std::vector<HandlePtr> handles;
        std::istringstream is(k_laws);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            const ScalarLaw mu = parse_law_arg(tok, 2 * k_degree);
            handles.push_back(cauchy_from_law(mu, std::min(k_degree, mu.order() / 2)));
        }
        const FiniteTree ball = truncate(parse_tree_arg(k_tree), k_depth);
        const auto handle = finite_tree_handle(ball, std::move(handles));
        std::cout << "x,density\r\n";
        for (int i = 0; i <= k_steps; ++i) {
            const double x = k_xmin + (k_xmax - k_xmin) * i / k_steps;
            std::cout << csv_field(fmt_double(x)) << ","
                      << csv_field(fmt_double(density_at(*handle, x, k_eps))) << "\r\n";
        }
    });

    // --- model --------------------------------------------------------------
    auto* model_cmd = app.add_subcommand("model", "operator model drivers");
    model_cmd->require_subcommand(1);
    std::string m_tree, m_models, m_word, m_law;
    int m_level = 6, m_degree = 3;

    auto* m_gns = model_cmd->add_subcommand("gns", "matrix realization of a law");
    m_gns->add_option("--law", m_law)->required();
    m_gns->add_option("--degree", m_degree);
    m_gns->callback([&] {
        const ScalarLaw mu = parse_law_arg(m_law, 2 * m_degree);
        print_json(model_to_json(gns_realize(mu, m_degree)));
    });

    auto* m_expect = model_cmd->add_subcommand("expect", "word expectation table");
    m_expect->add_option("--tree", m_tree)->required();
    m_expect->add_option("--models", m_models, "comma-separated @model.json")->required();
    m_expect->add_option("--word", m_word, "letters, e.g. 1,2,1,2")->required();
    m_expect->add_option("--level", m_level);
    m_expect->callback([&] {
        std::vector<PointedModel> models;
        std::istringstream is(m_models);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty())
                models.push_back(model_from_json(load_json(tok[0] == '@' ? tok.substr(1) : tok)));
        const auto pm = build_product(parse_tree_arg(m_tree), models, m_level);
        std::vector<WordFactor> word;
        for (int c : parse_int_list(m_word)) {
            if (c < 1 || c > pm.factor_count())
                throw validation_error("word letter out of range");
            word.push_back({c, models[c - 1].op()});
        }
        const Cx value = word_expectation(pm, word);
        print_json(Json{{"re", value.real()}, {"im", value.imag()}});
    });

    auto* m_norm = model_cmd->add_subcommand("norm-check", "operator norm bound check");
    m_norm->add_option("--tree", m_tree)->required();
    m_norm->add_option("--models", m_models)->required();
    m_norm->add_option("--level", m_level);
    m_norm->callback([&] {
        std::vector<PointedModel> models;
        std::vector<Matrix> ops;
        std::istringstream is(m_models);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            models.push_back(model_from_json(load_json(tok[0] == '@' ? tok.substr(1) : tok)));
            ops.push_back(models.back().op());
        }
        const auto pm = build_product(parse_tree_arg(m_tree), models, m_level);
        const auto res = norm_bound_check(pm, ops);
        print_json(Json{{"truncated_norm", res.truncated_norm},
                        {"bound", res.bound},
                        {"pass", res.pass},
                        {"max_op_norm", res.max_op_norm},
                        {"max_up_degree", res.max_up_degree}});
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const size_limit_error& e) {
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 4;
    } catch (const numeric_error& e) {
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << Json{{"error", e.what()}}.dump() << "\n";
        return 3;
    }
}
