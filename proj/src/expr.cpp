#include "treefree/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace treefree {

ExprPtr make_symbol(std::string name) {
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::symbol;
    e->name = std::move(name);
    return e;
}

ExprPtr make_convolve(TreeSpec tree, std::vector<ExprPtr> args) {
    if (static_cast<int>(args.size()) != tree.alphabet())
        throw validation_error("expression arity does not match tree alphabet");
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::convolve;
    e->tree = std::move(tree);
    e->args = std::move(args);
    return e;
}

ExprPtr make_power(TreeSpec tree, Rat t, ExprPtr arg) {
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::power;
    e->tree = std::move(tree);
    e->scalar = std::move(t);
    e->args = {std::move(arg)};
    return e;
}

ExprPtr make_dilate(Rat c, ExprPtr arg) {
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::dilate;
    e->scalar = std::move(c);
    e->args = {std::move(arg)};
    return e;
}

ExprPtr make_bn(Rat t, ExprPtr arg) {
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::bn;
    e->scalar = std::move(t);
    e->args = {std::move(arg)};
    return e;
}

ExprPtr make_bp(TreeSpec from, TreeSpec to, ExprPtr arg) {
    auto e = std::make_shared<ConvExpression>();
    e->kind = ConvExpression::Kind::bp;
    e->tree = std::move(from);
    e->tree2 = std::move(to);
    e->args = {std::move(arg)};
    return e;
}

ScalarLaw eval_expr(const ConvExpression& e, const Bindings& bindings, int order) {
    switch (e.kind) {
        case ConvExpression::Kind::symbol: {
            auto it = bindings.find(e.name);
            if (it == bindings.end()) throw validation_error("unbound symbol: " + e.name);
            return it->second.truncated(order);
        }
        case ConvExpression::Kind::convolve: {
            std::vector<ScalarLaw> laws;
            laws.reserve(e.args.size());
            for (auto& a : e.args) laws.push_back(eval_expr(*a, bindings, order));
            return convolve(e.tree, laws, order);
        }
        case ConvExpression::Kind::power:
            return convolution_power(eval_expr(*e.args[0], bindings, order), e.tree, e.scalar,
                                     order);
        case ConvExpression::Kind::dilate:
            return dilate(e.scalar, eval_expr(*e.args[0], bindings, order));
        case ConvExpression::Kind::bn:
            return bn_semigroup(eval_expr(*e.args[0], bindings, order), e.scalar, order);
        case ConvExpression::Kind::bp:
            return bp_bijection(eval_expr(*e.args[0], bindings, order), e.tree, e.tree2, order);
    }
    throw error("unreachable expression kind");
}

IdentityVerdict check_identity(const ConvExpression& lhs, const ConvExpression& rhs,
                               const Bindings& bindings, int order, double tol) {
    const ScalarLaw a = eval_expr(lhs, bindings, order);
    const ScalarLaw b = eval_expr(rhs, bindings, order);
    IdentityVerdict v;
    v.exact = a.is_exact() && b.is_exact();
    v.equal = true;
    if (v.exact) {
        for (int l = 1; l <= order; ++l) {
            const Rat d = a.rat_moments()[l - 1] - b.rat_moments()[l - 1];
            if (d != 0) {
                v.equal = false;
                v.first_differing_order = l;
                v.max_abs_gap = std::abs(to_double(d));
                break;
            }
        }
    } else {
        for (int l = 1; l <= order; ++l) {
            const double d = std::abs(a.float_moment(l) - b.float_moment(l));
            v.max_abs_gap = std::max(v.max_abs_gap, d);
            if (d > tol && v.equal) {
                v.equal = false;
                v.first_differing_order = l;
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Parsing

TreeSpec parse_tree_shorthand(const std::string& token) {
    auto colon = token.find(':');
    const std::string kind = token.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : token.substr(colon + 1);
    auto need_int = [&](const std::string& s) {
        if (s.empty()) throw validation_error("tree shorthand needs a numeric argument: " + token);
        return std::stoi(s);
    };
    if (kind == "free") return TreeSpec::free_tree(need_int(rest));
    if (kind == "bool") return TreeSpec::bool_tree(need_int(rest));
    if (kind == "mono") return TreeSpec::mono_tree(need_int(rest));
    if (kind == "antimono") return TreeSpec::anti_mono_tree(need_int(rest));
    if (kind == "orth") return TreeSpec::orth_tree();
    if (kind == "sub") return TreeSpec::sub_tree();
    if (kind == "id") return TreeSpec::identity();
    if (kind == "regular") {
        auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw validation_error("regular tree shorthand is regular:n,d");
        return TreeSpec::regular_tree(std::stoi(rest.substr(0, comma)),
                                      std::stoi(rest.substr(comma + 1)));
    }
    throw validation_error("unknown tree shorthand: " + token);
}

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        if (pos >= text.size()) throw validation_error("unexpected end of expression");
        return text[pos];
    }

    void expect(char c) {
        if (peek() != c)
            throw validation_error(std::string("expected '") + c + "' in expression");
        ++pos;
    }

    std::string token() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (start == pos) throw validation_error("expected a token in expression");
        return text.substr(start, pos - start);
    }

    ExprPtr parse() {
        if (peek() != '(') return make_symbol(token());
        expect('(');
        const std::string head = token();
        ExprPtr out;
        if (head == "free" || head == "bool" || head == "mono" || head == "antimono") {
            std::vector<ExprPtr> args;
            while (peek() != ')') args.push_back(parse());
            const int n = static_cast<int>(args.size());
            TreeSpec t = head == "free"       ? TreeSpec::free_tree(n)
                         : head == "bool"     ? TreeSpec::bool_tree(n)
                         : head == "mono"     ? TreeSpec::mono_tree(n)
                                              : TreeSpec::anti_mono_tree(n);
            out = make_convolve(std::move(t), std::move(args));
        } else if (head == "orth" || head == "sub") {
            std::vector<ExprPtr> args;
            while (peek() != ')') args.push_back(parse());
            if (args.size() != 2)
                throw validation_error(head + " convolution takes exactly two arguments");
            out = make_convolve(head == "orth" ? TreeSpec::orth_tree() : TreeSpec::sub_tree(),
                                std::move(args));
        } else if (head == "conv") {
            TreeSpec t = parse_tree_shorthand(token());
            std::vector<ExprPtr> args;
            while (peek() != ')') args.push_back(parse());
            out = make_convolve(std::move(t), std::move(args));
        } else if (head == "pow") {
            TreeSpec t = parse_tree_shorthand(token());
            Rat r = rat_from_string(token());
            out = make_power(std::move(t), std::move(r), parse());
        } else if (head == "dilate") {
            Rat r = rat_from_string(token());
            out = make_dilate(std::move(r), parse());
        } else if (head == "bn") {
            Rat r = rat_from_string(token());
            out = make_bn(std::move(r), parse());
        } else if (head == "bp") {
            TreeSpec from = parse_tree_shorthand(token());
            TreeSpec to = parse_tree_shorthand(token());
            out = make_bp(std::move(from), std::move(to), parse());
        } else {
            throw validation_error("unknown expression operator: " + head);
        }
        expect(')');
        return out;
    }
};

} // namespace

ExprPtr parse_expr(const std::string& text) {
    Parser p(text);
    ExprPtr e = p.parse();
    if (!p.at_end()) throw validation_error("trailing characters after expression");
    return e;
}

std::pair<ExprPtr, ExprPtr> parse_identity(const std::string& text) {
    const auto sep = text.find("==");
    if (sep == std::string::npos)
        throw validation_error("identity must have the form <expr> == <expr>");
    return {parse_expr(text.substr(0, sep)), parse_expr(text.substr(sep + 2))};
}

} // namespace treefree
