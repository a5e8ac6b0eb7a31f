#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "treefree/law.hpp"
#include "treefree/tree.hpp"

namespace treefree {

// Syntax tree over law symbols.  The binary operation symbols of the
// convolution calculus are conveniences for convolve with a fixed tree:
// free / bool / mono / antimono joins, orthogonal (orth) and subordination
// (sub) convolutions.
struct ConvExpression {
    enum class Kind { symbol, convolve, power, dilate, bn, bp };

    Kind kind = Kind::symbol;
    std::string name;                                       // symbol
    TreeSpec tree;                                          // convolve / power / bp-from
    TreeSpec tree2;                                         // bp-to
    Rat scalar;                                             // power t / dilate c / bn t
    std::vector<std::shared_ptr<const ConvExpression>> args;
};

using ExprPtr = std::shared_ptr<const ConvExpression>;

ExprPtr make_symbol(std::string name);
ExprPtr make_convolve(TreeSpec tree, std::vector<ExprPtr> args);
ExprPtr make_power(TreeSpec tree, Rat t, ExprPtr arg);
ExprPtr make_dilate(Rat c, ExprPtr arg);
ExprPtr make_bn(Rat t, ExprPtr arg);
ExprPtr make_bp(TreeSpec from, TreeSpec to, ExprPtr arg);

using Bindings = std::map<std::string, ScalarLaw>;

ScalarLaw eval_expr(const ConvExpression& e, const Bindings& bindings, int order);

struct IdentityVerdict {
    bool equal = false;
    bool exact = false;            // both sides evaluated entirely in rationals
    int first_differing_order = 0; // 0 when equal
    double max_abs_gap = 0.0;
};

// Evaluates both sides to the given order.  Rational inputs are compared
// exactly; otherwise the comparison uses the tolerance.
IdentityVerdict check_identity(const ConvExpression& lhs, const ConvExpression& rhs,
                               const Bindings& bindings, int order, double tol = 1e-10);

// Prefix mini-language, e.g. "(bool (orth m n) n)" or
// "(pow free:2 3/2 (pow bool:2 4 m))".  Tree tokens: free:N bool:N mono:N
// antimono:N orth sub regular:n,d id.
ExprPtr parse_expr(const std::string& text);

// Parses "lhs == rhs".
std::pair<ExprPtr, ExprPtr> parse_identity(const std::string& text);

// Tree shorthand used by the expression language and the CLI.
TreeSpec parse_tree_shorthand(const std::string& token);

} // namespace treefree
