#ifndef MCF_POTENTIAL_HPP
#define MCF_POTENTIAL_HPP

#include <memory>
#include <string>
#include <string_view>

#include "mcf/jet.hpp"

namespace mcf {

enum class NodeKind { Number, VarS, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Log, Sqrt, Sin, Cos };

struct ExprNode {
    NodeKind kind;
    double number = 0.0;                       // NodeKind::Number
    Func func = Func::Exp;                     // NodeKind::Call
    std::shared_ptr<const ExprNode> lhs, rhs;  // children (lhs only for Neg/Call)
};

/// Parsed radial potential g(S): an immutable expression tree over the single
/// variable S with the elementary functions exp, log, sqrt, sin, cos and ^.
class PotentialExpr {
public:
    explicit PotentialExpr(std::shared_ptr<const ExprNode> root)
        : root_(std::move(root)) {}
    const ExprNode& root() const { return *root_; }
    std::shared_ptr<const ExprNode> root_ptr() const { return root_; }

private:
    std::shared_ptr<const ExprNode> root_;
};

/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?          -- "^" right-associative
///   unary  := "-" unary | atom
///   atom   := NUMBER | "S" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
/// Throws SyntaxError / UnknownIdentifierError.
PotentialExpr parse_potential(std::string_view text);

/// Minimal-parentheses serialization; parse(to_string(e)) == e structurally.
std::string to_string(const PotentialExpr& expr);

bool operator==(const PotentialExpr& a, const PotentialExpr& b);

/// Plain evaluation of g at S (no derivatives). The long double overload
/// backs the finite-difference pullback check, where evaluation noise at
/// double precision would dominate the h^2 stencil error.
double eval_value(const PotentialExpr& expr, double S);
long double eval_value_ld(const PotentialExpr& expr, long double S);

/// (g, g_S, g_SS, g_SSS) at S >= 0. S = 0 is allowed whenever the expression
/// itself is evaluable there (needed for the extension condition g_S(0) > 0).
Jet3 eval_g_jet(const PotentialExpr& expr, double S);

/// Jets of f = log S + g at S > 0, formed as the explicit log-jet
/// (log S, 1/S, -1/S^2, 2/S^3) plus eval_g_jet; the f_S component is
/// bit-identical to 1/S + eval_g_jet(...).v1.
Jet3 eval_f_jet(const PotentialExpr& expr, double S);

} // namespace mcf

#endif // MCF_POTENTIAL_HPP
