#include "mcf/potential.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace mcf {

namespace {

// ---------------------------------------------------------------- lexer ---

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    double number = 0.0;
    std::string ident;
    std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view text)
{
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.'))
                ++j;
            if (j < n && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (text[k] == '+' || text[k] == '-'))
                    ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < n && std::isdigit(static_cast<unsigned char>(text[k])))
                        ++k;
                    j = k;
                }
            }
            double value = 0.0;
            const auto res = std::from_chars(text.data() + i, text.data() + j, value);
            if (res.ec != std::errc{} || res.ptr != text.data() + j)
                throw SyntaxError("invalid number literal", start);
            out.push_back({Tok::Number, value, {}, start});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && std::isalpha(static_cast<unsigned char>(text[j])))
                ++j;
            out.push_back({Tok::Ident, 0.0, std::string(text.substr(i, j - i)), start});
            i = j;
            continue;
        }
        switch (c) {
        case '+': out.push_back({Tok::Plus, 0.0, {}, start}); break;
        case '-': out.push_back({Tok::Minus, 0.0, {}, start}); break;
        case '*': out.push_back({Tok::Star, 0.0, {}, start}); break;
        case '/': out.push_back({Tok::Slash, 0.0, {}, start}); break;
        case '^': out.push_back({Tok::Caret, 0.0, {}, start}); break;
        case '(': out.push_back({Tok::LParen, 0.0, {}, start}); break;
        case ')': out.push_back({Tok::RParen, 0.0, {}, start}); break;
        default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", start);
        }
        ++i;
    }
    out.push_back({Tok::End, 0.0, {}, n});
    return out;
}

// --------------------------------------------------------------- parser ---

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_number(double v)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

NodePtr make_node(NodeKind k, NodePtr lhs, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(Func f, NodePtr arg)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    NodePtr parse()
    {
        NodePtr e = parse_expr();
        if (peek().kind != Tok::End)
            throw SyntaxError("unexpected trailing input", peek().pos);
        return e;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    Token next() { return toks_[idx_++]; }

    void expect(Tok kind, const char* what)
    {
        if (peek().kind != kind) {
            if (peek().kind == Tok::End)
                throw SyntaxError(std::string("unexpected end of input, expected ") + what,
                                  peek().pos);
            throw SyntaxError(std::string("expected ") + what, peek().pos);
        }
        ++idx_;
    }

    NodePtr parse_expr()
    {
        NodePtr lhs = parse_term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Tok op = next().kind;
            NodePtr rhs = parse_term();
            lhs = make_node(op == Tok::Plus ? NodeKind::Add : NodeKind::Sub,
                            std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    NodePtr parse_term()
    {
        NodePtr lhs = parse_factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Tok op = next().kind;
            NodePtr rhs = parse_factor();
            lhs = make_node(op == Tok::Star ? NodeKind::Mul : NodeKind::Div,
                            std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    NodePtr parse_factor()
    {
        NodePtr base = parse_unary();
        if (peek().kind == Tok::Caret) {
            next();
            NodePtr expo = parse_factor(); // right-associative
            return make_node(NodeKind::Pow, std::move(base), std::move(expo));
        }
        return base;
    }

    NodePtr parse_unary()
    {
        if (peek().kind == Tok::Minus) {
            next();
            return make_node(NodeKind::Neg, parse_unary());
        }
        return parse_atom();
    }

    NodePtr parse_atom()
    {
        const Token tok = next();
        switch (tok.kind) {
        case Tok::Number:
            return make_number(tok.number);
        case Tok::LParen: {
            NodePtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident: {
            if (tok.ident == "S") {
                auto n = std::make_shared<ExprNode>();
                n->kind = NodeKind::VarS;
                return n;
            }
            if (tok.ident == "pi")
                return make_number(std::numbers::pi);
            if (tok.ident == "e")
                return make_number(std::numbers::e);
            Func f;
            if (tok.ident == "exp")       f = Func::Exp;
            else if (tok.ident == "log")  f = Func::Log;
            else if (tok.ident == "sqrt") f = Func::Sqrt;
            else if (tok.ident == "sin")  f = Func::Sin;
            else if (tok.ident == "cos")  f = Func::Cos;
            else
                throw UnknownIdentifierError(tok.ident, tok.pos);
            expect(Tok::LParen, "'(' after function name");
            NodePtr arg = parse_expr();
            expect(Tok::RParen, "')'");
            return make_call(f, std::move(arg));
        }
        case Tok::End:
            throw SyntaxError("unexpected end of input, expected an operand", tok.pos);
        default:
            throw SyntaxError("expected an operand", tok.pos);
        }
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

// ------------------------------------------------------------ evaluation ---

template <class T> T checked_pow(T base, T expo)
{
    const bool int_expo = detail::is_integer(static_cast<double>(expo));
    if (base < T(0) && !int_expo)
        throw DomainError("real exponent on negative base");
    if (base == T(0) && expo < T(0))
        throw DomainError("zero raised to a negative power");
    return std::pow(base, expo);
}

template <class T> T eval_scalar(const ExprNode& n, T S)
{
    switch (n.kind) {
    case NodeKind::Number: return static_cast<T>(n.number);
    case NodeKind::VarS:   return S;
    case NodeKind::Neg:    return -eval_scalar(*n.lhs, S);
    case NodeKind::Add:    return eval_scalar(*n.lhs, S) + eval_scalar(*n.rhs, S);
    case NodeKind::Sub:    return eval_scalar(*n.lhs, S) - eval_scalar(*n.rhs, S);
    case NodeKind::Mul:    return eval_scalar(*n.lhs, S) * eval_scalar(*n.rhs, S);
    case NodeKind::Div: {
        const T d = eval_scalar(*n.rhs, S);
        if (d == T(0))
            throw DomainError("division by zero");
        return eval_scalar(*n.lhs, S) / d;
    }
    case NodeKind::Pow:
        return checked_pow(eval_scalar(*n.lhs, S), eval_scalar(*n.rhs, S));
    case NodeKind::Call: {
        const T a = eval_scalar(*n.lhs, S);
        switch (n.func) {
        case Func::Exp:  return std::exp(a);
        case Func::Log:
            if (!(a > T(0)))
                throw DomainError("log of nonpositive value");
            return std::log(a);
        case Func::Sqrt:
            if (a < T(0))
                throw DomainError("sqrt of negative value");
            return std::sqrt(a);
        case Func::Sin:  return std::sin(a);
        case Func::Cos:  return std::cos(a);
        }
        break;
    }
    }
    throw Error("corrupt expression node");
}

Jet3 eval_jet(const ExprNode& n, const Jet3& S)
{
    switch (n.kind) {
    case NodeKind::Number: return Jet3::constant(n.number);
    case NodeKind::VarS:   return S;
    case NodeKind::Neg:    return -eval_jet(*n.lhs, S);
    case NodeKind::Add:    return eval_jet(*n.lhs, S) + eval_jet(*n.rhs, S);
    case NodeKind::Sub:    return eval_jet(*n.lhs, S) - eval_jet(*n.rhs, S);
    case NodeKind::Mul:    return eval_jet(*n.lhs, S) * eval_jet(*n.rhs, S);
    case NodeKind::Div:    return eval_jet(*n.lhs, S) / eval_jet(*n.rhs, S);
    case NodeKind::Pow:    return pow(eval_jet(*n.lhs, S), eval_jet(*n.rhs, S));
    case NodeKind::Call: {
        const Jet3 a = eval_jet(*n.lhs, S);
        switch (n.func) {
        case Func::Exp:  return exp(a);
        case Func::Log:  return log(a);
        case Func::Sqrt: return sqrt(a);
        case Func::Sin:  return sin(a);
        case Func::Cos:  return cos(a);
        }
        break;
    }
    }
    throw Error("corrupt expression node");
}

// ---------------------------------------------------------- serialization ---

// Print levels mirror the grammar chain: expr(1) < term(2) < factor(3) <
// unary(4) < atom(5). A child is parenthesized when its level is below the
// slot's minimum; note the base of ^ must be at unary level, which is why
// Neg(Pow(...)) prints as -(S^2) while Pow(Neg(S),2) prints as -S^2.
int level(const ExprNode& n)
{
    switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Pow: return 3;
    case NodeKind::Neg: return 4;
    default:            return 5;
    }
}

void print(const ExprNode& n, int min_level, std::string& out)
{
    const bool parens = level(n) < min_level;
    if (parens)
        out += '(';
    switch (n.kind) {
    case NodeKind::Number: {
        char buf[40];
        const auto res = std::to_chars(buf, buf + sizeof buf, n.number);
        out.append(buf, res.ptr);
        break;
    }
    case NodeKind::VarS:
        out += 'S';
        break;
    case NodeKind::Neg:
        out += '-';
        print(*n.lhs, 4, out);
        break;
    case NodeKind::Add:
        print(*n.lhs, 1, out); out += " + "; print(*n.rhs, 2, out);
        break;
    case NodeKind::Sub:
        print(*n.lhs, 1, out); out += " - "; print(*n.rhs, 2, out);
        break;
    case NodeKind::Mul:
        print(*n.lhs, 2, out); out += '*'; print(*n.rhs, 3, out);
        break;
    case NodeKind::Div:
        print(*n.lhs, 2, out); out += '/'; print(*n.rhs, 3, out);
        break;
    case NodeKind::Pow:
        print(*n.lhs, 4, out); out += '^'; print(*n.rhs, 3, out);
        break;
    case NodeKind::Call: {
        switch (n.func) {
        case Func::Exp:  out += "exp";  break;
        case Func::Log:  out += "log";  break;
        case Func::Sqrt: out += "sqrt"; break;
        case Func::Sin:  out += "sin";  break;
        case Func::Cos:  out += "cos";  break;
        }
        out += '(';
        print(*n.lhs, 1, out);
        out += ')';
        break;
    }
    }
    if (parens)
        out += ')';
}

bool nodes_equal(const ExprNode& a, const ExprNode& b)
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case NodeKind::Number: return a.number == b.number;
    case NodeKind::VarS:   return true;
    case NodeKind::Neg:    return nodes_equal(*a.lhs, *b.lhs);
    case NodeKind::Call:   return a.func == b.func && nodes_equal(*a.lhs, *b.lhs);
    default:               return nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
    }
}

} // namespace

PotentialExpr parse_potential(std::string_view text)
{
    if (text.empty())
        throw SyntaxError("empty potential", 0);
    return PotentialExpr(Parser(text).parse());
}

std::string to_string(const PotentialExpr& expr)
{
    std::string out;
    print(expr.root(), 1, out);
    return out;
}

bool operator==(const PotentialExpr& a, const PotentialExpr& b)
{
    return nodes_equal(a.root(), b.root());
}

double eval_value(const PotentialExpr& expr, double S)
{
    const double v = eval_scalar<double>(expr.root(), S);
    if (!std::isfinite(v))
        throw OverflowError("potential evaluation overflowed");
    return v;
}

long double eval_value_ld(const PotentialExpr& expr, long double S)
{
    const long double v = eval_scalar<long double>(expr.root(), S);
    if (!std::isfinite(static_cast<double>(v)))
        throw OverflowError("potential evaluation overflowed");
    return v;
}

Jet3 eval_g_jet(const PotentialExpr& expr, double S)
{
    if (!(S >= 0.0))
        throw DomainError("g-jets require S >= 0");
    const Jet3 j = eval_jet(expr.root(), Jet3::variable(S));
    if (!j.is_finite())
        throw OverflowError("potential jet overflowed");
    return j;
}

Jet3 eval_f_jet(const PotentialExpr& expr, double S)
{
    if (!(S > 0.0))
        throw DomainError("f = log S + g requires S > 0");
    const Jet3 g = eval_g_jet(expr, S);
    const double inv = 1.0 / S;
    const Jet3 logjet{std::log(S), inv, -inv * inv, 2.0 * inv * inv * inv};
    const Jet3 f = logjet + g;
    if (!f.is_finite())
        throw OverflowError("f-jet overflowed");
    return f;
}

} // namespace mcf
