#include "ephs/expr.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace ephs {

Parity operator*(Parity a, Parity b)
{
    if (a == Parity::Indeterminate || b == Parity::Indeterminate)
        return Parity::Indeterminate;
    return a == b ? Parity::Plus : Parity::Minus;
}

const char* to_string(Parity p)
{
    switch (p) {
    case Parity::Plus: return "+1";
    case Parity::Minus: return "-1";
    default: return "indeterminate";
    }
}

struct Expr::Node {
    ExprKind kind;
    double value = 0.0;     // Constant
    std::string symbol;     // Var
    int exponent = 0;       // IntPow
    std::shared_ptr<const Node> lhs, rhs;
};

Expr Expr::constant(double value)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::var(std::string symbol)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Var;
    n->symbol = std::move(symbol);
    return Expr(std::move(n));
}

#define EPHS_BINARY(op, kindval)                                                   \
    Expr operator op(const Expr& a, const Expr& b)                                 \
    {                                                                              \
        auto n = std::make_shared<Expr::Node>();                                   \
        n->kind = ExprKind::kindval;                                               \
        n->lhs = a.node_;                                                          \
        n->rhs = b.node_;                                                          \
        return Expr(std::move(n));                                                 \
    }

EPHS_BINARY(+, Add)
EPHS_BINARY(-, Sub)
EPHS_BINARY(*, Mul)
EPHS_BINARY(/, Div)
#undef EPHS_BINARY

Expr Expr::operator-() const
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Neg;
    n->lhs = node_;
    return Expr(std::move(n));
}

Expr Expr::pow(int exponent) const
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::IntPow;
    n->exponent = exponent;
    n->lhs = node_;
    return Expr(std::move(n));
}

Expr Expr::exp(const Expr& arg)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Exp;
    n->lhs = arg.node_;
    return Expr(std::move(n));
}

Expr Expr::log(const Expr& arg)
{
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Log;
    n->lhs = arg.node_;
    return Expr(std::move(n));
}

namespace {

double int_power(double base, int exponent)
{
    if (exponent == 0)
        return 1.0;
    if (exponent < 0) {
        if (base == 0.0)
            throw DomainError("0 raised to a negative power");
        return 1.0 / int_power(base, -exponent);
    }
    double acc = 1.0;
    double b = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1)
            acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

double eval_node(const Expr::Node* n, const Bindings& bindings)
{
    switch (n->kind) {
    case ExprKind::Constant:
        return n->value;
    case ExprKind::Var: {
        auto it = bindings.find(n->symbol);
        if (it == bindings.end())
            throw UnboundSymbolError(n->symbol);
        return it->second;
    }
    case ExprKind::Neg:
        return -eval_node(n->lhs.get(), bindings);
    case ExprKind::Add:
        return eval_node(n->lhs.get(), bindings) + eval_node(n->rhs.get(), bindings);
    case ExprKind::Sub:
        return eval_node(n->lhs.get(), bindings) - eval_node(n->rhs.get(), bindings);
    case ExprKind::Mul:
        return eval_node(n->lhs.get(), bindings) * eval_node(n->rhs.get(), bindings);
    case ExprKind::Div: {
        double denom = eval_node(n->rhs.get(), bindings);
        if (denom == 0.0)
            throw DomainError("division by zero");
        return eval_node(n->lhs.get(), bindings) / denom;
    }
    case ExprKind::IntPow:
        return int_power(eval_node(n->lhs.get(), bindings), n->exponent);
    case ExprKind::Exp:
        return std::exp(eval_node(n->lhs.get(), bindings));
    case ExprKind::Log: {
        double arg = eval_node(n->lhs.get(), bindings);
        if (!(arg > 0.0))
            throw DomainError("log of a non-positive value");
        return std::log(arg);
    }
    }
    throw Error("expr: unreachable");
}

struct Dual {
    double value = 0.0;
    std::vector<double> tangent;
};

Dual eval_dual(const Expr::Node* n, std::span<const std::string> wrt,
               const Bindings& bindings)
{
    const std::size_t m = wrt.size();
    switch (n->kind) {
    case ExprKind::Constant:
        return {n->value, std::vector<double>(m, 0.0)};
    case ExprKind::Var: {
        auto it = bindings.find(n->symbol);
        if (it == bindings.end())
            throw UnboundSymbolError(n->symbol);
        Dual d{it->second, std::vector<double>(m, 0.0)};
        for (std::size_t k = 0; k < m; ++k)
            if (wrt[k] == n->symbol)
                d.tangent[k] = 1.0;
        return d;
    }
    case ExprKind::Neg: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        a.value = -a.value;
        for (auto& t : a.tangent)
            t = -t;
        return a;
    }
    case ExprKind::Add: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        Dual b = eval_dual(n->rhs.get(), wrt, bindings);
        a.value += b.value;
        for (std::size_t k = 0; k < m; ++k)
            a.tangent[k] += b.tangent[k];
        return a;
    }
    case ExprKind::Sub: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        Dual b = eval_dual(n->rhs.get(), wrt, bindings);
        a.value -= b.value;
        for (std::size_t k = 0; k < m; ++k)
            a.tangent[k] -= b.tangent[k];
        return a;
    }
    case ExprKind::Mul: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        Dual b = eval_dual(n->rhs.get(), wrt, bindings);
        Dual out{a.value * b.value, std::vector<double>(m)};
        for (std::size_t k = 0; k < m; ++k)
            out.tangent[k] = a.tangent[k] * b.value + a.value * b.tangent[k];
        return out;
    }
    case ExprKind::Div: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        Dual b = eval_dual(n->rhs.get(), wrt, bindings);
        if (b.value == 0.0)
            throw DomainError("division by zero");
        Dual out{a.value / b.value, std::vector<double>(m)};
        for (std::size_t k = 0; k < m; ++k)
            out.tangent[k] = (a.tangent[k] * b.value - a.value * b.tangent[k]) /
                             (b.value * b.value);
        return out;
    }
    case ExprKind::IntPow: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        const int e = n->exponent;
        Dual out{int_power(a.value, e), std::vector<double>(m, 0.0)};
        if (e != 0) {
            double factor = e * int_power(a.value, e - 1);
            for (std::size_t k = 0; k < m; ++k)
                out.tangent[k] = factor * a.tangent[k];
        }
        return out;
    }
    case ExprKind::Exp: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        double v = std::exp(a.value);
        Dual out{v, std::vector<double>(m)};
        for (std::size_t k = 0; k < m; ++k)
            out.tangent[k] = v * a.tangent[k];
        return out;
    }
    case ExprKind::Log: {
        Dual a = eval_dual(n->lhs.get(), wrt, bindings);
        if (!(a.value > 0.0))
            throw DomainError("log of a non-positive value");
        Dual out{std::log(a.value), std::vector<double>(m)};
        for (std::size_t k = 0; k < m; ++k)
            out.tangent[k] = a.tangent[k] / a.value;
        return out;
    }
    }
    throw Error("expr: unreachable");
}

Parity parity_node(const Expr::Node* n, const ParityEnv& env)
{
    switch (n->kind) {
    case ExprKind::Constant:
        return Parity::Plus;
    case ExprKind::Var: {
        auto it = env.find(n->symbol);
        return it == env.end() ? Parity::Indeterminate : it->second;
    }
    case ExprKind::Neg:
        return parity_node(n->lhs.get(), env);
    case ExprKind::Add:
    case ExprKind::Sub: {
        Parity a = parity_node(n->lhs.get(), env);
        Parity b = parity_node(n->rhs.get(), env);
        return a == b ? a : Parity::Indeterminate;
    }
    case ExprKind::Mul:
    case ExprKind::Div:
        return parity_node(n->lhs.get(), env) * parity_node(n->rhs.get(), env);
    case ExprKind::IntPow: {
        if (n->exponent == 0)
            return Parity::Plus;
        Parity a = parity_node(n->lhs.get(), env);
        if (a == Parity::Indeterminate)
            return Parity::Indeterminate;
        return (n->exponent % 2 == 0) ? Parity::Plus : a;
    }
    case ExprKind::Exp:
    case ExprKind::Log:
        return parity_node(n->lhs.get(), env) == Parity::Plus ? Parity::Plus
                                                              : Parity::Indeterminate;
    }
    return Parity::Indeterminate;
}

void collect_node(const Expr::Node* n, std::set<std::string>& out)
{
    if (n == nullptr)
        return;
    if (n->kind == ExprKind::Var)
        out.insert(n->symbol);
    collect_node(n->lhs.get(), out);
    collect_node(n->rhs.get(), out);
}

bool node_equal(const Expr::Node* a, const Expr::Node* b)
{
    if (a == b)
        return true;
    if (a == nullptr || b == nullptr || a->kind != b->kind)
        return false;
    switch (a->kind) {
    case ExprKind::Constant:
        return a->value == b->value;
    case ExprKind::Var:
        return a->symbol == b->symbol;
    case ExprKind::IntPow:
        return a->exponent == b->exponent && node_equal(a->lhs.get(), b->lhs.get());
    default:
        return node_equal(a->lhs.get(), b->lhs.get()) &&
               node_equal(a->rhs.get(), b->rhs.get());
    }
}

std::string format_constant(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Precedence levels for printing: additive 1, multiplicative 2, unary 3,
// power 4, atoms 5.
int precedence(const Expr::Node* n)
{
    switch (n->kind) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::IntPow: return 4;
    default: return 5;
    }
}

void print_node(const Expr::Node* n, std::string& out, int parent_prec)
{
    const int prec = precedence(n);
    const bool parens = prec < parent_prec;
    if (parens)
        out += '(';
    switch (n->kind) {
    case ExprKind::Constant: {
        double v = n->value;
        if (v < 0.0) {
            // Render negative literals through unary minus so the printer
            // output stays parseable without a signed-number token.
            out += '-';
            out += format_constant(-v);
        } else {
            out += format_constant(v);
        }
        break;
    }
    case ExprKind::Var:
        out += n->symbol;
        break;
    case ExprKind::Neg:
        out += '-';
        print_node(n->lhs.get(), out, prec + 1);
        break;
    case ExprKind::Add:
        print_node(n->lhs.get(), out, prec);
        out += " + ";
        print_node(n->rhs.get(), out, prec + 1);
        break;
    case ExprKind::Sub:
        print_node(n->lhs.get(), out, prec);
        out += " - ";
        print_node(n->rhs.get(), out, prec + 1);
        break;
    case ExprKind::Mul:
        print_node(n->lhs.get(), out, prec);
        out += "*";
        print_node(n->rhs.get(), out, prec + 1);
        break;
    case ExprKind::Div:
        print_node(n->lhs.get(), out, prec);
        out += "/";
        print_node(n->rhs.get(), out, prec + 1);
        break;
    case ExprKind::IntPow:
        print_node(n->lhs.get(), out, prec + 1);
        out += '^';
        out += std::to_string(n->exponent);
        break;
    case ExprKind::Exp:
        out += "exp(";
        print_node(n->lhs.get(), out, 0);
        out += ')';
        break;
    case ExprKind::Log:
        out += "log(";
        print_node(n->lhs.get(), out, 0);
        out += ')';
        break;
    }
    if (parens)
        out += ')';
}

} // namespace

double Expr::eval(const Bindings& bindings) const
{
    return eval_node(node_.get(), bindings);
}

std::vector<double> Expr::grad(std::span<const std::string> wrt,
                               const Bindings& bindings) const
{
    return eval_dual(node_.get(), wrt, bindings).tangent;
}

Parity Expr::parity(const ParityEnv& symbol_parities) const
{
    return parity_node(node_.get(), symbol_parities);
}

void Expr::collect_symbols(std::set<std::string>& out) const
{
    collect_node(node_.get(), out);
}

bool Expr::is_zero() const
{
    return node_->kind == ExprKind::Constant && node_->value == 0.0;
}

ExprKind Expr::kind() const
{
    return node_->kind;
}

std::string Expr::str() const
{
    std::string out;
    print_node(node_.get(), out, 0);
    return out;
}

bool Expr::operator==(const Expr& other) const
{
    return node_equal(node_.get(), other.node_.get());
}

} // namespace ephs
