#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ephs/errors.hpp"

namespace ephs {

/// Parity of an expression under time reversal.
enum class Parity { Plus, Minus, Indeterminate };

inline Parity parity_from_int(int p) { return p >= 0 ? Parity::Plus : Parity::Minus; }

/// Product of parities; Indeterminate absorbs.
Parity operator*(Parity a, Parity b);
const char* to_string(Parity p);

enum class ExprKind { Constant, Var, Neg, Add, Sub, Mul, Div, IntPow, Exp, Log };

using Bindings = std::map<std::string, double>;
using ParityEnv = std::map<std::string, Parity>;

/// Immutable scalar expression tree over named symbols.
class Expr {
public:
    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double value);
    static Expr var(std::string symbol);

    /// Parses infix syntax: + - * / ^ with integer exponents, exp(), log(),
    /// parentheses; symbols are dotted names such as "b_s.x".
    static Expr parse(std::string_view text);

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;
    Expr pow(int exponent) const;
    static Expr exp(const Expr& arg);
    static Expr log(const Expr& arg);

    /// Exact recursive evaluation. Throws UnboundSymbolError and DomainError
    /// (division by zero, log of a non-positive value).
    double eval(const Bindings& bindings) const;

    /// Forward-mode derivative with respect to each symbol in `wrt`.
    std::vector<double> grad(std::span<const std::string> wrt,
                             const Bindings& bindings) const;

    /// Compositional parity inference; constants are even, mixed-parity sums
    /// are indeterminate.
    Parity parity(const ParityEnv& symbol_parities) const;

    void collect_symbols(std::set<std::string>& out) const;

    /// Literal zero constant (the convention for an absent matrix entry).
    bool is_zero() const;

    ExprKind kind() const;
    std::string str() const;

    /// Structural equality.
    bool operator==(const Expr& other) const;

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

} // namespace ephs
