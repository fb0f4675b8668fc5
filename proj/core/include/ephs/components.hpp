#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ephs/expr.hpp"
#include "ephs/interfaces.hpp"

namespace ephs {

/// Symbol naming for port variables inside component expressions. For
/// one-dimensional ports the plain "port.x" / "port.e" form is used; wider
/// ports get a slot suffix ("port.x.2").
std::string state_symbol(const Name& port, std::size_t slot, std::size_t dim);
std::string effort_symbol(const Name& port, std::size_t slot, std::size_t dim);

/// The reference temperature is available in component expressions under
/// this symbol.
inline constexpr const char* kTheta0Symbol = "theta0";

/// Matrix of expressions, row-major.
struct ExprMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Expr> entries;

    static ExprMatrix zero(std::size_t rows, std::size_t cols);

    const Expr& at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
    Expr& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }

    /// Evaluates every entry; result is row-major.
    std::vector<double> eval(const Bindings& bindings) const;

    bool operator==(const ExprMatrix&) const = default;
};

/// Energy storage: an interface of power ports and an energy function over
/// the port state symbols.
struct StorageComponent {
    Interface iface;
    Expr energy;

    bool operator==(const StorageComponent&) const = default;
};

/// Energy exchange with the reference environment: a subinterface of the
/// environment's interface. Efforts are identically zero.
struct EnvironmentComponent {
    Interface iface;

    bool operator==(const EnvironmentComponent&) const = default;
};

/// Reversible energy exchange in constrained hybrid input-output form. The
/// power ports are split into an ordered gyrator factor (x1) and transformer
/// factor (x2); any of the three blocks may be absent (zero).
struct ReversibleComponent {
    Interface iface;
    std::vector<Name> x1; // ordered power ports of the first factor
    std::vector<Name> x2; // ordered power ports of the second factor
    std::optional<ExprMatrix> gyrator;     // square on x1 slots, skew-symmetric
    std::optional<ExprMatrix> transformer; // x1 slots x x2 slots
    std::optional<ExprMatrix> constraint;  // multiplier dim x x1 slots

    std::size_t constraint_dim() const { return constraint ? constraint->rows : 0; }

    bool operator==(const ReversibleComponent&) const = default;
};

/// Irreversible energy exchange: flows are M(e) e / theta0 with M symmetric
/// non-negative definite over the power-port effort slots (namespace order).
struct IrreversibleComponent {
    Interface iface;
    ExprMatrix onsager;

    bool operator==(const IrreversibleComponent&) const = default;
};

/// Structural checks run at construction time by the model layer.
void check_storage_structure(const std::string& name, const StorageComponent& c,
                             const QuantityRegistry& registry);
void check_environment_structure(const std::string& name, const EnvironmentComponent& c,
                                 const ReferenceEnvironment& env);
void check_reversible_structure(const std::string& name, const ReversibleComponent& c,
                                const QuantityRegistry& registry);
void check_irreversible_structure(const std::string& name, const IrreversibleComponent& c,
                                  const QuantityRegistry& registry);

/// Exergy storage function: the energy minus, for every port whose quantity
/// the environment carries, the reference intensive value paired with the
/// port state.
Expr exergy_from_energy(const StorageComponent& c, const ReferenceEnvironment& env);

/// Effort covector of a storage component at state `x` (layout order):
/// the gradient of the exergy function. Flows are the state derivatives,
/// consumed by the assembler.
std::vector<double> storage_efforts(const StorageComponent& c,
                                    const ReferenceEnvironment& env,
                                    const QuantityRegistry& registry,
                                    std::span<const double> x);

/// Ordered state symbols of a storage component (layout order).
std::vector<std::string> storage_state_symbols(const StorageComponent& c,
                                               const QuantityRegistry& registry);

/// Efforts of an environment component: identically zero.
std::vector<double> environment_efforts(const EnvironmentComponent& c,
                                        const QuantityRegistry& registry);

/// Output of the reversible block system
///   f1 = L(x) e1 - g(x) f2 + C*(x) lambda_c
///   e2 = g*(x) e1
///   residual = -C(x) e1
struct ReversibleFlows {
    std::vector<double> x1_flows;
    std::vector<double> x2_efforts;
    std::vector<double> constraint_residual;
};

ReversibleFlows reversible_flows(const ReversibleComponent& c, std::span<const double> e1,
                                 std::span<const double> f2,
                                 std::span<const double> lambda_c,
                                 const Bindings& bindings);

/// f = M(e) e / theta0 over the power slots.
std::vector<double> irreversible_flows(const IrreversibleComponent& c,
                                       std::span<const double> efforts,
                                       const Bindings& extra_bindings, double theta0);

/// One violated consistency condition with a witness.
struct Violation {
    std::string condition;
    std::string detail;
};

struct ValidationReport {
    std::string component;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has_condition(const std::string& condition) const;
    std::string to_string() const;
};

/// Sampling policy for the validators: `samples` quasi-random points inside
/// per-symbol box bounds (plus the origin and unit basis points). Entropy
/// effort slots are kept above -theta0 + 1 so absolute temperatures stay
/// positive.
struct ValidatorConfig {
    int samples = 64;
    std::uint64_t seed = 0;
    double default_lo = -2.0;
    double default_hi = 2.0;
    std::map<std::string, std::pair<double, double>> bounds; // per symbol
};

/// Checks skew-symmetry of the gyrator block, conservation of every
/// reference-environment quantity, and the time-reversal parity rules.
ValidationReport validate_reversible(const std::string& name, const ReversibleComponent& c,
                                     const ReferenceEnvironment& env,
                                     const QuantityRegistry& registry,
                                     const ValidatorConfig& config = {});

/// Checks symmetry, non-negative definiteness, energy conservation,
/// conservation of non-entropy environment quantities, and the
/// anti-time-reversal parity rule.
ValidationReport validate_irreversible(const std::string& name,
                                       const IrreversibleComponent& c,
                                       const ReferenceEnvironment& env,
                                       const QuantityRegistry& registry,
                                       const ValidatorConfig& config = {});

} // namespace ephs
