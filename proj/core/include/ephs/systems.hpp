#pragma once

#include <memory>
#include <variant>

#include "ephs/components.hpp"
#include "ephs/patterns.hpp"

namespace ephs {

using PrimitiveComponent = std::variant<StorageComponent, EnvironmentComponent,
                                        ReversibleComponent, IrreversibleComponent>;

const Interface& interface_of(const PrimitiveComponent& c);
const char* class_name(const PrimitiveComponent& c);

class System;

/// A composite system: an outer interface, a package of subsystems, and a
/// junction partition whose underlying interconnection pattern is valid.
struct CompositeSystem {
    Interface outer;
    Package<System> subsystems;
    std::vector<Junction> junctions;

    /// The underlying interconnection pattern (validates on construction).
    InterconnectionPattern pattern() const;

    bool operator==(const CompositeSystem&) const;
};

/// A system is a primitive component or a composite system.
class System {
public:
    System() : value_(PrimitiveComponent{StorageComponent{}}) {}
    System(StorageComponent c) : value_(PrimitiveComponent{std::move(c)}) {}
    System(EnvironmentComponent c) : value_(PrimitiveComponent{std::move(c)}) {}
    System(ReversibleComponent c) : value_(PrimitiveComponent{std::move(c)}) {}
    System(IrreversibleComponent c) : value_(PrimitiveComponent{std::move(c)}) {}
    System(PrimitiveComponent c) : value_(std::move(c)) {}
    System(CompositeSystem c)
        : value_(std::make_shared<const CompositeSystem>(std::move(c)))
    {
    }

    bool is_composite() const
    {
        return std::holds_alternative<std::shared_ptr<const CompositeSystem>>(value_);
    }
    const CompositeSystem& composite() const
    {
        return *std::get<std::shared_ptr<const CompositeSystem>>(value_);
    }
    const PrimitiveComponent& primitive() const
    {
        return std::get<PrimitiveComponent>(value_);
    }

    const Interface& interface() const;

    bool operator==(const System& other) const;

private:
    std::variant<PrimitiveComponent, std::shared_ptr<const CompositeSystem>> value_;
};

/// Result of recursive flattening: primitive components under hierarchical
/// names and the merged junction structure.
struct FlattenedSystem {
    Package<PrimitiveComponent> components;
    Interface outer;
    std::vector<Junction> junctions;

    /// View as a pattern whose inner boxes are the component paths.
    InterconnectionPattern pattern() const;

    /// Resolves an inner port reference to (component index, local port name).
    std::pair<std::size_t, Name> resolve(const Name& inner_port_name) const;
};

FlattenedSystem flatten(const System& sys);

struct LintReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Junction well-formedness lints: at most one storage/environment port per
/// junction (error); more than two displacement-like power ports at one
/// junction (warning, velocities don't balance).
LintReport check_wellformed(const FlattenedSystem& flat);

/// Human-readable listing of the implicit equation system: one line per
/// junction equation and per component relation, using hierarchical names.
std::string equation_listing(const FlattenedSystem& flat, const ReferenceEnvironment& env);

/// Binding of one outer power port variable to a time signal (an expression
/// in `t`). An unbound outer power port defaults to zero flow.
struct SignalBinding {
    enum class Slot { Effort, Flow };
    Name port;
    Slot slot = Slot::Effort;
    Expr signal;

    bool operator==(const SignalBinding&) const = default;
};

/// An explicit evaluation plan for the simulable subclass: pure-gyrator
/// reversible components and a unique effort source per junction. States are
/// storage states plus one merged state per environment quantity.
class AssembledModel {
public:
    static AssembledModel build(FlattenedSystem flat, ReferenceEnvironment env,
                                QuantityRegistry registry,
                                std::vector<SignalBinding> inputs);

    std::size_t state_dim() const { return state_names_.size(); }
    const std::vector<std::string>& state_names() const { return state_names_; }

    /// Dense initial state from named values; unnamed slots start at zero.
    std::vector<double> initial_state(const std::map<std::string, double>& init) const;

    struct Derivative {
        std::vector<double> xdot;
        double max_power_residual = 0.0;
        double supplied_exergy_rate = 0.0; // sum over outer ports of <e|f>
        double supplied_energy_rate = 0.0; // sum of <e + lambda|f>
        double entropy_inflow_rate = 0.0;  // net entropy flow through outer ports
        std::vector<double> outer_values;  // unbound partners, see outer_value_names()
    };
    Derivative rhs(double t, std::span<const double> x) const;

    double total_energy(std::span<const double> x) const;
    double total_exergy(std::span<const double> x) const;
    double total_entropy(std::span<const double> x) const;
    bool entropy_slot(std::size_t i) const { return state_entropy_[i]; }

    const std::vector<std::string>& outer_value_names() const { return outer_value_names_; }
    const ReferenceEnvironment& environment() const { return env_; }
    const FlattenedSystem& flattened() const { return flat_; }

private:
    AssembledModel() = default;

    struct StoragePlan {
        std::size_t comp = 0;
        Expr exergy;
        Expr energy;
        std::vector<std::string> symbols;       // per local slot
        std::vector<std::size_t> global_state;  // per local slot
    };
    struct WiredSymbol {
        std::string symbol;
        std::size_t junction = 0;
        std::size_t slot = 0;
    };
    struct PortWire {
        std::size_t junction = 0; // all slots of the port, in order
    };
    struct ReversiblePlan {
        std::size_t comp = 0;
        std::vector<WiredSymbol> state_symbols;
        std::vector<PortWire> x1_ports; // aligned with the component's x1 list
        std::vector<std::size_t> x1_port_dims;
    };
    struct IrreversiblePlan {
        std::size_t comp = 0;
        std::vector<WiredSymbol> state_symbols;
        std::vector<PortWire> power_ports; // namespace order
        std::vector<std::size_t> power_port_dims;
    };
    struct OuterPlan {
        Name port;
        std::size_t junction = 0;
        std::size_t dim = 0;
        double lambda = 0.0;
        bool entropy = false;
        bool effort_bound = false;
        Expr signal; // bound variable signal (flow defaults to 0)
    };
    struct JunctionPlan {
        std::string id;
        std::size_t dim = 0;
        std::vector<std::size_t> state_slots; // empty if no state source
        enum class Effort { Storage, Environment, Signal, None };
        Effort effort = Effort::None;
        std::size_t storage_plan = 0;
        std::size_t storage_offset = 0;
        std::size_t outer_plan = 0; // valid iff has_outer
        bool has_outer = false;
        std::vector<std::size_t> sink_state_slots; // empty if no sink
    };
    struct OuterStatePlan {
        Name port;
        std::size_t junction = 0;
    };

    FlattenedSystem flat_;
    ReferenceEnvironment env_;
    QuantityRegistry registry_;
    std::vector<std::string> state_names_;
    std::vector<double> state_lambda_;  // per state slot: environment intensive value
    std::vector<bool> state_entropy_;   // per state slot: carries entropy
    std::vector<StoragePlan> storage_;
    std::vector<ReversiblePlan> reversible_;
    std::vector<IrreversiblePlan> irreversible_;
    std::vector<OuterPlan> outer_;
    std::vector<OuterStatePlan> outer_state_;
    std::vector<JunctionPlan> junctions_;
    std::vector<std::string> outer_value_names_;
};

/// Fixed-step classical Runge-Kutta trajectory with per-step diagnostics
/// evaluated at the step's start state.
struct Trajectory {
    std::vector<double> t;
    std::vector<std::string> state_names;
    std::vector<std::vector<double>> states;
    std::vector<double> energy;
    std::vector<double> exergy;
    std::vector<double> entropy_production_rate;
    std::vector<double> max_power_residual;
    std::vector<double> supplied_energy; // cumulative
    std::vector<double> supplied_exergy; // cumulative
    std::vector<double> entropy_inflow;  // cumulative
    std::vector<std::string> outer_names;
    std::vector<std::vector<double>> outer_values;
};

Trajectory simulate(const AssembledModel& model, double t_end, double dt,
                    std::span<const double> x0);

/// CSV per the trajectory format: header
/// t,<state names...>,E_total,H_total,S_prod_rate,max_power_residual
std::string to_csv(const Trajectory& trajectory);

struct AuditReport {
    double max_power_residual = 0.0;
    double energy_drift_rel = 0.0;         // |E(t) - E(0) - supplied| / (1 + |E(0)|)
    double exergy_balance_max = 0.0;       // |H(t) - H(0) - supplied + destroyed|
    double min_entropy_production_rate = 0.0;

    std::string to_string() const;
};

AuditReport audit(const AssembledModel& model, const Trajectory& trajectory);

} // namespace ephs
