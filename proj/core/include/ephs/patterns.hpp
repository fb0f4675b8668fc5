#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "ephs/interfaces.hpp"

namespace ephs {

/// A port of the combined interface of a pattern: inner ports are addressed
/// as box-path * port-name, outer ports by their bare name.
struct PortRef {
    enum class Side { Inner, Outer };

    Side side = Side::Inner;
    Name name;

    std::string str() const { return name.str(); }

    bool operator==(const PortRef&) const = default;
    auto operator<=>(const PortRef& other) const
    {
        if (auto c = name <=> other.name; c != 0)
            return c;
        return side <=> other.side;
    }
};

inline PortRef inner_port(Name n) { return {PortRef::Side::Inner, std::move(n)}; }
inline PortRef outer_port(Name n) { return {PortRef::Side::Outer, std::move(n)}; }

/// One block of the junction partition; members are kept sorted.
struct Junction {
    std::vector<PortRef> members;

    /// Stable identifier: the lexicographically smallest member port name.
    std::string id() const;

    bool operator==(const Junction&) const = default;
};

class PatternError : public Error {
public:
    using Error::Error;
};

class UnknownBoxError : public Error {
public:
    explicit UnknownBoxError(const Name& box)
        : Error("pattern has no inner box named '" + box.str() + "'"), box(box)
    {
    }
    Name box;
};

class InterfaceMismatchError : public Error {
public:
    using Error::Error;
};

/// Inner interfaces, outer interface, and a junction partition of the
/// combined port namespace. Valid by construction: the partition covers all
/// ports, each junction has at least one inner port, at most one outer port,
/// and a uniform quantity.
class InterconnectionPattern {
public:
    InterconnectionPattern() = default;

    /// Validates the partition invariants; throws PatternError with the
    /// violated condition otherwise.
    static InterconnectionPattern validated(Package<Interface> inner, Interface outer,
                                            std::vector<Junction> junctions);

    const Package<Interface>& inner() const { return inner_; }
    const Interface& outer() const { return outer_; }
    const std::vector<Junction>& junctions() const { return junctions_; }

    /// Named sum of the inner interfaces.
    Interface inner_interface() const { return sum_interfaces(inner_); }

    /// Attributes of a member port.
    const PortAttr& attr_of(const PortRef& ref) const;

    bool operator==(const InterconnectionPattern&) const = default;

private:
    Package<Interface> inner_;
    Interface outer_;
    std::vector<Junction> junctions_; // canonical order
};

/// Substitutes `guest` into inner box `box` of `host`. The guest's outer
/// interface must match the box interface port-for-port under `renaming`
/// (identity when empty): guest inner boxes are grafted under the box name
/// and the junction pair assigned to each boundary port is merged.
InterconnectionPattern substitute(const InterconnectionPattern& host, const Name& box,
                                  const InterconnectionPattern& guest,
                                  const std::map<Name, Name>& renaming = {});

/// Per-junction equation system: shared state, equal efforts over power
/// ports, and net-flow balance with inner ports on the left and outer ports
/// on the right.
struct JunctionEquations {
    std::string id;
    Quantity quantity;
    std::vector<PortRef> all_members;
    std::vector<PortRef> inner_power;
    std::vector<PortRef> outer_power;
    std::vector<PortRef> state_only; // members that are state ports
};

struct JunctionRelation {
    std::vector<JunctionEquations> junctions;
};

JunctionRelation junction_relation(const InterconnectionPattern& pattern);

/// Port-variable assignment for relation membership tests: state always,
/// flow/effort for power ports.
struct PortVars {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> e;
};

using PortAssignment = std::map<PortRef, PortVars>;

/// True iff the assignment satisfies equality of state, equality of effort,
/// and equality of net flow at every junction, within `tol`.
bool satisfies(const JunctionRelation& relation, const PortAssignment& vars,
               double tol = 1e-9);

/// Graphviz export: boxes as circle nodes, junctions as point nodes,
/// state-port edges dashed.
std::string to_dot(const InterconnectionPattern& pattern, const std::string& title);

} // namespace ephs
