#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ephs/names.hpp"
#include "ephs/quantities.hpp"

namespace ephs {

/// Whether a port exchanges power (flow/effort pair) or only state.
enum class PortKind { Power, State };

struct PortAttr {
    Quantity quantity;
    PortKind kind = PortKind::Power;

    bool operator==(const PortAttr&) const = default;
};

/// An interface is a package of port attributes.
using Interface = Package<PortAttr>;

/// Named sum of interfaces: ports of each part under its box name.
Interface sum_interfaces(const Package<Interface>& parts);

/// True iff every port of `a` appears in `b` with identical attributes.
bool is_subinterface(const Interface& a, const Interface& b);

/// The reference environment's interface (all power ports).
Interface environment_interface(const ReferenceEnvironment& env);

/// Slices of one port into the flat state vector x (all ports) and the flat
/// flow/effort vectors f, e (power ports only).
struct PortSlice {
    std::size_t state_offset = 0;
    std::size_t dim = 0;
    std::optional<std::size_t> power_offset; // set iff the port is a power port
};

/// Coordinatization of an interface's bundle of port variables: contiguous
/// slices in namespace order with no overlap.
struct PortLayout {
    std::vector<PortSlice> ports; // aligned with the interface's namespace
    std::size_t state_dim = 0;
    std::size_t power_dim = 0; // dim f == dim e
};

/// Builds the layout; every quantity must be registered.
PortLayout build_layout(const Interface& iface, const QuantityRegistry& registry);

} // namespace ephs
