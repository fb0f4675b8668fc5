#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ephs/names.hpp"

namespace ephs {

/// Real coordinate space of a fixed dimension.
struct StateSpace {
    int dimension = 1;

    bool operator==(const StateSpace&) const = default;
};

/// A physical quantity: label, state space, and parity under time reversal
/// (+1 even, -1 odd). Identity is (label, space).
struct Quantity {
    std::string label;
    StateSpace space{1};
    int parity = +1;

    int dim() const { return space.dimension; }

    friend bool operator==(const Quantity& a, const Quantity& b)
    {
        return a.label == b.label && a.space == b.space;
    }
};

inline constexpr const char* kEntropyLabel = "entropy";

class UnknownQuantityError : public Error {
public:
    explicit UnknownQuantityError(const std::string& label)
        : Error("unknown quantity '" + label + "'"), label(label)
    {
    }
    std::string label;
};

/// The bundle of quantities known to a model. Labels are unique.
class QuantityRegistry {
public:
    /// Standard quantities with their time-reversal parities:
    /// displacement(+1), momentum(-1), entropy(+1), volume(+1), charge(+1),
    /// flux_linkage(-1), angular_momentum(-1), mass(+1); all one-dimensional.
    static QuantityRegistry builtin();

    /// Registry without any quantities (useful for tests).
    static QuantityRegistry empty() { return QuantityRegistry{}; }

    void add(Quantity q);
    const Quantity* find(const std::string& label) const;
    const Quantity& get(const std::string& label) const; // throws UnknownQuantityError
    bool contains(const Quantity& q) const;

    const std::vector<Quantity>& quantities() const { return quantities_; }

private:
    std::vector<Quantity> quantities_;
};

class UnknownRefPortError : public Error {
public:
    explicit UnknownRefPortError(const Name& port)
        : Error("reference environment has no port named '" + port.str() + "'"),
          port(port)
    {
    }
    Name port;
};

/// One energy domain of the reference environment: a power port with a
/// one-dimensional extensive quantity and the fixed value of its
/// energy-conjugate intensive quantity.
struct EnvironmentPort {
    Quantity quantity;
    double intensive_value = 0.0;

    bool operator==(const EnvironmentPort&) const = default;
};

/// The exergy reference environment. Quantities are unique across ports and
/// an entropy port with positive reference temperature is always present.
class ReferenceEnvironment {
public:
    /// Entropy at 298.15 K and volume at -101325 Pa.
    static ReferenceEnvironment standard();

    /// Validates the invariants (1-d quantities, uniqueness, entropy port
    /// with positive value).
    static ReferenceEnvironment of(Package<EnvironmentPort> ports);

    const Package<EnvironmentPort>& ports() const { return ports_; }

    /// Reference temperature (the entropy port's intensive value).
    double theta0() const;

    /// Intensive value of the unique environment port carrying `quantity`,
    /// or zero if the environment has no such domain.
    double lambda_of(const Quantity& quantity) const;

    /// Variant referencing a specific environment port: that port's value if
    /// its quantity matches, zero otherwise. Throws UnknownRefPortError if no
    /// port has that name.
    double lambda_of(const Quantity& quantity, const Name& ref_port) const;

    bool operator==(const ReferenceEnvironment&) const = default;

private:
    Package<EnvironmentPort> ports_;
};

} // namespace ephs
