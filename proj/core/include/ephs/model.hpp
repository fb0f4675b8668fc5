#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ephs/systems.hpp"

namespace ephs {

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": " + message),
          line(line),
          column(column)
    {
    }
    std::size_t line;
    std::size_t column;
};

/// A box declaration inside a pattern: either a reference to a named entity
/// (interface, component, or system) or an inline interface.
struct BoxDecl {
    Name box;
    std::variant<std::string, Interface> ref;

    bool operator==(const BoxDecl&) const = default;
};

struct PatternDef {
    std::string name;
    std::vector<BoxDecl> boxes;
    Interface outer;
    std::vector<std::vector<Name>> junction_texts; // port references as written
    InterconnectionPattern pattern;                // resolved

    bool operator==(const PatternDef&) const = default;
};

struct SystemDef {
    std::string name;
    std::string pattern;
    std::vector<std::pair<Name, std::string>> fillings; // box -> entity name
    System system;                                      // resolved

    bool operator==(const SystemDef&) const = default;
};

struct SimulationConfig {
    std::string system;
    std::string name; // optional label; empty = default
    double t_end = 1.0;
    double dt = 1e-3;
    std::vector<std::pair<std::string, double>> init;
    std::vector<SignalBinding> inputs;

    bool operator==(const SimulationConfig&) const = default;
};

/// A parsed model file: quantity declarations, environment, component and
/// pattern definitions, systems, and simulation configs. Every name resolves
/// and definitions are unique; definition precedes use.
struct ModelDocument {
    QuantityRegistry registry;        // builtins plus declared quantities
    std::vector<Quantity> declared_quantities;
    ReferenceEnvironment environment; // standard unless overridden
    bool environment_overridden = false;

    std::vector<std::pair<std::string, Interface>> interfaces;
    std::vector<std::pair<std::string, PrimitiveComponent>> components;
    std::vector<PatternDef> patterns;
    std::vector<SystemDef> systems;
    std::vector<SimulationConfig> simulations;

    /// Declaration order, so printing keeps definitions before uses.
    enum class DeclKind { Quantity, Environment, Interface, Component, Pattern, System,
                          Simulation };
    std::vector<std::pair<DeclKind, std::size_t>> declaration_order;

    const Interface* find_interface(const std::string& name) const;
    const PrimitiveComponent* find_component(const std::string& name) const;
    const PatternDef* find_pattern(const std::string& name) const;
    const SystemDef* find_system(const std::string& name) const;

    /// First config for `system`, or the one labeled `config`.
    const SimulationConfig* find_simulation(const std::string& system,
                                            const std::string& config = "") const;
};

ModelDocument parse_model(std::string_view text);

/// Canonical rendering; parse(pretty_print(doc)) reproduces the document.
std::string pretty_print(const ModelDocument& doc);

bool documents_equal(const ModelDocument& a, const ModelDocument& b);

} // namespace ephs
