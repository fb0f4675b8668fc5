#include "ephs/systems.hpp"

#include <algorithm>
#include <sstream>

namespace ephs {

const Interface& interface_of(const PrimitiveComponent& c)
{
    return std::visit([](const auto& v) -> const Interface& { return v.iface; }, c);
}

const char* class_name(const PrimitiveComponent& c)
{
    switch (c.index()) {
    case 0: return "storage";
    case 1: return "environment";
    case 2: return "reversible";
    default: return "irreversible";
    }
}

InterconnectionPattern CompositeSystem::pattern() const
{
    std::vector<std::pair<Name, Interface>> entries;
    for (std::size_t i = 0; i < subsystems.size(); ++i)
        entries.emplace_back(subsystems.name_at(i), subsystems.value_at(i).interface());
    return InterconnectionPattern::validated(Package<Interface>::make(std::move(entries)),
                                             outer, junctions);
}

bool CompositeSystem::operator==(const CompositeSystem& other) const
{
    return outer == other.outer && subsystems == other.subsystems &&
           junctions == other.junctions;
}

const Interface& System::interface() const
{
    if (is_composite())
        return composite().outer;
    return interface_of(primitive());
}

bool System::operator==(const System& other) const
{
    if (is_composite() != other.is_composite())
        return false;
    if (is_composite())
        return composite() == other.composite();
    return primitive() == other.primitive();
}

InterconnectionPattern FlattenedSystem::pattern() const
{
    std::vector<std::pair<Name, Interface>> entries;
    for (std::size_t i = 0; i < components.size(); ++i)
        entries.emplace_back(components.name_at(i), interface_of(components.value_at(i)));
    return InterconnectionPattern::validated(Package<Interface>::make(std::move(entries)),
                                             outer, junctions);
}

std::pair<std::size_t, Name> FlattenedSystem::resolve(const Name& inner_port_name) const
{
    for (std::size_t i = 0; i < components.size(); ++i) {
        const Name& path = components.name_at(i);
        if (is_prefix(path, inner_port_name, /*strict=*/true)) {
            std::vector<std::string> rest(inner_port_name.segments().begin() + path.size(),
                                          inner_port_name.segments().end());
            Name port(rest);
            if (interface_of(components.value_at(i)).find(port) != nullptr)
                return {i, port};
        }
    }
    throw Error("flattened system: no component port named '" + inner_port_name.str() +
                "'");
}

FlattenedSystem flatten(const System& sys)
{
    if (!sys.is_composite()) {
        // A lone component exposes all of its ports one-to-one.
        const PrimitiveComponent& comp = sys.primitive();
        const Interface& iface = interface_of(comp);
        FlattenedSystem flat;
        flat.components = Package<PrimitiveComponent>::make({{Name{}, comp}});
        flat.outer = iface;
        for (std::size_t i = 0; i < iface.size(); ++i)
            flat.junctions.push_back(
                Junction{{inner_port(iface.name_at(i)), outer_port(iface.name_at(i))}});
        return flat;
    }

    const CompositeSystem& cs = sys.composite();
    InterconnectionPattern pattern = cs.pattern();
    std::vector<std::pair<Name, PrimitiveComponent>> components;
    for (std::size_t i = 0; i < cs.subsystems.size(); ++i) {
        const Name& box = cs.subsystems.name_at(i);
        FlattenedSystem child = flatten(cs.subsystems.value_at(i));
        pattern = substitute(pattern, box, child.pattern());
        for (std::size_t k = 0; k < child.components.size(); ++k)
            components.emplace_back(concat(box, child.components.name_at(k)),
                                    child.components.value_at(k));
    }

    FlattenedSystem flat;
    flat.components = Package<PrimitiveComponent>::make(std::move(components));
    flat.outer = pattern.outer();
    flat.junctions = pattern.junctions();
    return flat;
}

LintReport check_wellformed(const FlattenedSystem& flat)
{
    LintReport report;
    const Interface inner = sum_interfaces([&] {
        std::vector<std::pair<Name, Interface>> entries;
        for (std::size_t i = 0; i < flat.components.size(); ++i)
            entries.emplace_back(flat.components.name_at(i),
                                 interface_of(flat.components.value_at(i)));
        return Package<Interface>::make(std::move(entries));
    }());

    for (const auto& j : flat.junctions) {
        std::size_t storage_like = 0;
        std::size_t power_ports = 0;
        bool displacement = false;
        for (const auto& m : j.members) {
            const PortAttr& attr = m.side == PortRef::Side::Inner ? inner.at(m.name)
                                                                  : flat.outer.at(m.name);
            if (attr.kind == PortKind::Power) {
                ++power_ports;
                if (attr.quantity.label == "displacement")
                    displacement = true;
            }
            if (m.side == PortRef::Side::Inner) {
                auto [ci, port] = flat.resolve(m.name);
                const PrimitiveComponent& comp = flat.components.value_at(ci);
                if (std::holds_alternative<StorageComponent>(comp) ||
                    std::holds_alternative<EnvironmentComponent>(comp))
                    ++storage_like;
            }
        }
        if (storage_like > 1)
            report.errors.push_back("junction '" + j.id() + "': " +
                                    std::to_string(storage_like) +
                                    " storage/environment ports connected (at most one)");
        if (displacement && power_ports > 2)
            report.warnings.push_back(
                "junction '" + j.id() + "': " + std::to_string(power_ports) +
                " displacement power ports connected (velocities don't balance)");
    }
    return report;
}

namespace {

std::string matrix_str(const ExprMatrix& m)
{
    std::string out = "[";
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (i > 0)
            out += ", ";
        out += "[";
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j > 0)
                out += ", ";
            out += m.at(i, j).str();
        }
        out += "]";
    }
    return out + "]";
}

std::string port_list(const std::vector<Name>& ports)
{
    std::string out;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += ports[i].str();
    }
    return out;
}

} // namespace

std::string equation_listing(const FlattenedSystem& flat, const ReferenceEnvironment& env)
{
    std::ostringstream out;
    out << "components: " << flat.components.size() << "\n";
    for (std::size_t i = 0; i < flat.components.size(); ++i) {
        const Name& path = flat.components.name_at(i);
        const PrimitiveComponent& comp = flat.components.value_at(i);
        out << "  " << path.str() << " : " << class_name(comp) << "\n";
        const Interface& iface = interface_of(comp);
        out << "    ports:";
        for (std::size_t p = 0; p < iface.size(); ++p)
            out << " " << iface.name_at(p).str() << "("
                << iface.value_at(p).quantity.label
                << (iface.value_at(p).kind == PortKind::Power ? ", power)" : ", state)");
        out << "\n";
        if (const auto* s = std::get_if<StorageComponent>(&comp)) {
            out << "    exergy H = " << exergy_from_energy(*s, env).str() << "\n";
            for (std::size_t p = 0; p < iface.size(); ++p) {
                std::string port = concat(path, iface.name_at(p)).str();
                out << "    d(" << port << ".x)/dt = " << port << ".f\n";
                out << "    " << port << ".e = dH/d(" << iface.name_at(p).str() << ".x)\n";
            }
        } else if (std::get_if<EnvironmentComponent>(&comp)) {
            for (std::size_t p = 0; p < iface.size(); ++p) {
                std::string port = concat(path, iface.name_at(p)).str();
                out << "    d(" << port << ".x)/dt = " << port << ".f\n";
                out << "    " << port << ".e = 0\n";
            }
        } else if (const auto* r = std::get_if<ReversibleComponent>(&comp)) {
            out << "    factors: x1 = {" << port_list(r->x1) << "}, x2 = {"
                << port_list(r->x2) << "}\n";
            if (r->gyrator)
                out << "    f1 = L e1 with L = " << matrix_str(*r->gyrator) << "\n";
            if (r->transformer)
                out << "    f1 += -g f2, e2 = g* e1 with g = "
                    << matrix_str(*r->transformer) << "\n";
            if (r->constraint)
                out << "    0 = -C e1 with C = " << matrix_str(*r->constraint) << "\n";
        } else if (const auto* irr = std::get_if<IrreversibleComponent>(&comp)) {
            out << "    f = M(e) e / theta0 with M = " << matrix_str(irr->onsager) << "\n";
        }
    }

    const Interface inner = [&] {
        std::vector<std::pair<Name, Interface>> entries;
        for (std::size_t i = 0; i < flat.components.size(); ++i)
            entries.emplace_back(flat.components.name_at(i),
                                 interface_of(flat.components.value_at(i)));
        return sum_interfaces(Package<Interface>::make(std::move(entries)));
    }();

    out << "junctions: " << flat.junctions.size() << "\n";
    for (const auto& j : flat.junctions) {
        out << "  junction '" << j.id() << "'\n";
        std::vector<std::string> state_ports;
        std::vector<std::string> inner_power;
        std::vector<std::string> outer_power;
        std::string quantity;
        for (const auto& m : j.members) {
            const PortAttr& attr = m.side == PortRef::Side::Inner ? inner.at(m.name)
                                                                  : flat.outer.at(m.name);
            quantity = attr.quantity.label;
            if (attr.kind == PortKind::State)
                state_ports.push_back(m.str());
            else if (m.side == PortRef::Side::Inner)
                inner_power.push_back(m.str());
            else
                outer_power.push_back(m.str());
        }
        out << "    quantity: " << quantity << "\n";
        // Equality of state over all members.
        const std::string& anchor = j.members.front().str();
        for (std::size_t k = 1; k < j.members.size(); ++k)
            out << "    " << anchor << ".x = " << j.members[k].str() << ".x\n";
        // Equality of effort over power ports.
        std::vector<std::string> power = inner_power;
        power.insert(power.end(), outer_power.begin(), outer_power.end());
        for (std::size_t k = 1; k < power.size(); ++k)
            out << "    " << power.front() << ".e = " << power[k] << ".e\n";
        // Net flow balance: inner left, outer right.
        if (!power.empty()) {
            out << "    ";
            if (inner_power.empty())
                out << "0";
            for (std::size_t k = 0; k < inner_power.size(); ++k)
                out << (k ? " + " : "") << inner_power[k] << ".f";
            out << " = ";
            if (outer_power.empty())
                out << "0";
            for (std::size_t k = 0; k < outer_power.size(); ++k)
                out << (k ? " + " : "") << outer_power[k] << ".f";
            out << "\n";
        }
    }
    return out.str();
}

} // namespace ephs
