#include <cstdio>
#include <sstream>

#include "ephs/model.hpp"

namespace ephs {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_attr_ports(std::ostringstream& out, const Interface& iface,
                      const std::string& indent)
{
    out << indent << "ports {\n";
    for (std::size_t i = 0; i < iface.size(); ++i) {
        const PortAttr& attr = iface.value_at(i);
        out << indent << "  " << iface.name_at(i).str() << " : " << attr.quantity.label
            << (attr.kind == PortKind::Power ? " power" : " state") << "\n";
    }
    out << indent << "}\n";
}

void print_matrix(std::ostringstream& out, const ExprMatrix& m)
{
    out << "[";
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (i > 0)
            out << ", ";
        out << "[";
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j > 0)
                out << ", ";
            out << m.at(i, j).str();
        }
        out << "]";
    }
    out << "]";
}

} // namespace

std::string pretty_print(const ModelDocument& doc)
{
    std::ostringstream out;
    auto print_quantity = [&](const Quantity& q) {
        out << "quantity " << q.label << " dim " << q.dim() << " parity "
            << (q.parity > 0 ? "+1" : "-1") << "\n";
    };
    auto print_environment = [&]() {
        out << "environment {\n";
        const auto& ports = doc.environment.ports();
        for (std::size_t i = 0; i < ports.size(); ++i)
            out << "  port " << ports.name_at(i).str() << " quantity "
                << ports.value_at(i).quantity.label << " value "
                << fmt(ports.value_at(i).intensive_value) << "\n";
        out << "}\n";
    };
    auto print_interface = [&](const std::string& name, const Interface& iface) {
        out << "interface " << name << " {\n";
        print_attr_ports(out, iface, "  ");
        out << "}\n";
    };
    auto print_component = [&](const std::string& name, const PrimitiveComponent& comp) {
        if (const auto* s = std::get_if<StorageComponent>(&comp)) {
            out << "storage " << name << " {\n";
            print_attr_ports(out, s->iface, "  ");
            out << "  energy " << s->energy.str() << "\n}\n";
        } else if (const auto* e = std::get_if<EnvironmentComponent>(&comp)) {
            out << "environment_component " << name << " {\n  ports {";
            for (std::size_t i = 0; i < e->iface.size(); ++i)
                out << (i ? ", " : " ") << e->iface.name_at(i).str();
            out << " }\n}\n";
        } else if (const auto* r = std::get_if<ReversibleComponent>(&comp)) {
            out << "reversible " << name << " {\n";
            print_attr_ports(out, r->iface, "  ");
            out << "  x1 {";
            for (std::size_t i = 0; i < r->x1.size(); ++i)
                out << (i ? ", " : " ") << r->x1[i].str();
            out << " }\n";
            if (!r->x2.empty()) {
                out << "  x2 {";
                for (std::size_t i = 0; i < r->x2.size(); ++i)
                    out << (i ? ", " : " ") << r->x2[i].str();
                out << " }\n";
            }
            if (r->gyrator) {
                out << "  L ";
                print_matrix(out, *r->gyrator);
                out << "\n";
            }
            if (r->transformer) {
                out << "  g ";
                print_matrix(out, *r->transformer);
                out << "\n";
            }
            if (r->constraint) {
                out << "  C ";
                print_matrix(out, *r->constraint);
                out << "\n";
            }
            out << "}\n";
        } else if (const auto* irr = std::get_if<IrreversibleComponent>(&comp)) {
            out << "irreversible " << name << " {\n";
            print_attr_ports(out, irr->iface, "  ");
            out << "  M ";
            print_matrix(out, irr->onsager);
            out << "\n}\n";
        }
    };
    auto print_pattern = [&](const PatternDef& def) {
        out << "pattern " << def.name << " {\n";
        for (const BoxDecl& box : def.boxes) {
            out << "  box " << box.box.str() << " : ";
            if (const auto* ref = std::get_if<std::string>(&box.ref)) {
                out << *ref << "\n";
            } else {
                out << "interface {\n";
                print_attr_ports(out, std::get<Interface>(box.ref), "    ");
                out << "  }\n";
            }
        }
        out << "  outer {";
        for (std::size_t i = 0; i < def.outer.size(); ++i) {
            const PortAttr& attr = def.outer.value_at(i);
            out << (i ? ", " : " ") << def.outer.name_at(i).str() << " : "
                << attr.quantity.label
                << (attr.kind == PortKind::Power ? " power" : " state");
        }
        out << " }\n";
        for (const auto& junction : def.junction_texts) {
            out << "  junction {";
            for (std::size_t i = 0; i < junction.size(); ++i)
                out << (i ? ", " : " ") << junction[i].str();
            out << " }\n";
        }
        out << "}\n";
    };
    auto print_system = [&](const SystemDef& def) {
        out << "system " << def.name << " = " << def.pattern;
        if (!def.fillings.empty()) {
            out << " with {";
            for (std::size_t i = 0; i < def.fillings.size(); ++i)
                out << (i ? ", " : " ") << def.fillings[i].first.str() << " = "
                    << def.fillings[i].second;
            out << " }";
        }
        out << "\n";
    };
    auto print_simulation = [&](const SimulationConfig& config) {
        out << "simulate " << config.system;
        if (!config.name.empty())
            out << " " << config.name;
        out << " {\n  t_end " << fmt(config.t_end) << "\n  dt " << fmt(config.dt)
            << "\n";
        if (!config.init.empty()) {
            out << "  init {\n";
            for (const auto& [state, value] : config.init)
                out << "    " << state << " = " << fmt(value) << "\n";
            out << "  }\n";
        }
        if (!config.inputs.empty()) {
            out << "  input {\n";
            for (const SignalBinding& b : config.inputs)
                out << "    " << b.port.str()
                    << (b.slot == SignalBinding::Slot::Effort ? ".e" : ".f") << " = "
                    << b.signal.str() << "\n";
            out << "  }\n";
        }
        out << "}\n";
    };

    for (const auto& [kind, index] : doc.declaration_order) {
        switch (kind) {
        case ModelDocument::DeclKind::Quantity:
            print_quantity(doc.declared_quantities[index]);
            break;
        case ModelDocument::DeclKind::Environment:
            print_environment();
            break;
        case ModelDocument::DeclKind::Interface:
            print_interface(doc.interfaces[index].first, doc.interfaces[index].second);
            break;
        case ModelDocument::DeclKind::Component:
            print_component(doc.components[index].first, doc.components[index].second);
            break;
        case ModelDocument::DeclKind::Pattern:
            print_pattern(doc.patterns[index]);
            break;
        case ModelDocument::DeclKind::System:
            print_system(doc.systems[index]);
            break;
        case ModelDocument::DeclKind::Simulation:
            print_simulation(doc.simulations[index]);
            break;
        }
    }
    return out.str();
}

bool documents_equal(const ModelDocument& a, const ModelDocument& b)
{
    auto quantities_equal = [](const Quantity& x, const Quantity& y) {
        return x.label == y.label && x.space == y.space && x.parity == y.parity;
    };
    if (a.declared_quantities.size() != b.declared_quantities.size())
        return false;
    for (std::size_t i = 0; i < a.declared_quantities.size(); ++i)
        if (!quantities_equal(a.declared_quantities[i], b.declared_quantities[i]))
            return false;
    return a.environment == b.environment &&
           a.environment_overridden == b.environment_overridden &&
           a.interfaces == b.interfaces && a.components == b.components &&
           a.patterns == b.patterns && a.systems == b.systems &&
           a.simulations == b.simulations;
}

} // namespace ephs
