#include <cctype>
#include <cstdlib>
#include <set>

#include "ephs/model.hpp"

namespace ephs {

const Interface* ModelDocument::find_interface(const std::string& name) const
{
    for (const auto& [n, v] : interfaces)
        if (n == name)
            return &v;
    return nullptr;
}

const PrimitiveComponent* ModelDocument::find_component(const std::string& name) const
{
    for (const auto& [n, v] : components)
        if (n == name)
            return &v;
    return nullptr;
}

const PatternDef* ModelDocument::find_pattern(const std::string& name) const
{
    for (const auto& p : patterns)
        if (p.name == name)
            return &p;
    return nullptr;
}

const SystemDef* ModelDocument::find_system(const std::string& name) const
{
    for (const auto& s : systems)
        if (s.name == name)
            return &s;
    return nullptr;
}

const SimulationConfig* ModelDocument::find_simulation(const std::string& system,
                                                       const std::string& config) const
{
    for (const auto& s : simulations)
        if (s.system == system && (config.empty() || s.name == config))
            return &s;
    return nullptr;
}

namespace {

class ModelParser {
public:
    explicit ModelParser(std::string_view text) : text_(text)
    {
        doc_.registry = QuantityRegistry::builtin();
        doc_.environment = ReferenceEnvironment::standard();
    }

    ModelDocument parse()
    {
        while (true) {
            skip_ws();
            if (at_end())
                break;
            std::string keyword = read_ident("declaration keyword");
            if (keyword == "quantity")
                parse_quantity();
            else if (keyword == "environment")
                parse_environment();
            else if (keyword == "interface")
                parse_interface_decl();
            else if (keyword == "storage")
                parse_storage();
            else if (keyword == "reversible")
                parse_reversible();
            else if (keyword == "irreversible")
                parse_irreversible();
            else if (keyword == "environment_component")
                parse_environment_component();
            else if (keyword == "pattern")
                parse_pattern();
            else if (keyword == "system")
                parse_system();
            else if (keyword == "simulate")
                parse_simulate();
            else
                fail("unknown declaration '" + keyword + "'");
        }
        return std::move(doc_);
    }

private:
    // ---- character-level helpers -------------------------------------

    bool at_end() const { return pos_ >= text_.size(); }

    void skip_ws()
    {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::pair<std::size_t, std::size_t> line_col(std::size_t pos) const
    {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        auto [line, col] = line_col(pos_);
        throw ParseError(line, col, message);
    }

    bool peek_char(char c)
    {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool eat_char(char c)
    {
        if (peek_char(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect_char(char c)
    {
        if (!eat_char(c))
            fail(std::string("expected '") + c + "'");
    }

    static bool ident_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    bool peek_ident()
    {
        skip_ws();
        return pos_ < text_.size() &&
               (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
    }

    std::string read_ident(const std::string& what)
    {
        skip_ws();
        if (!peek_ident())
            fail("expected " + what);
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_]))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    /// Keyword check without consuming on mismatch.
    bool try_keyword(const std::string& keyword)
    {
        skip_ws();
        std::size_t mark = pos_;
        if (!peek_ident())
            return false;
        std::string ident = read_ident("keyword");
        if (ident == keyword)
            return true;
        pos_ = mark;
        return false;
    }

    void expect_keyword(const std::string& keyword)
    {
        if (!try_keyword(keyword))
            fail("expected '" + keyword + "'");
    }

    Name read_name(const std::string& what)
    {
        std::string first = read_ident(what);
        std::vector<std::string> segments{first};
        while (pos_ < text_.size() && text_[pos_] == '.') {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && ident_char(text_[pos_])) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && ident_char(text_[pos_]))
                    ++pos_;
                segments.emplace_back(text_.substr(start, pos_ - start));
            } else {
                pos_ = mark;
                break;
            }
        }
        return Name(std::move(segments));
    }

    double read_number(const std::string& what)
    {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
            ++pos_;
        bool digits = false;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            digits = digits || std::isdigit(static_cast<unsigned char>(text_[pos_]));
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
                ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (!digits)
            fail("expected " + what);
        return std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
    }

    int read_int(const std::string& what)
    {
        double v = read_number(what);
        return static_cast<int>(v);
    }

    /// Captures an expression up to one of `stops` at parenthesis depth
    /// zero. Comments run to the end of the line and are dropped.
    Expr read_expr(std::string_view stops)
    {
        skip_ws();
        std::string slice;
        int depth = 0;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                if (stops.find('\n') != std::string_view::npos)
                    break; // the comment ends the entry
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
                slice += ' ';
                continue;
            }
            if (c == '(')
                ++depth;
            else if (c == ')') {
                if (depth == 0)
                    fail("unbalanced ')'");
                --depth;
            } else if (depth == 0 && stops.find(c) != std::string_view::npos) {
                break;
            }
            slice += c;
            ++pos_;
        }
        if (depth != 0)
            fail("unbalanced '('");
        try {
            return Expr::parse(slice);
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    // ---- shared grammar pieces ---------------------------------------

    Quantity resolve_quantity(const std::string& label)
    {
        const Quantity* q = doc_.registry.find(label);
        if (q == nullptr)
            fail("unknown quantity '" + label + "'");
        return *q;
    }

    /// ports { <name> : <quantity> <power|state> ... }
    Interface parse_attr_ports()
    {
        expect_keyword("ports");
        expect_char('{');
        std::vector<std::pair<Name, PortAttr>> entries;
        while (!eat_char('}')) {
            Name port = read_name("port name");
            expect_char(':');
            std::string label = read_ident("quantity label");
            PortAttr attr;
            attr.quantity = resolve_quantity(label);
            if (try_keyword("power"))
                attr.kind = PortKind::Power;
            else if (try_keyword("state"))
                attr.kind = PortKind::State;
            else
                fail("expected 'power' or 'state'");
            entries.emplace_back(std::move(port), attr);
            eat_char(',');
        }
        try {
            return Interface::make(std::move(entries));
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    std::vector<Name> parse_name_list_block()
    {
        expect_char('{');
        std::vector<Name> names;
        while (!eat_char('}')) {
            names.push_back(read_name("port name"));
            eat_char(',');
        }
        return names;
    }

    ExprMatrix parse_matrix()
    {
        expect_char('[');
        ExprMatrix m;
        std::vector<std::vector<Expr>> rows;
        if (!eat_char(']')) {
            do {
                expect_char('[');
                std::vector<Expr> row;
                if (!peek_char(']')) {
                    do {
                        row.push_back(read_expr(",]"));
                    } while (eat_char(','));
                }
                expect_char(']');
                rows.push_back(std::move(row));
            } while (eat_char(','));
            expect_char(']');
        }
        m.rows = rows.size();
        m.cols = rows.empty() ? 0 : rows.front().size();
        for (const auto& row : rows) {
            if (row.size() != m.cols)
                fail("matrix rows have different lengths");
            for (const auto& e : row)
                m.entries.push_back(e);
        }
        return m;
    }

    void require_fresh(const std::string& name)
    {
        if (doc_.find_interface(name) || doc_.find_component(name) ||
            doc_.find_pattern(name) || doc_.find_system(name))
            fail("name '" + name + "' is already defined");
    }

    // ---- declarations -------------------------------------------------

    void parse_quantity()
    {
        std::string label = read_ident("quantity label");
        expect_keyword("dim");
        int dim = read_int("dimension");
        expect_keyword("parity");
        int parity = read_int("parity");
        Quantity q{label, {dim}, parity};
        try {
            doc_.registry.add(q);
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.declared_quantities.push_back(q);
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Quantity,
                                            doc_.declared_quantities.size() - 1);
    }

    void parse_environment()
    {
        if (doc_.environment_overridden)
            fail("environment defined twice");
        expect_char('{');
        std::vector<std::pair<Name, EnvironmentPort>> entries;
        while (!eat_char('}')) {
            expect_keyword("port");
            Name port = read_name("port name");
            expect_keyword("quantity");
            Quantity q = resolve_quantity(read_ident("quantity label"));
            expect_keyword("value");
            double value = read_number("intensive value");
            entries.emplace_back(std::move(port), EnvironmentPort{q, value});
            eat_char(',');
        }
        try {
            doc_.environment =
                ReferenceEnvironment::of(Package<EnvironmentPort>::make(std::move(entries)));
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.environment_overridden = true;
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Environment, 0);
    }

    void parse_interface_decl()
    {
        std::string name = read_ident("interface name");
        require_fresh(name);
        expect_char('{');
        Interface iface = parse_attr_ports();
        expect_char('}');
        doc_.interfaces.emplace_back(name, std::move(iface));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Interface,
                                            doc_.interfaces.size() - 1);
    }

    void parse_storage()
    {
        std::string name = read_ident("component name");
        require_fresh(name);
        expect_char('{');
        StorageComponent c;
        c.iface = parse_attr_ports();
        expect_keyword("energy");
        c.energy = read_expr("}");
        expect_char('}');
        try {
            check_storage_structure(name, c, doc_.registry);
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.components.emplace_back(name, PrimitiveComponent(std::move(c)));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Component,
                                            doc_.components.size() - 1);
    }

    void parse_reversible()
    {
        std::string name = read_ident("component name");
        require_fresh(name);
        expect_char('{');
        ReversibleComponent c;
        c.iface = parse_attr_ports();
        expect_keyword("x1");
        c.x1 = parse_name_list_block();
        if (try_keyword("x2"))
            c.x2 = parse_name_list_block();
        if (try_keyword("L"))
            c.gyrator = parse_matrix();
        if (try_keyword("g"))
            c.transformer = parse_matrix();
        if (try_keyword("C"))
            c.constraint = parse_matrix();
        expect_char('}');
        try {
            check_reversible_structure(name, c, doc_.registry);
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.components.emplace_back(name, PrimitiveComponent(std::move(c)));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Component,
                                            doc_.components.size() - 1);
    }

    void parse_irreversible()
    {
        std::string name = read_ident("component name");
        require_fresh(name);
        expect_char('{');
        IrreversibleComponent c;
        c.iface = parse_attr_ports();
        expect_keyword("M");
        c.onsager = parse_matrix();
        expect_char('}');
        try {
            check_irreversible_structure(name, c, doc_.registry);
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.components.emplace_back(name, PrimitiveComponent(std::move(c)));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Component,
                                            doc_.components.size() - 1);
    }

    void parse_environment_component()
    {
        std::string name = read_ident("component name");
        require_fresh(name);
        expect_char('{');
        expect_keyword("ports");
        expect_char('{');
        std::vector<std::pair<Name, PortAttr>> entries;
        const Interface env_iface = environment_interface(doc_.environment);
        while (!eat_char('}')) {
            Name port = read_name("port name");
            const PortAttr* attr = env_iface.find(port);
            if (attr == nullptr)
                fail("environment has no port named '" + port.str() + "'");
            entries.emplace_back(std::move(port), *attr);
            eat_char(',');
        }
        expect_char('}');
        EnvironmentComponent c;
        c.iface = Interface::make(std::move(entries));
        doc_.components.emplace_back(name, PrimitiveComponent(std::move(c)));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Component,
                                            doc_.components.size() - 1);
    }

    const Interface* interface_of_entity(const std::string& name)
    {
        if (const Interface* i = doc_.find_interface(name))
            return i;
        if (const PrimitiveComponent* c = doc_.find_component(name))
            return &interface_of(*c);
        if (const SystemDef* s = doc_.find_system(name))
            return &s->system.interface();
        return nullptr;
    }

    void parse_pattern()
    {
        PatternDef def;
        def.name = read_ident("pattern name");
        require_fresh(def.name);
        expect_char('{');

        std::vector<std::pair<Name, Interface>> inner_entries;
        while (try_keyword("box")) {
            BoxDecl box;
            box.box = read_name("box name");
            expect_char(':');
            if (try_keyword("interface")) {
                expect_char('{');
                Interface iface = parse_attr_ports();
                expect_char('}');
                inner_entries.emplace_back(box.box, iface);
                box.ref = std::move(iface);
            } else {
                std::string entity = read_ident("interface, component, or system name");
                const Interface* iface = interface_of_entity(entity);
                if (iface == nullptr)
                    fail("unknown interface, component, or system '" + entity + "'");
                inner_entries.emplace_back(box.box, *iface);
                box.ref = entity;
            }
            def.boxes.push_back(std::move(box));
        }

        expect_keyword("outer");
        expect_char('{');
        bool has_ports = peek_ident();
        def.outer = Interface{};
        if (has_ports) {
            // reuse attr-port entries without the leading 'ports' keyword
            std::vector<std::pair<Name, PortAttr>> entries;
            while (!peek_char('}')) {
                Name port = read_name("port name");
                expect_char(':');
                std::string label = read_ident("quantity label");
                PortAttr attr;
                attr.quantity = resolve_quantity(label);
                if (try_keyword("power"))
                    attr.kind = PortKind::Power;
                else if (try_keyword("state"))
                    attr.kind = PortKind::State;
                else
                    fail("expected 'power' or 'state'");
                entries.emplace_back(std::move(port), attr);
                eat_char(',');
            }
            try {
                def.outer = Interface::make(std::move(entries));
            } catch (const Error& e) {
                fail(e.what());
            }
        }
        expect_char('}');

        Package<Interface> inner;
        try {
            inner = Package<Interface>::make(inner_entries);
        } catch (const Error& e) {
            fail(e.what());
        }
        const Interface inner_sum = sum_interfaces(inner);

        std::vector<Junction> junctions;
        while (try_keyword("junction")) {
            expect_char('{');
            Junction j;
            std::vector<Name> texts;
            while (!eat_char('}')) {
                Name port = read_name("port reference");
                bool is_inner = inner_sum.find(port) != nullptr;
                bool is_outer = def.outer.find(port) != nullptr;
                if (is_inner && is_outer)
                    fail("port reference '" + port.str() +
                         "' is ambiguous (inner and outer)");
                if (!is_inner && !is_outer)
                    fail("junction references unknown port '" + port.str() + "'");
                j.members.push_back(is_inner ? inner_port(port) : outer_port(port));
                texts.push_back(std::move(port));
                eat_char(',');
            }
            def.junction_texts.push_back(std::move(texts));
            junctions.push_back(std::move(j));
        }
        expect_char('}');

        try {
            def.pattern = InterconnectionPattern::validated(std::move(inner), def.outer,
                                                            std::move(junctions));
        } catch (const Error& e) {
            fail(e.what());
        }
        doc_.patterns.push_back(std::move(def));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Pattern,
                                            doc_.patterns.size() - 1);
    }

    void parse_system()
    {
        SystemDef def;
        def.name = read_ident("system name");
        require_fresh(def.name);
        expect_char('=');
        def.pattern = read_ident("pattern name");
        const PatternDef* pattern = doc_.find_pattern(def.pattern);
        if (pattern == nullptr)
            fail("unknown pattern '" + def.pattern + "'");
        if (try_keyword("with")) {
            expect_char('{');
            while (!eat_char('}')) {
                Name box = read_name("box name");
                expect_char('=');
                std::string entity = read_ident("component or system name");
                def.fillings.emplace_back(std::move(box), entity);
                eat_char(',');
            }
        }

        // Resolve fillings: explicit with-clause entries, falling back to the
        // entity referenced by the box declaration.
        std::vector<std::pair<Name, System>> subsystems;
        for (const BoxDecl& box : pattern->boxes) {
            std::string entity;
            bool explicit_filling = false;
            for (const auto& [b, e] : def.fillings)
                if (b == box.box) {
                    entity = e;
                    explicit_filling = true;
                }
            if (!explicit_filling) {
                // A box declared with a component or system name defaults to
                // that entity; an interface-only box needs a with-clause.
                if (const std::string* ref = std::get_if<std::string>(&box.ref))
                    if (doc_.find_component(*ref) || doc_.find_system(*ref))
                        entity = *ref;
            }
            if (entity.empty())
                fail("system '" + def.name + "': box '" + box.box.str() +
                     "' has no filling");
            System filling;
            if (const PrimitiveComponent* c = doc_.find_component(entity))
                filling = System(*c);
            else if (const SystemDef* s = doc_.find_system(entity))
                filling = s->system;
            else
                fail("system '" + def.name + "': unknown component or system '" + entity +
                     "'");
            if (!(filling.interface() == pattern->pattern.inner().at(box.box)))
                fail("system '" + def.name + "': filling '" + entity +
                     "' does not match the interface of box '" + box.box.str() + "'");
            subsystems.emplace_back(box.box, std::move(filling));
        }
        for (const auto& [b, e] : def.fillings) {
            bool known = false;
            for (const BoxDecl& box : pattern->boxes)
                known = known || box.box == b;
            if (!known)
                fail("system '" + def.name + "': pattern has no box named '" + b.str() +
                     "'");
        }

        CompositeSystem cs;
        cs.outer = pattern->pattern.outer();
        cs.junctions = pattern->pattern.junctions();
        try {
            cs.subsystems = Package<System>::make(std::move(subsystems));
        } catch (const Error& e) {
            fail(e.what());
        }
        def.system = System(std::move(cs));
        doc_.systems.push_back(std::move(def));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::System,
                                            doc_.systems.size() - 1);
    }

    void parse_simulate()
    {
        SimulationConfig config;
        config.system = read_ident("system name");
        if (doc_.find_system(config.system) == nullptr)
            fail("unknown system '" + config.system + "'");
        if (peek_ident())
            config.name = read_ident("config name");
        expect_char('{');
        expect_keyword("t_end");
        config.t_end = read_number("t_end");
        expect_keyword("dt");
        config.dt = read_number("dt");
        if (try_keyword("init")) {
            expect_char('{');
            while (!eat_char('}')) {
                Name state = read_name("state name");
                expect_char('=');
                double value = read_number("initial value");
                config.init.emplace_back(state.str(), value);
                eat_char(',');
            }
        }
        if (try_keyword("input")) {
            expect_char('{');
            while (!eat_char('}')) {
                Name target = read_name("port binding");
                if (target.size() < 2)
                    fail("input binding must name '<port>.e' or '<port>.f'");
                std::string slot = target.segments().back();
                if (slot != "e" && slot != "f")
                    fail("input binding must end in '.e' or '.f'");
                std::vector<std::string> port_segments(target.segments().begin(),
                                                       target.segments().end() - 1);
                SignalBinding binding;
                binding.port = Name(port_segments);
                binding.slot = slot == "e" ? SignalBinding::Slot::Effort
                                           : SignalBinding::Slot::Flow;
                expect_char('=');
                binding.signal = read_expr(",}\n"); // one signal per line or comma
                config.inputs.push_back(std::move(binding));
                eat_char(',');
            }
        }
        expect_char('}');
        doc_.simulations.push_back(std::move(config));
        doc_.declaration_order.emplace_back(ModelDocument::DeclKind::Simulation,
                                            doc_.simulations.size() - 1);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    ModelDocument doc_;
};

} // namespace

ModelDocument parse_model(std::string_view text)
{
    return ModelParser(text).parse();
}

} // namespace ephs
