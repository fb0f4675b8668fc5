#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "ephs/systems.hpp"

namespace ephs {

namespace {

std::string slot_name(const std::string& base, std::size_t slot, std::size_t dim)
{
    return dim > 1 ? base + "." + std::to_string(slot) : base;
}

/// Local state-slot offset of a port within a component interface.
std::size_t local_offset(const Interface& iface, const Name& port)
{
    std::size_t offset = 0;
    for (std::size_t i = 0; i < iface.size(); ++i) {
        if (iface.name_at(i) == port)
            return offset;
        offset += static_cast<std::size_t>(iface.value_at(i).quantity.dim());
    }
    throw Error("no port '" + port.str() + "'");
}

} // namespace

AssembledModel AssembledModel::build(FlattenedSystem flat, ReferenceEnvironment env,
                                     QuantityRegistry registry,
                                     std::vector<SignalBinding> inputs)
{
    AssembledModel m;
    m.flat_ = std::move(flat);
    m.env_ = std::move(env);
    m.registry_ = std::move(registry);

    LintReport lints = check_wellformed(m.flat_);
    if (!lints.ok())
        throw NotSimulableError("not simulable: " + lints.errors.front());

    const auto& comps = m.flat_.components;

    // Storage plans and their state slots, in component order.
    struct CompInfo {
        int kind = -1; // 0 storage, 1 environment, 2 reversible, 3 irreversible
        std::size_t plan = 0;
    };
    std::vector<CompInfo> info(comps.size());

    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const PrimitiveComponent& comp = comps.value_at(ci);
        const Name& path = comps.name_at(ci);
        if (const auto* s = std::get_if<StorageComponent>(&comp)) {
            check_storage_structure(path.str(), *s, m.registry_);
            StoragePlan plan;
            plan.comp = ci;
            plan.exergy = exergy_from_energy(*s, m.env_);
            plan.energy = s->energy;
            for (std::size_t p = 0; p < s->iface.size(); ++p) {
                const PortAttr& attr = s->iface.value_at(p);
                const std::size_t dim = static_cast<std::size_t>(attr.quantity.dim());
                for (std::size_t k = 0; k < dim; ++k) {
                    plan.symbols.push_back(state_symbol(s->iface.name_at(p), k, dim));
                    plan.global_state.push_back(m.state_names_.size());
                    m.state_names_.push_back(slot_name(
                        concat(path, s->iface.name_at(p)).str(), k, dim));
                    m.state_lambda_.push_back(0.0);
                    m.state_entropy_.push_back(attr.quantity.label == kEntropyLabel);
                }
            }
            info[ci] = {0, m.storage_.size()};
            m.storage_.push_back(std::move(plan));
        } else if (const auto* e = std::get_if<EnvironmentComponent>(&comp)) {
            check_environment_structure(path.str(), *e, m.env_);
            info[ci] = {1, 0};
        } else if (const auto* r = std::get_if<ReversibleComponent>(&comp)) {
            check_reversible_structure(path.str(), *r, m.registry_);
            if (r->transformer)
                throw NotSimulableError("not simulable: reversible component '" +
                                        path.str() + "' has a transformer block");
            if (r->constraint)
                throw NotSimulableError("not simulable: reversible component '" +
                                        path.str() + "' has a constraint block");
            info[ci] = {2, m.reversible_.size()};
            m.reversible_.push_back(ReversiblePlan{ci, {}, {}, {}});
        } else if (const auto* irr = std::get_if<IrreversibleComponent>(&comp)) {
            check_irreversible_structure(path.str(), *irr, m.registry_);
            info[ci] = {3, m.irreversible_.size()};
            m.irreversible_.push_back(IrreversiblePlan{ci, {}, {}, {}});
        }
    }

    // Environment components of equal quantity are identified: one merged
    // state per environment quantity, after the storage states.
    std::map<std::string, std::size_t> env_slot_of; // quantity label -> state slot
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        if (info[ci].kind != 1)
            continue;
        const Interface& iface = interface_of(comps.value_at(ci));
        for (std::size_t p = 0; p < iface.size(); ++p)
            env_slot_of.emplace(iface.value_at(p).quantity.label, 0);
    }
    for (auto& [label, slot] : env_slot_of) {
        slot = m.state_names_.size();
        m.state_names_.push_back("environment." + label);
        m.state_lambda_.push_back(m.env_.lambda_of(m.registry_.get(label)));
        m.state_entropy_.push_back(label == kEntropyLabel);
    }

    // Junction index per combined port.
    std::map<PortRef, std::size_t> junction_of;
    for (std::size_t j = 0; j < m.flat_.junctions.size(); ++j)
        for (const auto& member : m.flat_.junctions[j].members)
            junction_of[member] = j;

    // Outer-port plans and input bindings.
    std::map<Name, std::size_t> binding_of;
    for (std::size_t b = 0; b < inputs.size(); ++b) {
        if (!binding_of.emplace(inputs[b].port, b).second)
            throw Error("input: port '" + inputs[b].port.str() + "' bound twice");
        std::set<std::string> syms;
        inputs[b].signal.collect_symbols(syms);
        for (const auto& s : syms)
            if (s != "t")
                throw Error("input: signal for '" + inputs[b].port.str() +
                            "' may only reference t, found '" + s + "'");
    }
    std::vector<std::pair<Name, std::size_t>> outer_state_ports; // port, junction
    for (std::size_t p = 0; p < m.flat_.outer.size(); ++p) {
        const Name& port = m.flat_.outer.name_at(p);
        const PortAttr& attr = m.flat_.outer.value_at(p);
        auto jit = junction_of.find(outer_port(port));
        if (jit == junction_of.end())
            throw Error("outer port '" + port.str() + "' not connected");
        if (attr.kind == PortKind::State) {
            if (binding_of.count(port))
                throw Error("input: outer state port '" + port.str() +
                            "' cannot be bound");
            outer_state_ports.emplace_back(port, jit->second);
            continue;
        }
        OuterPlan plan;
        plan.port = port;
        plan.junction = jit->second;
        plan.dim = static_cast<std::size_t>(attr.quantity.dim());
        plan.lambda = m.env_.lambda_of(attr.quantity);
        plan.entropy = attr.quantity.label == kEntropyLabel;
        auto bit = binding_of.find(port);
        if (bit != binding_of.end()) {
            if (plan.dim != 1)
                throw NotSimulableError(
                    "not simulable: outer port '" + port.str() +
                    "' is multi-dimensional; signal bindings cover scalar ports");
            plan.effort_bound = inputs[bit->second].slot == SignalBinding::Slot::Effort;
            plan.signal = inputs[bit->second].signal;
            binding_of.erase(bit);
        } else {
            plan.effort_bound = false; // unbound: zero flow, effort reported
            plan.signal = Expr::constant(0.0);
        }
        m.outer_.push_back(std::move(plan));
    }
    if (!binding_of.empty())
        throw Error("input: no outer power port named '" +
                    binding_of.begin()->first.str() + "'");

    // Junction plans: state source, effort source, flow sink.
    m.junctions_.resize(m.flat_.junctions.size());
    const Interface inner = sum_interfaces([&] {
        std::vector<std::pair<Name, Interface>> entries;
        for (std::size_t i = 0; i < comps.size(); ++i)
            entries.emplace_back(comps.name_at(i), interface_of(comps.value_at(i)));
        return Package<Interface>::make(std::move(entries));
    }());

    for (std::size_t j = 0; j < m.flat_.junctions.size(); ++j) {
        const Junction& junction = m.flat_.junctions[j];
        JunctionPlan& plan = m.junctions_[j];
        plan.id = junction.id();

        bool any_power = false;
        for (const auto& member : junction.members) {
            const PortAttr& attr = member.side == PortRef::Side::Inner
                                       ? inner.at(member.name)
                                       : m.flat_.outer.at(member.name);
            plan.dim = static_cast<std::size_t>(attr.quantity.dim());
            if (attr.kind == PortKind::Power)
                any_power = true;

            if (member.side == PortRef::Side::Outer)
                continue;
            auto [ci, port] = m.flat_.resolve(member.name);
            if (info[ci].kind == 0) {
                const StoragePlan& sp = m.storage_[info[ci].plan];
                const Interface& iface = interface_of(comps.value_at(ci));
                std::size_t offset = local_offset(iface, port);
                plan.state_slots.assign(sp.global_state.begin() + offset,
                                        sp.global_state.begin() + offset + plan.dim);
                plan.sink_state_slots = plan.state_slots;
                if (plan.effort != JunctionPlan::Effort::None)
                    throw NotSimulableError("not simulable: junction '" + plan.id +
                                            "': effort overdetermined");
                plan.effort = JunctionPlan::Effort::Storage;
                plan.storage_plan = info[ci].plan;
                plan.storage_offset = offset;
            } else if (info[ci].kind == 1) {
                const Interface& iface = interface_of(comps.value_at(ci));
                const std::string& label = iface.at(port).quantity.label;
                plan.state_slots.assign(1, env_slot_of.at(label));
                plan.sink_state_slots = plan.state_slots;
                if (plan.effort != JunctionPlan::Effort::None)
                    throw NotSimulableError("not simulable: junction '" + plan.id +
                                            "': effort overdetermined");
                plan.effort = JunctionPlan::Effort::Environment;
            }
        }

        // An effort-bound outer port is the effort source of its junction.
        for (std::size_t op = 0; op < m.outer_.size(); ++op) {
            if (m.outer_[op].junction != j)
                continue;
            plan.has_outer = true;
            plan.outer_plan = op;
            if (m.outer_[op].effort_bound) {
                if (plan.effort != JunctionPlan::Effort::None)
                    throw NotSimulableError("not simulable: junction '" + plan.id +
                                            "': effort overdetermined (storage port and "
                                            "effort-bound outer port)");
                plan.effort = JunctionPlan::Effort::Signal;
            }
        }

        if (any_power && plan.effort == JunctionPlan::Effort::None)
            throw NotSimulableError("not simulable: junction '" + plan.id +
                                    "': effort undetermined (no storage/environment "
                                    "port and no effort-bound outer port)");
    }

    // Wire reversible and irreversible components; junction states they read
    // must have a source.
    auto junction_of_inner = [&](const Name& path, const Name& port) {
        auto it = junction_of.find(inner_port(concat(path, port)));
        if (it == junction_of.end())
            throw Error("port '" + concat(path, port).str() + "' not connected");
        return it->second;
    };
    auto require_state = [&](std::size_t j, const std::string& reader) {
        if (m.junctions_[j].state_slots.empty())
            throw NotSimulableError("not simulable: junction '" + m.junctions_[j].id +
                                    "': state undetermined but read by " + reader);
    };

    for (auto& plan : m.reversible_) {
        const auto& comp = std::get<ReversibleComponent>(comps.value_at(plan.comp));
        const Name& path = comps.name_at(plan.comp);
        std::set<std::string> referenced;
        if (comp.gyrator)
            for (const Expr& e : comp.gyrator->entries)
                e.collect_symbols(referenced);
        for (std::size_t p = 0; p < comp.iface.size(); ++p) {
            const Name& port = comp.iface.name_at(p);
            const std::size_t dim =
                static_cast<std::size_t>(comp.iface.value_at(p).quantity.dim());
            for (std::size_t k = 0; k < dim; ++k) {
                std::string sym = state_symbol(port, k, dim);
                if (referenced.count(sym)) {
                    std::size_t j = junction_of_inner(path, port);
                    require_state(j, "'" + path.str() + "'");
                    plan.state_symbols.push_back({sym, j, k});
                }
            }
        }
        for (const Name& port : comp.x1) {
            plan.x1_ports.push_back({junction_of_inner(path, port)});
            plan.x1_port_dims.push_back(
                static_cast<std::size_t>(comp.iface.at(port).quantity.dim()));
        }
    }
    for (auto& plan : m.irreversible_) {
        const auto& comp = std::get<IrreversibleComponent>(comps.value_at(plan.comp));
        const Name& path = comps.name_at(plan.comp);
        std::set<std::string> referenced;
        for (const Expr& e : comp.onsager.entries)
            e.collect_symbols(referenced);
        for (std::size_t p = 0; p < comp.iface.size(); ++p) {
            const Name& port = comp.iface.name_at(p);
            const PortAttr& attr = comp.iface.value_at(p);
            const std::size_t dim = static_cast<std::size_t>(attr.quantity.dim());
            for (std::size_t k = 0; k < dim; ++k) {
                std::string sym = state_symbol(port, k, dim);
                if (referenced.count(sym)) {
                    std::size_t j = junction_of_inner(path, port);
                    require_state(j, "'" + path.str() + "'");
                    plan.state_symbols.push_back({sym, j, k});
                }
            }
            if (attr.kind == PortKind::Power) {
                plan.power_ports.push_back({junction_of_inner(path, port)});
                plan.power_port_dims.push_back(dim);
            }
        }
    }
    for (const auto& [port, j] : outer_state_ports)
        require_state(j, "outer state port '" + port.str() + "'");

    // Names of the reported values: unbound partner per outer power port,
    // state per outer state port.
    for (const auto& plan : m.outer_)
        for (std::size_t k = 0; k < plan.dim; ++k)
            m.outer_value_names_.push_back(slot_name(
                plan.port.str() + (plan.effort_bound ? ".f" : ".e"), k, plan.dim));
    for (const auto& [port, j] : outer_state_ports) {
        const std::size_t dim = m.junctions_[j].dim;
        for (std::size_t k = 0; k < dim; ++k)
            m.outer_value_names_.push_back(slot_name(port.str() + ".x", k, dim));
        m.outer_state_.push_back({port, j});
    }

    return m;
}

std::vector<double>
AssembledModel::initial_state(const std::map<std::string, double>& init) const
{
    std::vector<double> x(state_dim(), 0.0);
    for (const auto& [name, value] : init) {
        auto it = std::find(state_names_.begin(), state_names_.end(), name);
        if (it == state_names_.end())
            throw Error("init: no state named '" + name + "'");
        x[static_cast<std::size_t>(it - state_names_.begin())] = value;
    }
    return x;
}

AssembledModel::Derivative AssembledModel::rhs(double t, std::span<const double> x) const
{
    if (x.size() != state_dim())
        throw Error("rhs: state vector has wrong dimension");
    const auto& comps = flat_.components;
    const double theta0 = env_.theta0();

    // 1. Storage efforts (gradient of the exergy function at the current state).
    std::vector<std::vector<double>> storage_efforts(storage_.size());
    for (std::size_t sp = 0; sp < storage_.size(); ++sp) {
        const StoragePlan& plan = storage_[sp];
        Bindings bindings;
        bindings[kTheta0Symbol] = theta0;
        for (std::size_t i = 0; i < plan.symbols.size(); ++i)
            bindings[plan.symbols[i]] = x[plan.global_state[i]];
        storage_efforts[sp] = plan.exergy.grad(plan.symbols, bindings);
    }

    // 2. Junction states and efforts.
    std::vector<std::vector<double>> jstate(junctions_.size());
    std::vector<std::vector<double>> jeffort(junctions_.size());
    std::vector<std::vector<double>> jacc(junctions_.size());
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
        const JunctionPlan& plan = junctions_[j];
        jacc[j].assign(plan.dim, 0.0);
        if (!plan.state_slots.empty()) {
            jstate[j].resize(plan.dim);
            for (std::size_t k = 0; k < plan.dim; ++k)
                jstate[j][k] = x[plan.state_slots[k]];
        }
        switch (plan.effort) {
        case JunctionPlan::Effort::Storage: {
            jeffort[j].resize(plan.dim);
            for (std::size_t k = 0; k < plan.dim; ++k)
                jeffort[j][k] = storage_efforts[plan.storage_plan][plan.storage_offset + k];
            break;
        }
        case JunctionPlan::Effort::Environment:
            jeffort[j].assign(plan.dim, 0.0);
            break;
        case JunctionPlan::Effort::Signal: {
            Bindings bindings{{"t", t}};
            jeffort[j].assign(plan.dim, outer_[plan.outer_plan].signal.eval(bindings));
            break;
        }
        case JunctionPlan::Effort::None:
            break;
        }
    }

    // 3. Reversible and irreversible flows, accumulated per junction.
    for (const auto& plan : reversible_) {
        const auto& comp = std::get<ReversibleComponent>(comps.value_at(plan.comp));
        Bindings bindings;
        bindings[kTheta0Symbol] = theta0;
        for (const auto& ws : plan.state_symbols)
            bindings[ws.symbol] = jstate[ws.junction][ws.slot];
        std::vector<double> e1;
        for (std::size_t p = 0; p < plan.x1_ports.size(); ++p) {
            const auto& je = jeffort[plan.x1_ports[p].junction];
            e1.insert(e1.end(), je.begin(), je.end());
        }
        ReversibleFlows flows = reversible_flows(comp, e1, {}, {}, bindings);
        std::size_t offset = 0;
        for (std::size_t p = 0; p < plan.x1_ports.size(); ++p) {
            auto& acc = jacc[plan.x1_ports[p].junction];
            for (std::size_t k = 0; k < plan.x1_port_dims[p]; ++k)
                acc[k] += flows.x1_flows[offset + k];
            offset += plan.x1_port_dims[p];
        }
    }
    for (const auto& plan : irreversible_) {
        const auto& comp = std::get<IrreversibleComponent>(comps.value_at(plan.comp));
        Bindings bindings;
        for (const auto& ws : plan.state_symbols)
            bindings[ws.symbol] = jstate[ws.junction][ws.slot];
        std::vector<double> e;
        for (std::size_t p = 0; p < plan.power_ports.size(); ++p) {
            const auto& je = jeffort[plan.power_ports[p].junction];
            e.insert(e.end(), je.begin(), je.end());
        }
        std::vector<double> flows = irreversible_flows(comp, e, bindings, theta0);
        std::size_t offset = 0;
        for (std::size_t p = 0; p < plan.power_ports.size(); ++p) {
            auto& acc = jacc[plan.power_ports[p].junction];
            for (std::size_t k = 0; k < plan.power_port_dims[p]; ++k)
                acc[k] += flows[offset + k];
            offset += plan.power_port_dims[p];
        }
    }

    // 4. Outer flows: bound signals, or the inner net flow when the effort
    //    is bound.
    Derivative out;
    out.xdot.assign(state_dim(), 0.0);
    std::vector<std::vector<double>> outer_flow(outer_.size());
    for (std::size_t op = 0; op < outer_.size(); ++op) {
        const OuterPlan& plan = outer_[op];
        if (plan.effort_bound) {
            outer_flow[op] = jacc[plan.junction]; // resolved below if a sink exists
        } else {
            Bindings bindings{{"t", t}};
            outer_flow[op].assign(plan.dim, plan.signal.eval(bindings));
        }
    }

    // 5. Flow resolution: the storage/environment port absorbs the junction's
    //    net flow.
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
        const JunctionPlan& plan = junctions_[j];
        if (plan.sink_state_slots.empty())
            continue;
        for (std::size_t k = 0; k < plan.dim; ++k) {
            double f_outer = plan.has_outer ? outer_flow[plan.outer_plan][k] : 0.0;
            out.xdot[plan.sink_state_slots[k]] += f_outer - jacc[j][k];
        }
    }

    // 6. Diagnostics: junction power residuals and boundary supply rates.
    out.max_power_residual = 0.0;
    for (std::size_t j = 0; j < junctions_.size(); ++j) {
        const JunctionPlan& plan = junctions_[j];
        if (jeffort[j].empty())
            continue;
        double residual = 0.0;
        for (std::size_t k = 0; k < plan.dim; ++k) {
            double inner_sum = jacc[j][k];
            if (!plan.sink_state_slots.empty()) {
                double f_outer = plan.has_outer ? outer_flow[plan.outer_plan][k] : 0.0;
                inner_sum += f_outer - jacc[j][k]; // the sink's resolved flow
            }
            double outer_sum = plan.has_outer ? outer_flow[plan.outer_plan][k] : 0.0;
            residual += jeffort[j][k] * (inner_sum - outer_sum);
        }
        out.max_power_residual = std::max(out.max_power_residual, std::abs(residual));
    }
    for (std::size_t op = 0; op < outer_.size(); ++op) {
        const OuterPlan& plan = outer_[op];
        const auto& e = jeffort[plan.junction];
        for (std::size_t k = 0; k < plan.dim; ++k) {
            double f = outer_flow[op][k];
            out.supplied_exergy_rate += e[k] * f;
            out.supplied_energy_rate += (e[k] + plan.lambda) * f;
            if (plan.entropy)
                out.entropy_inflow_rate += f;
        }
    }

    // 7. Reported values: the unbound partner of each outer power port and
    //    the states seen by outer state ports.
    for (std::size_t op = 0; op < outer_.size(); ++op) {
        const OuterPlan& plan = outer_[op];
        const auto& source = plan.effort_bound ? outer_flow[op] : jeffort[plan.junction];
        out.outer_values.insert(out.outer_values.end(), source.begin(), source.end());
    }
    for (const auto& os : outer_state_)
        out.outer_values.insert(out.outer_values.end(), jstate[os.junction].begin(),
                                jstate[os.junction].end());
    return out;
}

double AssembledModel::total_energy(std::span<const double> x) const
{
    double total = 0.0;
    const double theta0 = env_.theta0();
    for (const auto& plan : storage_) {
        Bindings bindings;
        bindings[kTheta0Symbol] = theta0;
        for (std::size_t i = 0; i < plan.symbols.size(); ++i)
            bindings[plan.symbols[i]] = x[plan.global_state[i]];
        total += plan.energy.eval(bindings);
    }
    for (std::size_t i = 0; i < state_dim(); ++i)
        total += state_lambda_[i] * x[i]; // environment components store lambda * x
    return total;
}

double AssembledModel::total_exergy(std::span<const double> x) const
{
    double total = 0.0;
    const double theta0 = env_.theta0();
    for (const auto& plan : storage_) {
        Bindings bindings;
        bindings[kTheta0Symbol] = theta0;
        for (std::size_t i = 0; i < plan.symbols.size(); ++i)
            bindings[plan.symbols[i]] = x[plan.global_state[i]];
        total += plan.exergy.eval(bindings);
    }
    return total;
}

double AssembledModel::total_entropy(std::span<const double> x) const
{
    double total = 0.0;
    for (std::size_t i = 0; i < state_dim(); ++i)
        if (state_entropy_[i])
            total += x[i];
    return total;
}

Trajectory simulate(const AssembledModel& model, double t_end, double dt,
                    std::span<const double> x0)
{
    if (!(dt > 0.0))
        throw Error("simulate: dt must be positive");
    if (x0.size() != model.state_dim())
        throw Error("simulate: initial state has wrong dimension");
    const long long steps = std::llround(t_end / dt);
    if (steps < 0)
        throw Error("simulate: t_end must be nonnegative");

    Trajectory traj;
    traj.state_names = model.state_names();
    traj.outer_names = model.outer_value_names();

    std::vector<double> x(x0.begin(), x0.end());
    double supplied_energy = 0.0;
    double supplied_exergy = 0.0;
    double entropy_inflow = 0.0;

    auto record = [&](double t, const AssembledModel::Derivative& d) {
        traj.t.push_back(t);
        traj.states.push_back(x);
        traj.energy.push_back(model.total_energy(x));
        traj.exergy.push_back(model.total_exergy(x));
        double entropy_rate = 0.0;
        for (std::size_t i = 0; i < model.state_dim(); ++i)
            entropy_rate += model.entropy_slot(i) ? d.xdot[i] : 0.0;
        traj.entropy_production_rate.push_back(entropy_rate - d.entropy_inflow_rate);
        traj.max_power_residual.push_back(d.max_power_residual);
        traj.supplied_energy.push_back(supplied_energy);
        traj.supplied_exergy.push_back(supplied_exergy);
        traj.entropy_inflow.push_back(entropy_inflow);
        traj.outer_values.push_back(d.outer_values);
    };

    const std::size_t n = model.state_dim();
    std::vector<double> xs(n);
    for (long long step = 0; step <= steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        AssembledModel::Derivative k1 = model.rhs(t, x);
        record(t, k1);
        if (step == steps)
            break;

        auto at = [&](const std::vector<double>& k, double h) {
            for (std::size_t i = 0; i < n; ++i)
                xs[i] = x[i] + h * k[i];
            return std::span<const double>(xs);
        };
        AssembledModel::Derivative k2 = model.rhs(t + dt / 2.0, at(k1.xdot, dt / 2.0));
        AssembledModel::Derivative k3 = model.rhs(t + dt / 2.0, at(k2.xdot, dt / 2.0));
        AssembledModel::Derivative k4 = model.rhs(t + dt, at(k3.xdot, dt));

        for (std::size_t i = 0; i < n; ++i)
            x[i] += dt / 6.0 *
                    (k1.xdot[i] + 2.0 * k2.xdot[i] + 2.0 * k3.xdot[i] + k4.xdot[i]);
        supplied_energy += dt / 6.0 *
                           (k1.supplied_energy_rate + 2.0 * k2.supplied_energy_rate +
                            2.0 * k3.supplied_energy_rate + k4.supplied_energy_rate);
        supplied_exergy += dt / 6.0 *
                           (k1.supplied_exergy_rate + 2.0 * k2.supplied_exergy_rate +
                            2.0 * k3.supplied_exergy_rate + k4.supplied_exergy_rate);
        entropy_inflow += dt / 6.0 *
                          (k1.entropy_inflow_rate + 2.0 * k2.entropy_inflow_rate +
                           2.0 * k3.entropy_inflow_rate + k4.entropy_inflow_rate);

        for (double v : x)
            if (!std::isfinite(v))
                throw Error("simulate: non-finite state at t = " +
                            std::to_string(t + dt));
    }
    return traj;
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string to_csv(const Trajectory& traj)
{
    std::ostringstream out;
    out << "t";
    for (const auto& name : traj.state_names)
        out << "," << name;
    out << ",E_total,H_total,S_prod_rate,max_power_residual\n";
    for (std::size_t row = 0; row < traj.t.size(); ++row) {
        out << fmt(traj.t[row]);
        for (double v : traj.states[row])
            out << "," << fmt(v);
        out << "," << fmt(traj.energy[row]) << "," << fmt(traj.exergy[row]) << ","
            << fmt(traj.entropy_production_rate[row]) << ","
            << fmt(traj.max_power_residual[row]) << "\n";
    }
    return out.str();
}

AuditReport audit(const AssembledModel& model, const Trajectory& traj)
{
    AuditReport report;
    if (traj.t.empty())
        return report;
    const double theta0 = model.environment().theta0();
    const double e0 = traj.energy.front();
    const double h0 = traj.exergy.front();
    const double s0 = model.total_entropy(traj.states.front());
    report.min_entropy_production_rate = traj.entropy_production_rate.front();
    for (std::size_t row = 0; row < traj.t.size(); ++row) {
        report.max_power_residual =
            std::max(report.max_power_residual, traj.max_power_residual[row]);
        double drift = std::abs(traj.energy[row] - e0 - traj.supplied_energy[row]) /
                       (1.0 + std::abs(e0));
        report.energy_drift_rel = std::max(report.energy_drift_rel, drift);
        double s = model.total_entropy(traj.states[row]);
        double destroyed = theta0 * (s - s0 - traj.entropy_inflow[row]);
        double balance =
            std::abs(traj.exergy[row] - h0 - traj.supplied_exergy[row] + destroyed);
        report.exergy_balance_max = std::max(report.exergy_balance_max, balance);
        report.min_entropy_production_rate = std::min(
            report.min_entropy_production_rate, traj.entropy_production_rate[row]);
    }
    return report;
}

std::string AuditReport::to_string() const
{
    std::ostringstream out;
    out << "max junction power residual: " << max_power_residual << "\n"
        << "relative energy drift:       " << energy_drift_rel << "\n"
        << "exergy balance residual:     " << exergy_balance_max << "\n"
        << "min entropy production rate: " << min_entropy_production_rate << "\n";
    return out.str();
}

} // namespace ephs
