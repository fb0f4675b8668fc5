#include "ephs/components.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ephs/detail/sampling.hpp"
#include "ephs/detail/small_eig.hpp"

namespace ephs {

std::string state_symbol(const Name& port, std::size_t slot, std::size_t dim)
{
    std::string s = port.str() + ".x";
    if (dim > 1)
        s += "." + std::to_string(slot);
    return s;
}

std::string effort_symbol(const Name& port, std::size_t slot, std::size_t dim)
{
    std::string s = port.str() + ".e";
    if (dim > 1)
        s += "." + std::to_string(slot);
    return s;
}

ExprMatrix ExprMatrix::zero(std::size_t rows, std::size_t cols)
{
    ExprMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.entries.assign(rows * cols, Expr::constant(0.0));
    return m;
}

std::vector<double> ExprMatrix::eval(const Bindings& bindings) const
{
    std::vector<double> out(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        out[i] = entries[i].eval(bindings);
    return out;
}

namespace {

struct Slot {
    Name port;
    std::size_t index; // within the port
    std::size_t dim;   // of the port
    Quantity quantity;
};

std::vector<Slot> power_slots(const Interface& iface)
{
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < iface.size(); ++i) {
        const PortAttr& attr = iface.value_at(i);
        if (attr.kind != PortKind::Power)
            continue;
        for (std::size_t k = 0; k < static_cast<std::size_t>(attr.quantity.dim()); ++k)
            slots.push_back({iface.name_at(i), k,
                             static_cast<std::size_t>(attr.quantity.dim()), attr.quantity});
    }
    return slots;
}

std::vector<Slot> state_slots(const Interface& iface)
{
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < iface.size(); ++i) {
        const PortAttr& attr = iface.value_at(i);
        for (std::size_t k = 0; k < static_cast<std::size_t>(attr.quantity.dim()); ++k)
            slots.push_back({iface.name_at(i), k,
                             static_cast<std::size_t>(attr.quantity.dim()), attr.quantity});
    }
    return slots;
}

/// Ordered slots for an explicit port list (the x1/x2 factors).
std::vector<Slot> listed_slots(const Interface& iface, const std::vector<Name>& ports)
{
    std::vector<Slot> slots;
    for (const Name& p : ports) {
        const PortAttr& attr = iface.at(p);
        for (std::size_t k = 0; k < static_cast<std::size_t>(attr.quantity.dim()); ++k)
            slots.push_back(
                {p, k, static_cast<std::size_t>(attr.quantity.dim()), attr.quantity});
    }
    return slots;
}

std::set<std::string> allowed_state_symbols(const Interface& iface)
{
    std::set<std::string> allowed{kTheta0Symbol};
    for (const Slot& s : state_slots(iface))
        allowed.insert(state_symbol(s.port, s.index, s.dim));
    return allowed;
}

void require_symbols(const std::string& component, const std::string& where,
                     const Expr& expr, const std::set<std::string>& allowed)
{
    std::set<std::string> symbols;
    expr.collect_symbols(symbols);
    for (const auto& s : symbols)
        if (allowed.find(s) == allowed.end())
            throw Error("component '" + component + "': " + where +
                        " references unknown symbol '" + s + "'");
}

void require_registered(const std::string& component, const Interface& iface,
                        const QuantityRegistry& registry)
{
    for (std::size_t i = 0; i < iface.size(); ++i)
        if (!registry.contains(iface.value_at(i).quantity))
            throw Error("component '" + component + "': quantity '" +
                        iface.value_at(i).quantity.label + "' is not registered");
}

ParityEnv component_parity_env(const Interface& iface)
{
    ParityEnv env;
    env[kTheta0Symbol] = Parity::Plus;
    for (const Slot& s : state_slots(iface))
        env[state_symbol(s.port, s.index, s.dim)] = parity_from_int(s.quantity.parity);
    for (const Slot& s : power_slots(iface))
        env[effort_symbol(s.port, s.index, s.dim)] = parity_from_int(s.quantity.parity);
    return env;
}

int parity_int(Parity p)
{
    return p == Parity::Plus ? +1 : -1;
}

std::string entry_str(std::size_t i, std::size_t j)
{
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

} // namespace

void check_storage_structure(const std::string& name, const StorageComponent& c,
                             const QuantityRegistry& registry)
{
    require_registered(name, c.iface, registry);
    for (std::size_t i = 0; i < c.iface.size(); ++i)
        if (c.iface.value_at(i).kind != PortKind::Power)
            throw Error("storage component '" + name + "': port '" +
                        c.iface.name_at(i).str() + "' must be a power port");
    require_symbols(name, "energy", c.energy, allowed_state_symbols(c.iface));
}

void check_environment_structure(const std::string& name, const EnvironmentComponent& c,
                                 const ReferenceEnvironment& env)
{
    if (!is_subinterface(c.iface, environment_interface(env)))
        throw Error("environment component '" + name +
                    "': interface is not a subinterface of the reference environment");
}

void check_reversible_structure(const std::string& name, const ReversibleComponent& c,
                                const QuantityRegistry& registry)
{
    require_registered(name, c.iface, registry);
    std::set<Name> split;
    for (const auto& list : {c.x1, c.x2})
        for (const Name& p : list) {
            const PortAttr* attr = c.iface.find(p);
            if (attr == nullptr)
                throw Error("reversible component '" + name + "': unknown port '" +
                            p.str() + "' in factor split");
            if (attr->kind != PortKind::Power)
                throw Error("reversible component '" + name + "': state port '" +
                            p.str() + "' cannot appear in the factor split");
            if (!split.insert(p).second)
                throw Error("reversible component '" + name + "': port '" + p.str() +
                            "' listed twice in the factor split");
        }
    for (const Slot& s : power_slots(c.iface))
        if (split.find(s.port) == split.end())
            throw Error("reversible component '" + name + "': power port '" +
                        s.port.str() + "' missing from the factor split");

    const std::size_t n1 = listed_slots(c.iface, c.x1).size();
    const std::size_t n2 = listed_slots(c.iface, c.x2).size();
    if (c.gyrator && (c.gyrator->rows != n1 || c.gyrator->cols != n1))
        throw Error("reversible component '" + name + "': gyrator block must be " +
                    std::to_string(n1) + "x" + std::to_string(n1));
    if (c.transformer && (c.transformer->rows != n1 || c.transformer->cols != n2))
        throw Error("reversible component '" + name + "': transformer block must be " +
                    std::to_string(n1) + "x" + std::to_string(n2));
    if (c.constraint && c.constraint->cols != n1)
        throw Error("reversible component '" + name + "': constraint block must have " +
                    std::to_string(n1) + " columns");

    const auto allowed = allowed_state_symbols(c.iface);
    for (const auto* block : {&c.gyrator, &c.transformer, &c.constraint})
        if (*block)
            for (const Expr& e : (*block)->entries)
                require_symbols(name, "structure matrix entry", e, allowed);
}

void check_irreversible_structure(const std::string& name, const IrreversibleComponent& c,
                                  const QuantityRegistry& registry)
{
    require_registered(name, c.iface, registry);
    const std::size_t n = power_slots(c.iface).size();
    if (c.onsager.rows != n || c.onsager.cols != n)
        throw Error("irreversible component '" + name + "': matrix must be " +
                    std::to_string(n) + "x" + std::to_string(n));
    std::set<std::string> allowed = allowed_state_symbols(c.iface);
    for (const Slot& s : power_slots(c.iface))
        allowed.insert(effort_symbol(s.port, s.index, s.dim));
    for (const Expr& e : c.onsager.entries)
        require_symbols(name, "matrix entry", e, allowed);
}

Expr exergy_from_energy(const StorageComponent& c, const ReferenceEnvironment& env)
{
    Expr h = c.energy;
    for (std::size_t i = 0; i < c.iface.size(); ++i) {
        const PortAttr& attr = c.iface.value_at(i);
        double lambda = env.lambda_of(attr.quantity);
        if (lambda != 0.0)
            h = h - Expr::constant(lambda) *
                        Expr::var(state_symbol(c.iface.name_at(i), 0,
                                               static_cast<std::size_t>(attr.quantity.dim())));
    }
    return h;
}

std::vector<std::string> storage_state_symbols(const StorageComponent& c,
                                               const QuantityRegistry& registry)
{
    (void)registry;
    std::vector<std::string> symbols;
    for (const Slot& s : state_slots(c.iface))
        symbols.push_back(state_symbol(s.port, s.index, s.dim));
    return symbols;
}

std::vector<double> storage_efforts(const StorageComponent& c,
                                    const ReferenceEnvironment& env,
                                    const QuantityRegistry& registry,
                                    std::span<const double> x)
{
    const std::vector<std::string> symbols = storage_state_symbols(c, registry);
    if (x.size() != symbols.size())
        throw Error("storage efforts: state vector has wrong dimension");
    Bindings bindings;
    bindings[kTheta0Symbol] = env.theta0();
    for (std::size_t i = 0; i < symbols.size(); ++i)
        bindings[symbols[i]] = x[i];
    return exergy_from_energy(c, env).grad(symbols, bindings);
}

std::vector<double> environment_efforts(const EnvironmentComponent& c,
                                        const QuantityRegistry& registry)
{
    (void)registry;
    return std::vector<double>(power_slots(c.iface).size(), 0.0);
}

ReversibleFlows reversible_flows(const ReversibleComponent& c, std::span<const double> e1,
                                 std::span<const double> f2,
                                 std::span<const double> lambda_c,
                                 const Bindings& bindings)
{
    const std::size_t n1 = listed_slots(c.iface, c.x1).size();
    const std::size_t n2 = listed_slots(c.iface, c.x2).size();
    const std::size_t nc = c.constraint_dim();
    if (e1.size() != n1 || f2.size() != n2 || lambda_c.size() != nc)
        throw Error("reversible flows: dimension mismatch");

    ReversibleFlows out;
    out.x1_flows.assign(n1, 0.0);
    out.x2_efforts.assign(n2, 0.0);
    out.constraint_residual.assign(nc, 0.0);

    if (c.gyrator) {
        const std::vector<double> l = c.gyrator->eval(bindings);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n1; ++j)
                out.x1_flows[i] += l[i * n1 + j] * e1[j];
    }
    if (c.transformer) {
        const std::vector<double> g = c.transformer->eval(bindings);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t k = 0; k < n2; ++k)
                out.x1_flows[i] -= g[i * n2 + k] * f2[k];
        for (std::size_t k = 0; k < n2; ++k)
            for (std::size_t i = 0; i < n1; ++i)
                out.x2_efforts[k] += g[i * n2 + k] * e1[i];
    }
    if (c.constraint) {
        const std::vector<double> cc = c.constraint->eval(bindings);
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t r = 0; r < nc; ++r)
                out.x1_flows[i] += cc[r * n1 + i] * lambda_c[r];
        for (std::size_t r = 0; r < nc; ++r)
            for (std::size_t i = 0; i < n1; ++i)
                out.constraint_residual[r] -= cc[r * n1 + i] * e1[i];
    }
    return out;
}

std::vector<double> irreversible_flows(const IrreversibleComponent& c,
                                       std::span<const double> efforts,
                                       const Bindings& extra_bindings, double theta0)
{
    const std::vector<Slot> slots = power_slots(c.iface);
    if (efforts.size() != slots.size())
        throw Error("irreversible flows: dimension mismatch");
    if (theta0 == 0.0)
        throw DomainError("irreversible flows: zero reference temperature");

    Bindings bindings = extra_bindings;
    bindings[kTheta0Symbol] = theta0;
    for (std::size_t i = 0; i < slots.size(); ++i)
        bindings[effort_symbol(slots[i].port, slots[i].index, slots[i].dim)] = efforts[i];

    const std::size_t n = slots.size();
    const std::vector<double> m = c.onsager.eval(bindings);
    std::vector<double> flows(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            flows[i] += m[i * n + j] * efforts[j];
        flows[i] /= theta0;
    }
    return flows;
}

bool ValidationReport::has_condition(const std::string& condition) const
{
    for (const auto& v : violations)
        if (v.condition == condition)
            return true;
    return false;
}

std::string ValidationReport::to_string() const
{
    std::ostringstream out;
    if (ok()) {
        out << component << ": ok";
        return out.str();
    }
    out << component << ": " << violations.size() << " violated condition(s)";
    for (const auto& v : violations)
        out << "\n  [" << v.condition << "] " << v.detail;
    return out.str();
}

namespace {

/// Sample points: the origin, unit basis points, then Halton points scaled
/// into the per-symbol bounds.
class SampleSet {
public:
    SampleSet(std::vector<std::string> symbols, std::vector<std::pair<double, double>> bounds,
              const ValidatorConfig& config)
        : symbols_(std::move(symbols)),
          bounds_(std::move(bounds)),
          halton_(symbols_.size(), config.seed),
          remaining_(config.samples)
    {
    }

    /// Returns false when exhausted; otherwise fills `point`.
    bool next(std::vector<double>& point)
    {
        const std::size_t n = symbols_.size();
        point.assign(n, 0.0);
        if (special_ <= n) {
            // index 0: origin; 1..n: unit basis (clamped into bounds)
            if (special_ > 0) {
                std::size_t k = special_ - 1;
                point[k] = std::min(1.0, bounds_[k].second);
            }
            for (std::size_t k = 0; k < n; ++k)
                point[k] = std::clamp(point[k], bounds_[k].first, bounds_[k].second);
            ++special_;
            return true;
        }
        if (remaining_ <= 0)
            return false;
        --remaining_;
        std::vector<double> u = halton_.next();
        for (std::size_t k = 0; k < n; ++k)
            point[k] = bounds_[k].first + u[k] * (bounds_[k].second - bounds_[k].first);
        return true;
    }

    const std::vector<std::string>& symbols() const { return symbols_; }

private:
    std::vector<std::string> symbols_;
    std::vector<std::pair<double, double>> bounds_;
    detail::HaltonSampler halton_;
    std::size_t special_ = 0;
    int remaining_ = 0;
};

std::pair<double, double> bounds_for(const std::string& symbol, bool entropy_effort,
                                     double theta0, const ValidatorConfig& config)
{
    auto it = config.bounds.find(symbol);
    if (it != config.bounds.end())
        return it->second;
    if (entropy_effort)
        return {-theta0 + std::min(1.0, theta0 / 2.0), theta0};
    return {config.default_lo, config.default_hi};
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

std::string format_sample(const std::vector<std::string>& symbols,
                          const std::vector<double>& point)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i > 0)
            out << ", ";
        out << symbols[i] << " = " << point[i];
    }
    return out.str();
}

/// Collects at most one witness per condition.
class ReportBuilder {
public:
    explicit ReportBuilder(std::string component) { report_.component = std::move(component); }

    void add(const std::string& condition, const std::string& detail)
    {
        if (seen_.insert(condition).second)
            report_.violations.push_back({condition, detail});
    }

    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
    std::set<std::string> seen_;
};

} // namespace

ValidationReport validate_reversible(const std::string& name, const ReversibleComponent& c,
                                     const ReferenceEnvironment& env,
                                     const QuantityRegistry& registry,
                                     const ValidatorConfig& config)
{
    check_reversible_structure(name, c, registry);
    ReportBuilder report(name);

    const std::vector<Slot> x1 = listed_slots(c.iface, c.x1);
    const std::vector<Slot> x2 = listed_slots(c.iface, c.x2);
    const std::size_t n1 = x1.size();
    const std::size_t n2 = x2.size();
    const ParityEnv parities = component_parity_env(c.iface);

    // Time-reversal invariance: -P(x1_i) = P(L_ij) P(x1_j) and
    // P(x1_i) = P(g_ik) P(x2_k) for every nonzero entry.
    if (c.gyrator) {
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n1; ++j) {
                const Expr& entry = c.gyrator->at(i, j);
                if (entry.is_zero())
                    continue;
                Parity p = entry.parity(parities);
                if (p == Parity::Indeterminate)
                    report.add("time-reversal parity (gyrator)",
                               "entry " + entry_str(i, j) + " = " + entry.str() +
                                   " has indeterminate parity");
                else if (-x1[i].quantity.parity != parity_int(p) * x1[j].quantity.parity)
                    report.add("time-reversal parity (gyrator)",
                               "entry " + entry_str(i, j) + " = " + entry.str() +
                                   ": -P(" + x1[i].port.str() + ") != P(entry) P(" +
                                   x1[j].port.str() + ")");
            }
    }
    if (c.transformer) {
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t k = 0; k < n2; ++k) {
                const Expr& entry = c.transformer->at(i, k);
                if (entry.is_zero())
                    continue;
                Parity p = entry.parity(parities);
                if (p == Parity::Indeterminate)
                    report.add("time-reversal parity (transformer)",
                               "entry " + entry_str(i, k) + " = " + entry.str() +
                                   " has indeterminate parity");
                else if (x1[i].quantity.parity != parity_int(p) * x2[k].quantity.parity)
                    report.add("time-reversal parity (transformer)",
                               "entry " + entry_str(i, k) + " = " + entry.str() +
                                   ": P(" + x1[i].port.str() + ") != P(entry) P(" +
                                   x2[k].port.str() + ")");
            }
    }

    // Sampled conditions: skew-symmetry and conservation of environment
    // quantities.
    std::vector<std::string> symbols;
    std::vector<std::pair<double, double>> bounds;
    for (const Slot& s : state_slots(c.iface)) {
        symbols.push_back(state_symbol(s.port, s.index, s.dim));
        bounds.push_back(bounds_for(symbols.back(), false, env.theta0(), config));
    }
    SampleSet samples(symbols, bounds, config);

    std::vector<double> point;
    std::size_t sample_index = 0;
    while (samples.next(point)) {
        Bindings bindings;
        bindings[kTheta0Symbol] = env.theta0();
        for (std::size_t i = 0; i < symbols.size(); ++i)
            bindings[symbols[i]] = point[i];

        std::vector<double> l;
        if (c.gyrator) {
            l = c.gyrator->eval(bindings);
            for (std::size_t i = 0; i < n1; ++i)
                for (std::size_t j = i + 1; j < n1; ++j)
                    if (std::abs(l[i * n1 + j] + l[j * n1 + i]) > 1e-12)
                        report.add("skew-symmetry",
                                   "entries " + entry_str(i, j) + "/" + entry_str(j, i) +
                                       " at sample " + std::to_string(sample_index) + " (" +
                                       format_sample(symbols, point) + ")");
        }
        std::vector<double> g;
        if (c.transformer)
            g = c.transformer->eval(bindings);

        for (std::size_t r = 0; r < env.ports().size(); ++r) {
            const EnvironmentPort& env_port = env.ports().value_at(r);
            std::vector<double> lambda1(n1, 0.0);
            bool any = false;
            for (std::size_t i = 0; i < n1; ++i)
                if (x1[i].quantity == env_port.quantity) {
                    lambda1[i] = env_port.intensive_value;
                    any = true;
                }
            if (!any)
                continue;
            const double tol = 1e-12 * (1.0 + max_abs(lambda1));
            if (c.gyrator) {
                for (std::size_t i = 0; i < n1; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n1; ++j)
                        acc += l[i * n1 + j] * lambda1[j];
                    if (std::abs(acc) > tol)
                        report.add("environment-quantity conservation (gyrator)",
                                   "quantity '" + env_port.quantity.label + "', row " +
                                       std::to_string(i + 1) + " at sample " +
                                       std::to_string(sample_index));
                }
            }
            if (c.transformer) {
                for (std::size_t k = 0; k < n2; ++k) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n1; ++i)
                        acc += g[i * n2 + k] * lambda1[i];
                    if (std::abs(acc) > tol)
                        report.add("environment-quantity conservation (transformer)",
                                   "quantity '" + env_port.quantity.label + "', column " +
                                       std::to_string(k + 1) + " at sample " +
                                       std::to_string(sample_index));
                }
            }
        }
        ++sample_index;
    }
    return report.take();
}

ValidationReport validate_irreversible(const std::string& name,
                                       const IrreversibleComponent& c,
                                       const ReferenceEnvironment& env,
                                       const QuantityRegistry& registry,
                                       const ValidatorConfig& config)
{
    check_irreversible_structure(name, c, registry);
    ReportBuilder report(name);

    const std::vector<Slot> slots = power_slots(c.iface);
    const std::size_t n = slots.size();
    const double theta0 = env.theta0();
    const ParityEnv parities = component_parity_env(c.iface);

    // Anti-time-reversal rule: P(x_i) = P(M_ij) P(x_j) for nonzero entries.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Expr& entry = c.onsager.at(i, j);
            if (entry.is_zero())
                continue;
            Parity p = entry.parity(parities);
            if (p == Parity::Indeterminate)
                report.add("anti-time-reversal parity",
                           "entry " + entry_str(i, j) + " = " + entry.str() +
                               " has indeterminate parity");
            else if (slots[i].quantity.parity != parity_int(p) * slots[j].quantity.parity)
                report.add("anti-time-reversal parity",
                           "entry " + entry_str(i, j) + " = " + entry.str() + ": P(" +
                               slots[i].port.str() + ") != P(entry) P(" +
                               slots[j].port.str() + ")");
        }

    // Effort samples (entropy slots stay above -theta0 so temperatures are
    // positive) plus state samples for state-modulated entries.
    std::vector<std::string> symbols;
    std::vector<std::pair<double, double>> bounds;
    std::vector<std::size_t> effort_slot_index; // position of slot i in `symbols`
    for (const Slot& s : slots) {
        effort_slot_index.push_back(symbols.size());
        symbols.push_back(effort_symbol(s.port, s.index, s.dim));
        bounds.push_back(bounds_for(symbols.back(), s.quantity.label == kEntropyLabel,
                                    theta0, config));
    }
    std::set<std::string> referenced;
    for (const Expr& e : c.onsager.entries)
        e.collect_symbols(referenced);
    for (const Slot& s : state_slots(c.iface)) {
        std::string sym = state_symbol(s.port, s.index, s.dim);
        if (referenced.count(sym)) {
            symbols.push_back(sym);
            bounds.push_back(bounds_for(sym, false, theta0, config));
        }
    }
    SampleSet samples(symbols, bounds, config);

    // lambda(I) over the power slots, and per-quantity vectors for the
    // non-entropy conservation condition.
    std::vector<double> lambda(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        lambda[i] = env.lambda_of(slots[i].quantity);

    std::vector<double> point;
    std::size_t sample_index = 0;
    while (samples.next(point)) {
        Bindings bindings;
        bindings[kTheta0Symbol] = theta0;
        for (std::size_t i = 0; i < symbols.size(); ++i)
            bindings[symbols[i]] = point[i];
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i)
            e[i] = point[effort_slot_index[i]];

        const std::vector<double> m = c.onsager.eval(bindings);
        const double scale = max_abs(m);

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(m[i * n + j] - m[j * n + i]) > 1e-12 * (1.0 + scale))
                    report.add("symmetry", "entries " + entry_str(i, j) + "/" +
                                               entry_str(j, i) + " differ at sample " +
                                               std::to_string(sample_index) + " (" +
                                               format_sample(symbols, point) + ")");

        std::vector<double> sym_m(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                sym_m[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
        const std::vector<double> eig = detail::symmetric_eigenvalues(sym_m, n);
        if (!eig.empty() && eig.front() < -1e-10 * scale)
            report.add("non-negative definiteness",
                       "smallest eigenvalue " + std::to_string(eig.front()) +
                           " at sample " + std::to_string(sample_index) + " (" +
                           format_sample(symbols, point) + ")");

        const double energy_tol = 1e-12 * (1.0 + max_abs(lambda) + max_abs(e) + scale);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += m[i * n + j] * (lambda[j] + e[j]);
            if (std::abs(acc) > energy_tol)
                report.add("energy conservation",
                           "row " + std::to_string(i + 1) + ": M(e)(lambda + e) = " +
                               std::to_string(acc) + " at sample " +
                               std::to_string(sample_index) + " (" +
                               format_sample(symbols, point) + ")");
        }

        for (std::size_t r = 0; r < env.ports().size(); ++r) {
            const EnvironmentPort& env_port = env.ports().value_at(r);
            if (env_port.quantity.label == kEntropyLabel)
                continue;
            std::vector<double> lambda_r(n, 0.0);
            bool any = false;
            for (std::size_t i = 0; i < n; ++i)
                if (slots[i].quantity == env_port.quantity) {
                    lambda_r[i] = env_port.intensive_value;
                    any = true;
                }
            if (!any)
                continue;
            const double tol = 1e-12 * (1.0 + max_abs(lambda_r) + scale);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += m[i * n + j] * lambda_r[j];
                if (std::abs(acc) > tol)
                    report.add("environment-quantity conservation",
                               "quantity '" + env_port.quantity.label + "', row " +
                                   std::to_string(i + 1) + " at sample " +
                                   std::to_string(sample_index));
            }
        }
        ++sample_index;
    }
    return report.take();
}

} // namespace ephs
