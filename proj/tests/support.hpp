#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "ephs/model.hpp"

namespace ephs::test {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string model_path(const std::string& name)
{
    return std::string(EPHS_MODELS_DIR) + "/" + name;
}

inline ModelDocument load_model(const std::string& name)
{
    return parse_model(read_file(model_path(name)));
}

/// Closed-form equations of the shunt-motor model, used as an independent
/// oracle for the assembled evaluation plan. State (b_s, b, p, s), inputs
/// supply voltage E and load torque M_load.
struct MotorParams {
    double l_s = 1.0;
    double l_r = 1.0;
    double r_s = 1.0;
    double r_r = 1.0;
    double j_r = 1.0;
    double d_r = 1.0;
    double theta0 = 298.15;
};

struct MotorOracle {
    std::array<double, 4> xdot;
    double q_f;   // current drawn from the supply
    double omega; // angular velocity (the unbound partner of the load port)
};

inline MotorOracle motor_oracle(const std::array<double, 4>& x, double supply_voltage,
                                double load_torque, const MotorParams& p = {})
{
    const double b_s = x[0];
    const double b = x[1];
    const double momentum = x[2];
    const double i_s = b_s / p.l_s;
    const double i_r = b / p.l_r;
    const double omega = momentum / p.j_r;
    MotorOracle out;
    out.xdot[0] = supply_voltage - p.r_s * i_s;
    out.xdot[1] = supply_voltage - b_s * omega - p.r_r * i_r;
    out.xdot[2] = b_s * i_r - p.d_r * omega + load_torque;
    out.xdot[3] =
        (p.r_s * i_s * i_s + p.r_r * i_r * i_r + p.d_r * omega * omega) / p.theta0;
    out.q_f = i_s + i_r;
    out.omega = omega;
    return out;
}

/// Closed-form right-hand side of the isolated nonisothermal oscillator
/// (spring 1, mass 1, friction 0.3, thermal capacity 2 at 298.15 K, heat
/// transfer 0.5). State order matches the assembled model: (s_tc, p, q,
/// s_env).
inline std::array<double, 4> oscillator_oracle(const std::array<double, 4>& x)
{
    const double d = 0.3;
    const double alpha = 0.5;
    const double theta0 = 298.15;
    const double s_tc = x[0];
    const double velocity = x[1]; // unit mass
    const double q = x[2];
    const double theta1 = 298.15 * std::exp(s_tc / 2.0);
    std::array<double, 4> xdot;
    xdot[0] = (d * velocity * velocity + alpha * (theta0 - theta1)) / theta1;
    xdot[1] = -q - d * velocity;
    xdot[2] = velocity;
    xdot[3] = alpha * (theta1 - theta0) / theta0;
    return xdot;
}

inline double rel_err(double actual, double expected)
{
    return std::abs(actual - expected) / (1.0 + std::abs(expected));
}

inline std::size_t index_of(const std::vector<std::string>& names, const std::string& name)
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return i;
    throw Error("no entry named '" + name + "'");
}

// ---- random generators for property tests -----------------------------

inline Name random_name(std::mt19937_64& rng, int max_segments = 3)
{
    static const char* pool[] = {"a", "b", "c", "x", "y", "p1", "q2", "s"};
    std::uniform_int_distribution<int> len(0, max_segments);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pool) - 1);
    std::vector<std::string> segments;
    int n = len(rng);
    for (int i = 0; i < n; ++i)
        segments.emplace_back(pool[pick(rng)]);
    return Name(segments);
}

inline Name random_nonempty_name(std::mt19937_64& rng, int max_segments = 3)
{
    Name n = random_name(rng, max_segments);
    while (n.empty())
        n = random_name(rng, max_segments);
    return n;
}

/// Random point on a pattern's junction relation: shared state and effort
/// per junction, random inner flows with the balance solved for the outer
/// flow (or folded into the last inner flow).
inline PortAssignment random_satisfying_assignment(const JunctionRelation& relation,
                                                   std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    PortAssignment vars;
    for (const auto& j : relation.junctions) {
        const std::size_t dim = static_cast<std::size_t>(j.quantity.dim());
        std::vector<double> x(dim);
        std::vector<double> e(dim);
        for (auto& v : x)
            v = value(rng);
        for (auto& v : e)
            v = value(rng);
        for (const auto& m : j.all_members)
            vars[m].x = x;
        std::vector<double> inner_sum(dim, 0.0);
        for (const auto& m : j.inner_power) {
            PortVars& pv = vars[m];
            pv.e = e;
            pv.f.resize(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                pv.f[k] = value(rng);
                inner_sum[k] += pv.f[k];
            }
        }
        if (!j.outer_power.empty()) {
            PortVars& pv = vars[j.outer_power.front()];
            pv.e = e;
            pv.f = inner_sum;
        } else if (!j.inner_power.empty()) {
            PortVars& pv = vars[j.inner_power.back()];
            for (std::size_t k = 0; k < dim; ++k) {
                inner_sum[k] -= pv.f[k];
                pv.f[k] = -inner_sum[k];
            }
        }
    }
    return vars;
}

/// Membership in the composition of the host and guest relations at `box`:
/// the boundary port variables are determined by the guest's junction
/// equations, then both relations are checked.
inline bool composed_membership(const InterconnectionPattern& host, const Name& box,
                                const InterconnectionPattern& guest,
                                const PortAssignment& flat_vars, double tol = 1e-9)
{
    // Guest-side assignment from the flat sample.
    PortAssignment guest_vars;
    const Interface guest_inner = guest.inner_interface();
    for (std::size_t i = 0; i < guest_inner.size(); ++i) {
        PortRef flat_key = inner_port(concat(box, guest_inner.name_at(i)));
        auto it = flat_vars.find(flat_key);
        if (it == flat_vars.end())
            throw Error("composed_membership: missing '" + flat_key.str() + "'");
        guest_vars[inner_port(guest_inner.name_at(i))] = it->second;
    }
    // Boundary variables: shared state/effort from the guest junction, flow
    // from the guest's net-flow balance.
    JunctionRelation guest_rel = junction_relation(guest);
    for (const auto& j : guest_rel.junctions) {
        if (j.outer_power.empty() && j.state_only.empty())
            continue;
        const std::size_t dim = static_cast<std::size_t>(j.quantity.dim());
        for (const auto& m : j.all_members) {
            if (m.side != PortRef::Side::Outer)
                continue;
            PortVars mid;
            for (const auto& src : j.all_members)
                if (src.side == PortRef::Side::Inner) {
                    mid.x = guest_vars.at(src).x;
                    break;
                }
            bool is_power = false;
            for (const auto& op : j.outer_power)
                is_power = is_power || op == m;
            if (is_power) {
                mid.f.assign(dim, 0.0);
                for (const auto& src : j.inner_power)
                    for (std::size_t k = 0; k < dim; ++k)
                        mid.f[k] += guest_vars.at(src).f[k];
                mid.e.assign(dim, 0.0);
                if (!j.inner_power.empty())
                    mid.e = guest_vars.at(j.inner_power.front()).e;
            }
            guest_vars[m] = mid;
        }
    }
    if (!satisfies(guest_rel, guest_vars, tol))
        return false;

    // Host-side assignment: the box ports take the boundary values.
    PortAssignment host_vars;
    const Interface host_inner = host.inner_interface();
    for (std::size_t i = 0; i < host_inner.size(); ++i) {
        const Name& n = host_inner.name_at(i);
        if (is_prefix(box, n, true)) {
            std::vector<std::string> rest(n.segments().begin() + box.size(),
                                          n.segments().end());
            host_vars[inner_port(n)] = guest_vars.at(outer_port(Name(rest)));
        } else {
            host_vars[inner_port(n)] = flat_vars.at(inner_port(n));
        }
    }
    for (std::size_t i = 0; i < host.outer().size(); ++i) {
        PortRef key = outer_port(host.outer().name_at(i));
        host_vars[key] = flat_vars.at(key);
    }
    return satisfies(junction_relation(host), host_vars, tol);
}

/// Random namespace built by rejection: candidates that would break
/// prefix-freeness are skipped.
inline Namespace random_namespace(std::mt19937_64& rng, int max_names = 5)
{
    std::uniform_int_distribution<int> count(0, max_names);
    std::vector<Name> names;
    int target = count(rng);
    for (int attempt = 0; attempt < 10 * target && static_cast<int>(names.size()) < target;
         ++attempt) {
        Name candidate = random_name(rng);
        bool clash = false;
        for (const Name& n : names)
            clash = clash || is_prefix(n, candidate) || is_prefix(candidate, n);
        if (!clash)
            names.push_back(candidate);
    }
    return Namespace::of(std::move(names));
}

} // namespace ephs::test
