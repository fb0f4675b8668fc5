#include "ephs/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ephs {

std::string Junction::id() const
{
    if (members.empty())
        return "(empty)";
    return members.front().str();
}

namespace {

void canonicalize(std::vector<Junction>& junctions)
{
    for (auto& j : junctions)
        std::sort(j.members.begin(), j.members.end());
    std::sort(junctions.begin(), junctions.end(), [](const Junction& a, const Junction& b) {
        return a.members < b.members;
    });
}

} // namespace

InterconnectionPattern
InterconnectionPattern::validated(Package<Interface> inner, Interface outer,
                                  std::vector<Junction> junctions)
{
    canonicalize(junctions);

    InterconnectionPattern p;
    p.inner_ = std::move(inner);
    p.outer_ = std::move(outer);
    p.junctions_ = std::move(junctions);

    const Interface inner_sum = p.inner_interface();

    // Partition check: every port covered exactly once, no stray members.
    std::map<PortRef, std::size_t> seen;
    for (const auto& j : p.junctions_) {
        if (j.members.empty())
            throw PatternError("junction partition: empty block");
        for (const auto& m : j.members)
            if (++seen[m] > 1)
                throw PatternError("junction partition: port '" + m.str() +
                                   "' appears in more than one junction");
    }
    auto require_covered = [&](const PortRef& ref) {
        if (seen.find(ref) == seen.end())
            throw PatternError("junction partition: port '" + ref.str() +
                               "' is not connected to any junction");
    };
    for (std::size_t i = 0; i < inner_sum.size(); ++i)
        require_covered(inner_port(inner_sum.name_at(i)));
    for (std::size_t i = 0; i < p.outer_.size(); ++i)
        require_covered(outer_port(p.outer_.name_at(i)));
    std::size_t total = inner_sum.size() + p.outer_.size();
    if (seen.size() != total)
        throw PatternError("junction partition: unknown port among the members");

    for (const auto& j : p.junctions_) {
        std::size_t inner_count = 0;
        std::size_t outer_count = 0;
        const Quantity* quantity = nullptr;
        for (const auto& m : j.members) {
            const PortAttr& attr = m.side == PortRef::Side::Inner
                                       ? inner_sum.at(m.name)
                                       : p.outer_.at(m.name);
            if (m.side == PortRef::Side::Inner)
                ++inner_count;
            else
                ++outer_count;
            if (quantity == nullptr)
                quantity = &attr.quantity;
            else if (!(*quantity == attr.quantity))
                throw PatternError("junction '" + j.id() +
                                   "': ports carry different quantities ('" +
                                   quantity->label + "' vs '" + attr.quantity.label +
                                   "')");
        }
        if (inner_count == 0)
            throw PatternError("junction '" + j.id() + "': no inner port connected");
        if (outer_count > 1)
            throw PatternError("junction '" + j.id() +
                               "': more than one outer port connected");
    }
    return p;
}

const PortAttr& InterconnectionPattern::attr_of(const PortRef& ref) const
{
    if (ref.side == PortRef::Side::Outer)
        return outer_.at(ref.name);
    // Inner member names are box-path * port; find the box by prefix.
    for (std::size_t i = 0; i < inner_.size(); ++i) {
        const Name& box = inner_.name_at(i);
        if (is_prefix(box, ref.name)) {
            std::vector<std::string> rest(ref.name.segments().begin() + box.size(),
                                          ref.name.segments().end());
            if (const PortAttr* attr = inner_.value_at(i).find(Name(rest)))
                return *attr;
        }
    }
    throw PatternError("no port named '" + ref.str() + "'");
}

InterconnectionPattern substitute(const InterconnectionPattern& host, const Name& box,
                                  const InterconnectionPattern& guest,
                                  const std::map<Name, Name>& renaming)
{
    const Interface* box_iface = host.inner().find(box);
    if (box_iface == nullptr)
        throw UnknownBoxError(box);

    // The guest's outer ports must map one-to-one onto the box ports with
    // identical attributes.
    auto rename = [&](const Name& guest_port) {
        auto it = renaming.find(guest_port);
        return it == renaming.end() ? guest_port : it->second;
    };
    if (guest.outer().size() != box_iface->size())
        throw InterfaceMismatchError(
            "substitute: guest exposes " + std::to_string(guest.outer().size()) +
            " ports but box '" + box.str() + "' has " +
            std::to_string(box_iface->size()));
    std::map<Name, Name> host_port_of; // box port -> guest outer port
    for (std::size_t i = 0; i < guest.outer().size(); ++i) {
        const Name& guest_port = guest.outer().name_at(i);
        Name target = rename(guest_port);
        const PortAttr* expected = box_iface->find(target);
        if (expected == nullptr)
            throw InterfaceMismatchError("substitute: box '" + box.str() +
                                         "' has no port named '" + target.str() + "'");
        if (!(*expected == guest.outer().value_at(i)))
            throw InterfaceMismatchError("substitute: attribute mismatch on port '" +
                                         target.str() + "' of box '" + box.str() + "'");
        if (!host_port_of.emplace(target, guest_port).second)
            throw InterfaceMismatchError("substitute: two guest ports map to '" +
                                         target.str() + "'");
    }

    // New inner package: host boxes minus `box`, plus guest boxes prefixed.
    std::vector<std::pair<Name, Interface>> inner_entries;
    for (std::size_t i = 0; i < host.inner().size(); ++i)
        if (host.inner().name_at(i) != box)
            inner_entries.emplace_back(host.inner().name_at(i), host.inner().value_at(i));
    for (std::size_t i = 0; i < guest.inner().size(); ++i)
        inner_entries.emplace_back(concat(box, guest.inner().name_at(i)),
                                   guest.inner().value_at(i));
    Package<Interface> inner = Package<Interface>::make(std::move(inner_entries));

    // Merge junctions: boundary ports disappear; the host junction holding
    // box*p and the guest junction holding outer p are identified.
    struct Block {
        std::vector<PortRef> members;
    };
    std::vector<Block> blocks;
    std::map<Name, std::size_t> host_block_of_box_port; // box port -> block index
    std::map<Name, std::size_t> guest_block_of_outer;   // guest outer port -> block index

    for (const auto& j : host.junctions()) {
        Block b;
        for (const auto& m : j.members) {
            if (m.side == PortRef::Side::Inner && is_prefix(box, m.name, true)) {
                std::vector<std::string> rest(m.name.segments().begin() + box.size(),
                                              m.name.segments().end());
                host_block_of_box_port[Name(rest)] = blocks.size();
            } else {
                b.members.push_back(m);
            }
        }
        blocks.push_back(std::move(b));
    }
    for (const auto& j : guest.junctions()) {
        Block b;
        for (const auto& m : j.members) {
            if (m.side == PortRef::Side::Outer)
                guest_block_of_outer[m.name] = blocks.size();
            else
                b.members.push_back(inner_port(concat(box, m.name)));
        }
        blocks.push_back(std::move(b));
    }

    // Union-find over blocks.
    std::vector<std::size_t> parent(blocks.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (const auto& [box_port, guest_outer] : host_port_of) {
        auto hit = host_block_of_box_port.find(box_port);
        auto git = guest_block_of_outer.find(guest_outer);
        if (hit == host_block_of_box_port.end())
            throw PatternError("substitute: box port '" + box_port.str() +
                               "' not connected in the host pattern");
        if (git == guest_block_of_outer.end())
            throw PatternError("substitute: guest outer port '" + guest_outer.str() +
                               "' not connected in the guest pattern");
        parent[find(hit->second)] = find(git->second);
    }

    std::map<std::size_t, Junction> merged;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& target = merged[find(i)];
        target.members.insert(target.members.end(), blocks[i].members.begin(),
                              blocks[i].members.end());
    }
    std::vector<Junction> junctions;
    junctions.reserve(merged.size());
    for (auto& [root, j] : merged)
        junctions.push_back(std::move(j));

    return InterconnectionPattern::validated(std::move(inner), host.outer(),
                                             std::move(junctions));
}

JunctionRelation junction_relation(const InterconnectionPattern& pattern)
{
    JunctionRelation relation;
    const Interface inner_sum = pattern.inner_interface();
    for (const auto& j : pattern.junctions()) {
        JunctionEquations eq;
        eq.id = j.id();
        eq.all_members = j.members;
        for (const auto& m : j.members) {
            const PortAttr& attr = m.side == PortRef::Side::Inner
                                       ? inner_sum.at(m.name)
                                       : pattern.outer().at(m.name);
            eq.quantity = attr.quantity;
            if (attr.kind == PortKind::State)
                eq.state_only.push_back(m);
            else if (m.side == PortRef::Side::Inner)
                eq.inner_power.push_back(m);
            else
                eq.outer_power.push_back(m);
        }
        relation.junctions.push_back(std::move(eq));
    }
    return relation;
}

namespace {

const PortVars& vars_of(const PortAssignment& a, const PortRef& ref)
{
    auto it = a.find(ref);
    if (it == a.end())
        throw Error("port assignment: missing variables for '" + ref.str() + "'");
    return it->second;
}

} // namespace

bool satisfies(const JunctionRelation& relation, const PortAssignment& assignment,
               double tol)
{
    for (const auto& j : relation.junctions) {
        const std::size_t dim = static_cast<std::size_t>(j.quantity.dim());
        // Equality of state over all members.
        const PortVars& first = vars_of(assignment, j.all_members.front());
        for (const auto& m : j.all_members) {
            const PortVars& v = vars_of(assignment, m);
            if (v.x.size() != dim)
                return false;
            for (std::size_t k = 0; k < dim; ++k)
                if (std::abs(v.x[k] - first.x[k]) > tol)
                    return false;
        }
        // Equality of effort over power ports.
        const PortVars* ref = nullptr;
        for (const auto& list : {j.inner_power, j.outer_power})
            for (const auto& m : list) {
                const PortVars& v = vars_of(assignment, m);
                if (v.e.size() != dim || v.f.size() != dim)
                    return false;
                if (ref == nullptr)
                    ref = &v;
                else
                    for (std::size_t k = 0; k < dim; ++k)
                        if (std::abs(v.e[k] - ref->e[k]) > tol)
                            return false;
            }
        // Net flow: inner sum equals outer sum.
        for (std::size_t k = 0; k < dim; ++k) {
            double lhs = 0.0;
            for (const auto& m : j.inner_power)
                lhs += vars_of(assignment, m).f[k];
            double rhs = 0.0;
            for (const auto& m : j.outer_power)
                rhs += vars_of(assignment, m).f[k];
            if (std::abs(lhs - rhs) > tol)
                return false;
        }
    }
    return true;
}

std::string to_dot(const InterconnectionPattern& pattern, const std::string& title)
{
    std::ostringstream out;
    out << "graph \"" << title << "\" {\n";
    out << "  layout=neato;\n  overlap=false;\n";
    for (std::size_t i = 0; i < pattern.inner().size(); ++i)
        out << "  \"box:" << pattern.inner().name_at(i).str() << "\" [shape=circle, label=\""
            << pattern.inner().name_at(i).str() << "\"];\n";
    for (std::size_t i = 0; i < pattern.outer().size(); ++i)
        out << "  \"outer:" << pattern.outer().name_at(i).str() << "\" [shape=none, label=\""
            << pattern.outer().name_at(i).str() << "\"];\n";
    const Interface inner_sum = pattern.inner_interface();
    for (const auto& j : pattern.junctions()) {
        std::string jid = "junction:" + j.id();
        out << "  \"" << jid << "\" [shape=point];\n";
        for (const auto& m : j.members) {
            const PortAttr& attr = m.side == PortRef::Side::Inner
                                       ? inner_sum.at(m.name)
                                       : pattern.outer().at(m.name);
            std::string style = attr.kind == PortKind::State ? " [style=dashed" : " [";
            if (m.side == PortRef::Side::Inner) {
                // The owning box is the longest inner-box prefix of the port name.
                Name box;
                for (std::size_t i = 0; i < pattern.inner().size(); ++i)
                    if (is_prefix(pattern.inner().name_at(i), m.name, true) &&
                        pattern.inner().name_at(i).size() > box.size())
                        box = pattern.inner().name_at(i);
                std::vector<std::string> rest(m.name.segments().begin() + box.size(),
                                              m.name.segments().end());
                out << "  \"box:" << box.str() << "\" -- \"" << jid << "\""
                    << style << (attr.kind == PortKind::State ? ", " : "")
                    << "label=\"" << Name(rest).str() << "\"];\n";
            } else {
                out << "  \"outer:" << m.name.str() << "\" -- \"" << jid << "\""
                    << (attr.kind == PortKind::State ? " [style=dashed];" : ";") << "\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace ephs
