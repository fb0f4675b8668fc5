#include "ephs/quantities.hpp"

namespace ephs {

QuantityRegistry QuantityRegistry::builtin()
{
    QuantityRegistry r;
    r.add({"displacement", {1}, +1});
    r.add({"momentum", {1}, -1});
    r.add({kEntropyLabel, {1}, +1});
    r.add({"volume", {1}, +1});
    r.add({"charge", {1}, +1});
    r.add({"flux_linkage", {1}, -1});
    r.add({"angular_momentum", {1}, -1});
    r.add({"mass", {1}, +1});
    return r;
}

void QuantityRegistry::add(Quantity q)
{
    if (q.space.dimension < 1)
        throw Error("quantity '" + q.label + "': dimension must be >= 1");
    if (q.parity != +1 && q.parity != -1)
        throw Error("quantity '" + q.label + "': parity must be +1 or -1");
    if (find(q.label) != nullptr)
        throw Error("quantity '" + q.label + "' already registered");
    quantities_.push_back(std::move(q));
}

const Quantity* QuantityRegistry::find(const std::string& label) const
{
    for (const auto& q : quantities_)
        if (q.label == label)
            return &q;
    return nullptr;
}

const Quantity& QuantityRegistry::get(const std::string& label) const
{
    if (const Quantity* q = find(label))
        return *q;
    throw UnknownQuantityError(label);
}

bool QuantityRegistry::contains(const Quantity& q) const
{
    const Quantity* found = find(q.label);
    return found != nullptr && *found == q;
}

ReferenceEnvironment ReferenceEnvironment::standard()
{
    return of(Package<EnvironmentPort>::make({
        {Name{"s"}, EnvironmentPort{{kEntropyLabel, {1}, +1}, 298.15}},
        {Name{"v"}, EnvironmentPort{{"volume", {1}, +1}, -101325.0}},
    }));
}

ReferenceEnvironment ReferenceEnvironment::of(Package<EnvironmentPort> ports)
{
    bool has_entropy = false;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const EnvironmentPort& p = ports.value_at(i);
        if (p.quantity.dim() != 1)
            throw Error("environment port '" + ports.name_at(i).str() +
                        "': quantity must be one-dimensional");
        for (std::size_t j = i + 1; j < ports.size(); ++j)
            if (p.quantity == ports.value_at(j).quantity)
                throw Error("environment: quantity '" + p.quantity.label +
                            "' appears on more than one port");
        if (p.quantity.label == kEntropyLabel) {
            if (!(p.intensive_value > 0.0))
                throw Error("environment: reference temperature must be positive");
            has_entropy = true;
        }
    }
    if (!has_entropy)
        throw Error("environment: an entropy port is required");
    ReferenceEnvironment env;
    env.ports_ = std::move(ports);
    return env;
}

double ReferenceEnvironment::theta0() const
{
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_.value_at(i).quantity.label == kEntropyLabel)
            return ports_.value_at(i).intensive_value;
    throw Error("environment: missing entropy port");
}

double ReferenceEnvironment::lambda_of(const Quantity& quantity) const
{
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_.value_at(i).quantity == quantity)
            return ports_.value_at(i).intensive_value;
    return 0.0;
}

double ReferenceEnvironment::lambda_of(const Quantity& quantity, const Name& ref_port) const
{
    const EnvironmentPort* p = ports_.find(ref_port);
    if (p == nullptr)
        throw UnknownRefPortError(ref_port);
    return p->quantity == quantity ? p->intensive_value : 0.0;
}

} // namespace ephs
