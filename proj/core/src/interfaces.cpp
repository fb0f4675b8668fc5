#include "ephs/interfaces.hpp"

namespace ephs {

Interface sum_interfaces(const Package<Interface>& parts)
{
    return named_sum(parts);
}

bool is_subinterface(const Interface& a, const Interface& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        const PortAttr* attr = b.find(a.name_at(i));
        if (attr == nullptr || !(*attr == a.value_at(i)))
            return false;
    }
    return true;
}

Interface environment_interface(const ReferenceEnvironment& env)
{
    std::vector<std::pair<Name, PortAttr>> entries;
    const auto& ports = env.ports();
    for (std::size_t i = 0; i < ports.size(); ++i)
        entries.emplace_back(ports.name_at(i),
                             PortAttr{ports.value_at(i).quantity, PortKind::Power});
    return Interface::make(std::move(entries));
}

PortLayout build_layout(const Interface& iface, const QuantityRegistry& registry)
{
    PortLayout layout;
    layout.ports.reserve(iface.size());
    for (std::size_t i = 0; i < iface.size(); ++i) {
        const PortAttr& attr = iface.value_at(i);
        if (!registry.contains(attr.quantity))
            throw UnknownQuantityError(attr.quantity.label);
        PortSlice slice;
        slice.state_offset = layout.state_dim;
        slice.dim = static_cast<std::size_t>(attr.quantity.dim());
        if (attr.kind == PortKind::Power) {
            slice.power_offset = layout.power_dim;
            layout.power_dim += slice.dim;
        }
        layout.state_dim += slice.dim;
        layout.ports.push_back(slice);
    }
    return layout;
}

} // namespace ephs
