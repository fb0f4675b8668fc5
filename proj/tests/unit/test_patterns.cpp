#include <doctest.h>

#include <set>

#include "../support.hpp"

using namespace ephs;

namespace {

const QuantityRegistry& reg()
{
    static QuantityRegistry r = QuantityRegistry::builtin();
    return r;
}

Interface make_iface(std::vector<std::tuple<const char*, const char*, PortKind>> ports)
{
    std::vector<std::pair<Name, PortAttr>> entries;
    for (auto& [name, quantity, kind] : ports)
        entries.emplace_back(Name::parse(name), PortAttr{reg().get(quantity), kind});
    return Interface::make(std::move(entries));
}

Junction junction(std::vector<std::pair<const char*, PortRef::Side>> members)
{
    Junction j;
    for (auto& [name, side] : members)
        j.members.push_back({side, Name::parse(name)});
    return j;
}

constexpr auto In = PortRef::Side::Inner;
constexpr auto Out = PortRef::Side::Outer;

std::set<std::set<std::string>> partition_of(const std::vector<Junction>& junctions)
{
    std::set<std::set<std::string>> partition;
    for (const auto& j : junctions) {
        std::set<std::string> block;
        for (const auto& m : j.members)
            block.insert((m.side == In ? "inner:" : "outer:") + m.str());
        partition.insert(std::move(block));
    }
    return partition;
}

} // namespace

TEST_CASE("the isothermal oscillator pattern validates with the expected partition")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const PatternDef* def = doc.find_pattern("isothermal_osc");
    REQUIRE(def != nullptr);
    auto partition = partition_of(def->pattern.junctions());
    std::set<std::set<std::string>> expected{
        {"inner:spring.q", "inner:pkc.q"},
        {"inner:mass.p", "inner:pkc.p", "inner:damping.p", "outer:p"},
        {"inner:env.s", "inner:damping.s"}};
    CHECK(partition == expected);
}

TEST_CASE("pattern validation rejects each failure mode")
{
    Interface spring = make_iface({{"q", "displacement", PortKind::Power}});
    Interface outer_q = make_iface({{"q", "displacement", PortKind::Power}});
    auto inner = Package<Interface>::make({{Name::parse("spring"), spring}});

    SUBCASE("junction with only the outer port")
    {
        CHECK_THROWS_WITH_AS(
            InterconnectionPattern::validated(
                inner, outer_q,
                {junction({{"spring.q", In}}), junction({{"q", Out}})}),
            doctest::Contains("no inner port"), PatternError);
    }
    SUBCASE("quantity mismatch at a junction")
    {
        Interface env = make_iface({{"s", "entropy", PortKind::Power}});
        auto two = Package<Interface>::make(
            {{Name::parse("spring"), spring}, {Name::parse("env"), env}});
        CHECK_THROWS_WITH_AS(
            InterconnectionPattern::validated(
                two, Interface{},
                {junction({{"spring.q", In}, {"env.s", In}})}),
            doctest::Contains("different quantities"), PatternError);
    }
    SUBCASE("two outer ports on one junction")
    {
        Interface outer2 = make_iface({{"q1", "displacement", PortKind::Power},
                                       {"q2", "displacement", PortKind::Power}});
        CHECK_THROWS_WITH_AS(
            InterconnectionPattern::validated(
                inner, outer2,
                {junction({{"spring.q", In}, {"q1", Out}, {"q2", Out}})}),
            doctest::Contains("more than one outer port"), PatternError);
    }
    SUBCASE("not a partition: port uncovered")
    {
        CHECK_THROWS_WITH_AS(
            InterconnectionPattern::validated(inner, outer_q,
                                              {junction({{"spring.q", In}})}),
            doctest::Contains("not connected"), PatternError);
    }
    SUBCASE("not a partition: port in two junctions")
    {
        CHECK_THROWS_WITH_AS(
            InterconnectionPattern::validated(
                inner, outer_q,
                {junction({{"spring.q", In}, {"q", Out}}),
                 junction({{"spring.q", In}})}),
            doctest::Contains("more than one junction"), PatternError);
    }
    SUBCASE("not a partition: unknown member")
    {
        CHECK_THROWS_AS(InterconnectionPattern::validated(
                            inner, outer_q,
                            {junction({{"spring.q", In}, {"q", Out}}),
                             junction({{"ghost.p", In}})}),
                        PatternError);
    }
}

TEST_CASE("substituting the damper into the oscillator yields the nonisothermal pattern")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    const InterconnectionPattern& damper = doc.find_pattern("damper_pat")->pattern;

    InterconnectionPattern result = substitute(osc, Name::parse("damping"), damper);

    std::set<std::string> boxes;
    for (const Name& n : result.inner().names())
        boxes.insert(n.str());
    CHECK(boxes == std::set<std::string>{"spring", "pkc", "mass", "damping.mf",
                                         "damping.tc", "damping.ht", "env"});

    auto partition = partition_of(result.junctions());
    std::set<std::set<std::string>> expected{
        {"inner:spring.q", "inner:pkc.q"},
        {"inner:mass.p", "inner:pkc.p", "inner:damping.mf.p", "outer:p"},
        {"inner:damping.mf.s", "inner:damping.tc.s", "inner:damping.ht.s_1"},
        {"inner:env.s", "inner:damping.ht.s_2"}};
    CHECK(partition == expected);
}

TEST_CASE("substitution errors")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    const InterconnectionPattern& damper = doc.find_pattern("damper_pat")->pattern;
    CHECK_THROWS_AS(substitute(osc, Name::parse("nonexistent"), damper), UnknownBoxError);
    // damper's outer does not match the spring box
    CHECK_THROWS_AS(substitute(osc, Name::parse("spring"), damper),
                    InterfaceMismatchError);
}

TEST_CASE("substituting a wrapper pattern only renames the box")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    Interface damper_iface = *doc.find_interface("damper_iface");

    // Wrapper: one box `d` whose junctions expose every port one-to-one.
    InterconnectionPattern wrapper = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("d"), damper_iface}}), damper_iface,
        {junction({{"d.p", In}, {"p", Out}}), junction({{"d.s", In}, {"s", Out}})});

    InterconnectionPattern result = substitute(osc, Name::parse("damping"), wrapper);
    auto partition = partition_of(result.junctions());
    std::set<std::set<std::string>> expected{
        {"inner:spring.q", "inner:pkc.q"},
        {"inner:mass.p", "inner:pkc.p", "inner:damping.d.p", "outer:p"},
        {"inner:env.s", "inner:damping.d.s"}};
    CHECK(partition == expected);
}

TEST_CASE("substitution with explicit port renaming")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    Interface renamed_outer = make_iface(
        {{"kin", "momentum", PortKind::Power}, {"th", "entropy", PortKind::Power}});
    Interface mf = make_iface(
        {{"p", "momentum", PortKind::Power}, {"s", "entropy", PortKind::Power}});
    InterconnectionPattern guest = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("mf"), mf}}), renamed_outer,
        {junction({{"mf.p", In}, {"kin", Out}}), junction({{"mf.s", In}, {"th", Out}})});

    // identity naming fails, the explicit map succeeds
    CHECK_THROWS_AS(substitute(osc, Name::parse("damping"), guest),
                    InterfaceMismatchError);
    std::map<Name, Name> renaming{{Name::parse("kin"), Name::parse("p")},
                                  {Name::parse("th"), Name::parse("s")}};
    InterconnectionPattern result =
        substitute(osc, Name::parse("damping"), guest, renaming);
    CHECK(result.inner().names().contains(Name::parse("damping.mf")));
}

TEST_CASE("substitution is associative on nested patterns")
{
    // host H: box a with interface {p,s}; guest G1: refines a into box b with
    // the same interface; guest G2: a two-box refinement of b.
    Interface ab = make_iface(
        {{"p", "momentum", PortKind::Power}, {"s", "entropy", PortKind::Power}});
    Interface outer_h = make_iface({{"p", "momentum", PortKind::Power}});
    Interface env = make_iface({{"s", "entropy", PortKind::Power}});

    InterconnectionPattern host = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("a"), ab}, {Name::parse("env"), env}}),
        outer_h,
        {junction({{"a.p", In}, {"p", Out}}),
         junction({{"a.s", In}, {"env.s", In}})});

    InterconnectionPattern g1 = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("b"), ab}}), ab,
        {junction({{"b.p", In}, {"p", Out}}), junction({{"b.s", In}, {"s", Out}})});

    Interface mf = make_iface(
        {{"p", "momentum", PortKind::Power}, {"s", "entropy", PortKind::Power}});
    Interface tc = make_iface({{"s", "entropy", PortKind::Power}});
    InterconnectionPattern g2 = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("mf"), mf}, {Name::parse("tc"), tc}}), ab,
        {junction({{"mf.p", In}, {"p", Out}}),
         junction({{"mf.s", In}, {"tc.s", In}, {"s", Out}})});

    InterconnectionPattern left =
        substitute(substitute(host, Name::parse("a"), g1), Name::parse("a.b"), g2);
    InterconnectionPattern right =
        substitute(host, Name::parse("a"), substitute(g1, Name::parse("b"), g2));
    CHECK(left == right);
    CHECK(partition_of(left.junctions()) == partition_of(right.junctions()));
}

TEST_CASE("junction relation splits members into the three equation groups")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    InterconnectionPattern fig6 =
        substitute(osc, Name::parse("damping"), doc.find_pattern("damper_pat")->pattern);
    JunctionRelation rel = junction_relation(fig6);

    bool found_kinetic = false;
    for (const auto& j : rel.junctions) {
        if (j.quantity.label != "momentum")
            continue;
        found_kinetic = true;
        CHECK(j.inner_power.size() == 3);
        CHECK(j.outer_power.size() == 1);
        CHECK(j.state_only.empty());
    }
    CHECK(found_kinetic);
}

TEST_CASE("a single inner power port with no outer port forces zero flow")
{
    Interface tc = make_iface({{"s", "entropy", PortKind::Power}});
    InterconnectionPattern lone = InterconnectionPattern::validated(
        Package<Interface>::make({{Name::parse("tc"), tc}}), Interface{},
        {junction({{"tc.s", In}})});
    JunctionRelation rel = junction_relation(lone);

    PortAssignment vars;
    vars[inner_port(Name::parse("tc.s"))] = {{1.0}, {0.0}, {2.0}};
    CHECK(satisfies(rel, vars));
    vars[inner_port(Name::parse("tc.s"))].f[0] = 0.5;
    CHECK_FALSE(satisfies(rel, vars));
}

TEST_CASE("motor pattern relation pins the shared-domain equations")
{
    ModelDocument doc = test::load_model("motor.ephs");
    const InterconnectionPattern& motor = doc.find_pattern("motor_pat")->pattern;
    JunctionRelation rel = junction_relation(motor);
    REQUIRE(rel.junctions.size() == 3);

    PortAssignment vars;
    auto set = [&](const char* name, PortRef::Side side, double x, double f, double e) {
        vars[{side, Name::parse(name)}] = {{x}, {f}, {e}};
    };
    // electric junction: charge states and efforts equal, currents add
    set("stator.q", In, 1.0, 0.25, 5.0);
    set("rotor.q", In, 1.0, 0.50, 5.0);
    set("q", Out, 1.0, 0.75, 5.0);
    // magnetic state junction: shared state only
    vars[inner_port(Name::parse("stator.b_s"))] = {{3.0}, {}, {}};
    vars[inner_port(Name::parse("rotor.b_s"))] = {{3.0}, {}, {}};
    // kinetic junction: one-to-one exposure
    set("rotor.p", In, 2.0, -0.5, 7.0);
    set("p", Out, 2.0, -0.5, 7.0);
    CHECK(satisfies(rel, vars));

    SUBCASE("state equality is enforced on state junctions")
    {
        vars[inner_port(Name::parse("rotor.b_s"))].x[0] = 2.0;
        CHECK_FALSE(satisfies(rel, vars));
    }
    SUBCASE("flow balance is enforced")
    {
        vars[outer_port(Name::parse("q"))].f[0] = 0.9;
        CHECK_FALSE(satisfies(rel, vars));
    }
    SUBCASE("effort equality is enforced")
    {
        vars[inner_port(Name::parse("rotor.q"))].e[0] = 4.0;
        CHECK_FALSE(satisfies(rel, vars));
    }
}

TEST_CASE("power balance holds at every junction of satisfying assignments")
{
    ModelDocument osc_doc = test::load_model("oscillator.ephs");
    ModelDocument motor_doc = test::load_model("motor.ephs");
    std::vector<const InterconnectionPattern*> patterns{
        &osc_doc.find_pattern("isothermal_osc")->pattern,
        &osc_doc.find_pattern("damper_pat")->pattern,
        &motor_doc.find_pattern("motor_pat")->pattern,
        &motor_doc.find_pattern("rotor_pat")->pattern};
    std::mt19937_64 rng(21);
    for (const auto* pattern : patterns) {
        JunctionRelation rel = junction_relation(*pattern);
        for (int trial = 0; trial < 100; ++trial) {
            PortAssignment vars = test::random_satisfying_assignment(rel, rng);
            REQUIRE(satisfies(rel, vars));
            for (const auto& j : rel.junctions) {
                double inner_power = 0.0;
                double outer_power = 0.0;
                for (const auto& m : j.inner_power)
                    for (std::size_t k = 0; k < vars[m].f.size(); ++k)
                        inner_power += vars[m].e[k] * vars[m].f[k];
                for (const auto& m : j.outer_power)
                    for (std::size_t k = 0; k < vars[m].f.size(); ++k)
                        outer_power += vars[m].e[k] * vars[m].f[k];
                CHECK(std::abs(inner_power - outer_power) <= 1e-12 * 64.0);
            }
        }
    }
}

TEST_CASE("pattern semantics compose functorially (relation membership)")
{
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    const InterconnectionPattern& damper = doc.find_pattern("damper_pat")->pattern;
    const Name box = Name::parse("damping");
    InterconnectionPattern composed = substitute(osc, box, damper);
    JunctionRelation composed_rel = junction_relation(composed);

    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    int agreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
        PortAssignment vars = test::random_satisfying_assignment(composed_rel, rng);
        if (trial % 2 == 1) {
            // knock the sample off the relation somewhere
            auto it = vars.begin();
            std::advance(it, trial % vars.size());
            if (!it->second.f.empty())
                it->second.f[0] += 0.5 + std::abs(noise(rng));
            else
                it->second.x[0] += 0.5 + std::abs(noise(rng));
        }
        bool direct = satisfies(composed_rel, vars);
        bool via_composition = test::composed_membership(osc, box, damper, vars);
        CHECK(direct == via_composition);
        agreements += (direct == via_composition);
    }
    CHECK(agreements == 200);
}

TEST_CASE("substitution output always passes validation")
{
    // validated() runs inside substitute; revalidate explicitly
    ModelDocument doc = test::load_model("oscillator.ephs");
    const InterconnectionPattern& osc = doc.find_pattern("isothermal_osc")->pattern;
    const InterconnectionPattern& damper = doc.find_pattern("damper_pat")->pattern;
    InterconnectionPattern result = substitute(osc, Name::parse("damping"), damper);
    CHECK_NOTHROW(InterconnectionPattern::validated(result.inner(), result.outer(),
                                                    result.junctions()));
}

TEST_CASE("DOT export marks boxes, junctions, and state edges")
{
    ModelDocument doc = test::load_model("motor.ephs");
    std::string dot = to_dot(doc.find_pattern("rotor_pat")->pattern, "rotor");
    CHECK(dot.find("shape=circle") != std::string::npos);
    CHECK(dot.find("shape=point") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos); // the b_s state edges
    CHECK(dot.find("graph \"rotor\"") != std::string::npos);
}
