#include "doctest.h"

#include "epimc/explicit.hpp"
#include "epimc/ispl.hpp"
#include "epimc/random_formula.hpp"

#include "support.hpp"

using namespace epimc;
using namespace epimc::model;
using logic::parse_formula;

namespace {

std::uint32_t state_of(const ExplicitModel& m, std::vector<std::uint32_t> locals)
{
    auto idx = m.find(GlobalState{std::move(locals)});
    REQUIRE(idx.has_value());
    return *idx;
}

StateSet set_of(const ExplicitModel& m, std::initializer_list<std::uint32_t> members)
{
    auto s = m.empty_set();
    for (auto x : members)
        s.set(x);
    return s;
}

InterpretedSystem single_agent(std::vector<std::vector<std::uint32_t>> protocol, std::uint32_t n_locals)
{
    InterpretedSystem is;
    AgentDef a;
    a.name = "Solo";
    for (std::uint32_t s = 0; s < n_locals; ++s)
        a.local_states.push_back("s" + std::to_string(s));
    a.actions = {"a"};
    a.protocol = std::move(protocol);
    is.agents.push_back(a);
    is.initial_state = {0};
    is.atoms.push_back({"p", Condition::local_is(0, 0)});
    return is;
}

} // namespace

TEST_CASE("single state with a self-loop")
{
    auto m = build_explicit_model(single_agent({{0}}, 1));
    CHECK(m.size() == 1);
    CHECK(m.successors(0) == std::vector<std::uint32_t>{0});
}

TEST_CASE("no common enabled joint action leaves only the initial state")
{
    auto is = single_agent({{}}, 1);
    auto m = build_explicit_model(is);
    CHECK(m.size() == 1);
    CHECK(m.successors(0).empty());
}

TEST_CASE("state-space cap")
{
    auto m = load_fixture("fourstate.ispl");
    CHECK_THROWS_AS(build_explicit_model(m.system, {.max_states = 3}), StateExplosionError);
    try {
        build_explicit_model(m.system, {.max_states = 2});
    } catch (const StateExplosionError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("four-state chain: hand-derived epistemic sets")
{
    auto src = load_fixture("fourstate.ispl");
    auto m = build_explicit_model(src.system);
    REQUIRE(m.size() == 4);
    const auto s0 = state_of(m, {0, 0}); // (a,x)
    const auto s1 = state_of(m, {0, 1}); // (a,c)
    const auto s2 = state_of(m, {1, 1}); // (b,c)
    const auto s3 = state_of(m, {1, 2}); // (b,y)
    CHECK(epistemic_related(m, s0, s1, 0));
    CHECK_FALSE(epistemic_related(m, s0, s1, 1));
    CHECK(epistemic_related(m, s1, s2, 1));
    CHECK(epistemic_related(m, s2, s3, 0));
    CHECK(epistemic_related(m, s3, s3, 1));
    CHECK_THROWS_AS(epistemic_related(m, s0, s1, 5), InvalidArgument);

    CHECK(check_explicit(m, parse_formula("p")) == set_of(m, {s0, s1, s2}));
    CHECK(check_explicit(m, parse_formula("K A p")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("K B p")) == set_of(m, {s0, s1, s2}));
    CHECK(check_explicit(m, parse_formula("E p")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("E E p")) == set_of(m, {s0}));
    CHECK(check_explicit(m, parse_formula("C p")) == m.empty_set());
    CHECK(check_explicit(m, parse_formula("D p")) == set_of(m, {s0, s1, s2}));
    CHECK(check_explicit(m, parse_formula("Cbar not p")) == m.full_set());
    CHECK(check_explicit(m, parse_formula("C{B} p")) == check_explicit(m, parse_formula("K B p")));
    CHECK(check_explicit(m, parse_formula("AF not p")) == m.full_set());
    CHECK(check_explicit(m, parse_formula("EX p")) == set_of(m, {s0, s1}));
}

TEST_CASE("finite maximal paths and past operators on the chain fixture")
{
    auto src = load_fixture("chain3.ispl");
    auto m = build_explicit_model(src.system);
    REQUIRE(m.size() == 3);
    CHECK(m.max_depth() == 2);
    const auto s0 = state_of(m, {0}), s1 = state_of(m, {1}), s2 = state_of(m, {2});
    CHECK(check_explicit(m, parse_formula("AX false")) == set_of(m, {s2}));
    CHECK(check_explicit(m, parse_formula("EX true")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("AF last")) == m.full_set());
    CHECK(check_explicit(m, parse_formula("AF mid")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("EG true")) == m.full_set());
    CHECK(check_explicit(m, parse_formula("EG not mid")) == set_of(m, {s2}));
    CHECK(check_explicit(m, parse_formula("AY false")) == set_of(m, {s0}));
    CHECK(check_explicit(m, parse_formula("AY mid")) == set_of(m, {s0, s2}));
    CHECK(check_explicit(m, parse_formula("AH not last")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("AH (start or mid)")) == set_of(m, {s0, s1}));
    CHECK(check_explicit(m, parse_formula("A(start W mid)")) == set_of(m, {s0, s1}));
    for (const auto& f : src.formulas)
        CHECK(holds_initially(m, *f));
}

TEST_CASE("past operators on a cycle and a lasso")
{
    auto cyc = build_explicit_model(load_fixture("cycle2.ispl").system);
    CHECK(check_explicit(cyc, parse_formula("AY false")) == cyc.empty_set());
    CHECK(check_explicit(cyc, parse_formula("AH lit")) == cyc.empty_set());
    CHECK(check_explicit(cyc, parse_formula("AH true")) == cyc.full_set());

    auto lasso = build_explicit_model(load_fixture("lasso.ispl").system);
    REQUIRE(lasso.size() == 3);
    CHECK(check_explicit(lasso, parse_formula("AY false")) == set_of(lasso, {0}));
    CHECK(check_explicit(lasso, parse_formula("AH loop")) == lasso.empty_set());
    CHECK(check_explicit(lasso, parse_formula("AY loop")) == set_of(lasso, {0, 2}));
}

TEST_CASE("figure 2 fragment model")
{
    auto src = load_fixture("figure2.ispl");
    auto m = build_explicit_model(src.system);
    CHECK(m.size() == 3);
    for (const auto& f : src.formulas)
        CHECK(holds_initially(m, *f));
}

TEST_CASE("generated systems: determinism, well-formedness, bounded size")
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto is = generate_random_system(seed);
        CHECK(is.validate().empty());
        CHECK(is == generate_random_system(seed));
        for (const auto& a : is.agents)
            for (const auto& enabled : a.protocol)
                CHECK_FALSE(enabled.empty());
        auto m = build_explicit_model(is);
        std::size_t product = 1;
        for (const auto& a : is.agents)
            product *= a.local_states.size();
        CHECK(m.size() <= product);
        // Epistemic classes partition the state space.
        for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
            std::vector<std::size_t> sizes(is.agents[i].local_states.size(), 0);
            for (std::uint32_t s = 0; s < m.size(); ++s)
                ++sizes[m.state(s).locals[i]];
            std::size_t total = 0;
            for (auto n : sizes)
                total += n;
            CHECK(total == m.size());
        }
    }
    CHECK(ispl::serialize_ispl(generate_random_system(0), {logic::truth(true)}) ==
          ispl::serialize_ispl(generate_random_system(0), {logic::truth(true)}));
    CHECK_THROWS_AS(generate_random_system(0, {0, 1, 1}), InvalidArgument);
}

TEST_CASE("semantic properties over random systems and formulas")
{
    std::mt19937_64 rng(21);
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        auto is = generate_random_system(seed);
        auto m = build_explicit_model(is);
        logic::FormulaVocabulary vocab{{"p", "q"}, static_cast<std::uint32_t>(is.agents.size())};
        for (int k = 0; k < 8; ++k) {
            auto phi = logic::random_formula(rng, vocab, logic::Fragment::Ctlpk, 3);
            INFO(logic::format_formula(phi));
            auto sat = check_explicit(m, phi);
            CHECK(check_explicit(m, logic::neg(phi)) == ~sat);
            CHECK(check_explicit(m, logic::to_nnf(phi)) == sat);
            CHECK(check_explicit(m, logic::unary(logic::Op::AG, phi)) ==
                  ~check_explicit(m, logic::unary(logic::Op::EF, logic::neg(phi))));
            auto c = check_explicit(m, logic::group_op(logic::Op::C, std::nullopt, phi));
            auto e = check_explicit(m, logic::group_op(logic::Op::E, std::nullopt, phi));
            auto d = check_explicit(m, logic::group_op(logic::Op::D, std::nullopt, phi));
            CHECK(c.is_subset_of(e));
            for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
                auto ki = check_explicit(m, logic::knows(logic::Op::K, std::to_string(i + 1), phi));
                CHECK(ki.is_subset_of(sat));
                CHECK(e.is_subset_of(ki));
                CHECK(ki.is_subset_of(d));
            }
            // C is the greatest fixpoint of X = E(phi and X).
            auto x = m.full_set();
            while (true) {
                auto next = m.full_set();
                auto body = sat & x;
                for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
                    std::vector<char> bad(is.agents[i].local_states.size(), 0);
                    for (std::uint32_t s = 0; s < m.size(); ++s)
                        if (!body.test(s))
                            bad[m.state(s).locals[i]] = 1;
                    for (std::uint32_t s = 0; s < m.size(); ++s)
                        if (bad[m.state(s).locals[i]])
                            next.reset(s);
                }
                if (next == x)
                    break;
                x = next;
            }
            CHECK(c == x);
        }
    }
}

TEST_CASE("undeclared names are rejected")
{
    auto m = build_explicit_model(load_fixture("fourstate.ispl").system);
    CHECK_THROWS_AS(check_explicit(m, parse_formula("nope")), NameResolutionError);
    CHECK_THROWS_AS(check_explicit(m, parse_formula("K 3 p")), NameResolutionError);
}
