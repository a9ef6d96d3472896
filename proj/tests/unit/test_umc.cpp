#include "doctest.h"

#include "epimc/bench.hpp"
#include "epimc/explicit.hpp"
#include "epimc/random_formula.hpp"
#include "epimc/umc.hpp"

#include "support.hpp"

#include <random>

using namespace epimc;
using namespace epimc::model;
using logic::parse_formula;
using symbolic::SymbolicModel;
using umc::StateSetCnf;
using umc::UmcEngine;

namespace {

void require_same_set(const UmcEngine& engine, const ExplicitModel& em, const StateSetCnf& s, const StateSet& expl)
{
    for (std::uint32_t i = 0; i < em.size(); ++i)
        REQUIRE(engine.contains(s, em.state(i)) == expl.test(i));
}

} // namespace

TEST_CASE("reachable set matches the explicit builder")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        CAPTURE(seed);
        auto is = generate_random_system(seed);
        ExplicitModel em = build_explicit_model(is);
        SymbolicModel sm(is);
        UmcEngine engine(sm);
        CHECK(engine.reachable_count() == em.size());
        CHECK(engine.stats().blocking_clauses <= em.size() * (engine.stats().reach_iterations + 1) * 4);
    }

    auto model = load_fixture("chain3.ispl");
    SymbolicModel sm(model.system);
    UmcEngine engine(sm);
    CHECK(engine.reachable_count() == 3);
    CHECK(engine.stats().reach_iterations == 2);
}

TEST_CASE("fixture formulas, including past operators, agree with the explicit backend")
{
    for (const char* name : {"fourstate.ispl", "chain3.ispl", "cycle2.ispl", "lasso.ispl", "figure2.ispl"}) {
        CAPTURE(name);
        auto model = load_fixture(name);
        ExplicitModel em = build_explicit_model(model.system);
        SymbolicModel sm(model.system);
        UmcEngine engine(sm);
        for (std::size_t k = 0; k < model.formulas.size(); ++k) {
            CAPTURE(logic::format_formula(model.formulas[k]));
            require_same_set(engine, em, engine.sat_set(*model.formulas[k]), check_explicit(em, model.formulas[k]));
            CHECK(engine.check(*model.formulas[k]) == holds_initially(em, *model.formulas[k]));
        }
        CHECK(engine.stats().monotonicity_violations == 0);
    }
}

TEST_CASE("universal steps and fixpoints on small sets")
{
    auto model = load_fixture("lasso.ispl");
    ExplicitModel em = build_explicit_model(model.system);
    SymbolicModel sm(model.system);
    UmcEngine engine(sm);

    // AY of anything holds where there is no predecessor: the initial state
    // of the lasso has none.
    const StateSetCnf ay_false = engine.forall_ay(engine.none());
    require_same_set(engine, em, ay_false, check_explicit(em, parse_formula("AY false")));
    CHECK(engine.contains(ay_false, GlobalState{model.system.initial_state}));

    CHECK(engine.equivalent(engine.conjoin(engine.all(), engine.none()), engine.none()));
    CHECK(engine.equivalent(engine.disjoin(engine.all(), engine.none()), engine.all()));
    CHECK(engine.equivalent(engine.negate(engine.negate(ay_false)), ay_false));
    CHECK(engine.subset(engine.none(), ay_false));
    CHECK_FALSE(engine.subset(engine.all(), ay_false));
    CHECK(engine.equivalent(engine.gfp_ag(engine.all()), engine.all()));
    CHECK(engine.equivalent(engine.lfp_au(engine.all(), engine.none()), engine.none()));
}

TEST_CASE("differential check against the explicit backend on random CTLpK formulas")
{
    std::mt19937_64 rng(21);
    std::size_t compared = 0, past = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto is = generate_random_system(seed);
        ExplicitModel em = build_explicit_model(is);
        SymbolicModel sm(is);
        UmcEngine engine(sm);
        logic::FormulaVocabulary vocab{{"p", "q"}, static_cast<std::uint32_t>(is.agents.size())};
        for (int k = 0; k < 6; ++k) {
            auto phi = logic::random_formula(rng, vocab, logic::Fragment::Ctlpk, 3);
            CAPTURE(seed);
            CAPTURE(logic::format_formula(phi));
            require_same_set(engine, em, engine.sat_set(*phi), check_explicit(em, phi));
            REQUIRE(engine.check(*phi) == holds_initially(em, *phi));
            past += logic::has_past_operators(*phi);
            ++compared;
        }
        CHECK(engine.stats().monotonicity_violations == 0);
        CHECK(engine.stats().max_blocking_per_elimination <= em.size());
    }
    CHECK(compared == 240);
    CHECK(past > 20);
}

TEST_CASE("semantic properties of the universal steps")
{
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        CAPTURE(seed);
        auto is = generate_random_system(seed);
        SymbolicModel sm(is);
        UmcEngine conj(sm);
        UmcEngine unite(sm, umc::UmcOptions{{}, true});
        logic::FormulaVocabulary vocab{{"p", "q"}, static_cast<std::uint32_t>(is.agents.size())};
        std::vector<std::uint32_t> everyone(is.agents.size());
        for (std::uint32_t i = 0; i < everyone.size(); ++i)
            everyone[i] = i;
        for (int k = 0; k < 4; ++k) {
            auto phi = logic::random_formula(rng, vocab, logic::Fragment::Ctlk, 2);
            CAPTURE(logic::format_formula(phi));
            const StateSetCnf x = conj.sat_set(*phi);
            for (std::uint32_t i = 0; i < everyone.size(); ++i)
                CHECK(conj.subset(conj.forall_k(i, x), x));
            const StateSetCnf e = conj.forall_e(everyone, x);
            CHECK(conj.subset(e, conj.forall_k(0, x)));
            CHECK(conj.subset(conj.gfp_c(everyone, x), e));
            CHECK(conj.subset(conj.forall_k(0, x), conj.forall_d(everyone, x)));
            CHECK(conj.equivalent(conj.disjoin(x, conj.negate(x)), conj.all()));

            // Both formulations of E give the same set.
            const StateSetCnf e_union = unite.forall_e(everyone, unite.sat_set(*phi));
            CHECK(conj.equivalent(e, e_union));
        }
    }
}

TEST_CASE("dining cryptographers with three agents")
{
    auto dc = bench::generate_dc(3);
    ExplicitModel em = build_explicit_model(dc.system);
    SymbolicModel sm(dc.system);
    UmcEngine engine(sm);
    CHECK(engine.reachable_count() == em.size());
    for (const auto& f : dc.formulas()) {
        CAPTURE(logic::format_formula(f));
        CHECK(engine.check(*f));
        require_same_set(engine, em, engine.sat_set(*f), check_explicit(em, f));
    }
    CHECK(engine.stats().monotonicity_violations == 0);
}

TEST_CASE("name errors and limits")
{
    auto model = load_fixture("cycle2.ispl");
    SymbolicModel sm(model.system);
    UmcEngine engine(sm);
    CHECK_THROWS_AS(engine.check(*parse_formula("undeclared_atom")), NameResolutionError);
    CHECK_THROWS_AS(engine.check(*parse_formula("K Nobody true")), NameResolutionError);

    umc::UmcOptions tight;
    tight.max_blocking_clauses = 0;
    CHECK_THROWS_AS(UmcEngine(sm, tight), sat::EquCnfLimitError);
}
