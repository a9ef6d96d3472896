#include "doctest.h"

#include "epimc/bdd.hpp"

#include <random>

using namespace epimc::bdd;

namespace {

// Truth table of `a` over variables [0, n), bit i = value under assignment i.
std::uint64_t table(const Manager& m, NodeRef a, std::uint32_t n)
{
    std::uint64_t out = 0;
    for (std::uint32_t row = 0; row < (1u << n); ++row) {
        std::vector<bool> asg(m.var_count(), false);
        for (std::uint32_t v = 0; v < n; ++v)
            asg[v] = row >> v & 1;
        if (m.eval(a, asg))
            out |= std::uint64_t{1} << row;
    }
    return out;
}

// Independent expression tree evaluated directly, never through the BDD.
struct Expr {
    int kind = 0; // 0 var, 1 not, 2 and, 3 or, 4 xor, 5 const
    std::uint32_t var = 0;
    bool value = false;
    std::vector<Expr> kids;

    bool eval(std::uint32_t row) const
    {
        switch (kind) {
        case 0: return row >> var & 1;
        case 1: return !kids[0].eval(row);
        case 2: return kids[0].eval(row) && kids[1].eval(row);
        case 3: return kids[0].eval(row) || kids[1].eval(row);
        case 4: return kids[0].eval(row) != kids[1].eval(row);
        default: return value;
        }
    }

    NodeRef build(Manager& m) const
    {
        switch (kind) {
        case 0: return m.var(VarId{var});
        case 1: return m.negate(kids[0].build(m));
        case 2: return m.and_(kids[0].build(m), kids[1].build(m));
        case 3: return m.or_(kids[0].build(m), kids[1].build(m));
        case 4: return m.apply(BinOp::Xor, kids[0].build(m), kids[1].build(m));
        default: return m.constant(value);
        }
    }
};

Expr random_expr(std::mt19937_64& rng, std::uint32_t nvars, int depth)
{
    Expr e;
    e.kind = depth == 0 ? (rng() % 8 == 0 ? 5 : 0) : static_cast<int>(rng() % 6);
    if (e.kind == 0)
        e.var = rng() % nvars;
    else if (e.kind == 5)
        e.value = rng() & 1;
    else if (e.kind == 1)
        e.kids.push_back(random_expr(rng, nvars, depth - 1));
    else
        e.kids = {random_expr(rng, nvars, depth - 1), random_expr(rng, nvars, depth - 1)};
    return e;
}

std::uint64_t expr_table(const Expr& e, std::uint32_t n)
{
    std::uint64_t out = 0;
    for (std::uint32_t row = 0; row < (1u << n); ++row)
        if (e.eval(row))
            out |= std::uint64_t{1} << row;
    return out;
}

// Builds the BDD of a truth table by Shannon expansion over vars [0, n).
NodeRef from_table(Manager& m, std::uint64_t tt, std::uint32_t n)
{
    NodeRef acc = m.bdd_false();
    for (std::uint32_t row = 0; row < (1u << n); ++row) {
        if (!(tt >> row & 1))
            continue;
        NodeRef minterm = m.bdd_true();
        for (std::uint32_t v = 0; v < n; ++v)
            minterm = m.and_(minterm, (row >> v & 1) ? m.var(VarId{v}) : m.nvar(VarId{v}));
        acc = m.or_(acc, minterm);
    }
    return acc;
}

} // namespace

TEST_CASE("variables are hash-consed and bounds checked")
{
    Manager m(3);
    NodeRef x0 = m.var(VarId{0});
    CHECK(x0 == m.var(VarId{0}));
    CHECK(m.eval(x0, {{VarId{0}, true}}));
    CHECK_FALSE(m.eval(x0, {{VarId{0}, false}}));
    CHECK(m.high(x0).is_true());
    CHECK(m.low(x0).is_false());
    CHECK_THROWS_AS(m.var(VarId{5}), InvalidVariable);
}

TEST_CASE("apply basics")
{
    Manager m(2);
    NodeRef a = m.var(VarId{0});
    CHECK(m.and_(a, m.negate(a)).is_false());
    CHECK(m.or_(a, m.bdd_false()) == a);
    CHECK(m.negate(m.negate(a)) == a);
    CHECK(m.ite(a, m.bdd_true(), m.bdd_false()) == a);

    Manager other(2);
    CHECK_THROWS_AS(m.and_(a, other.var(VarId{0})), WrongManager);
}

TEST_CASE("apply matches pointwise operations for all pairs of 2-variable functions")
{
    Manager m(2);
    std::vector<NodeRef> fns;
    for (std::uint64_t tt = 0; tt < 16; ++tt)
        fns.push_back(from_table(m, tt, 2));
    for (std::uint64_t f = 0; f < 16; ++f) {
        for (std::uint64_t g = 0; g < 16; ++g) {
            CHECK(table(m, m.apply(BinOp::And, fns[f], fns[g]), 2) == (f & g));
            CHECK(table(m, m.apply(BinOp::Or, fns[f], fns[g]), 2) == (f | g));
            CHECK(table(m, m.apply(BinOp::Xor, fns[f], fns[g]), 2) == (f ^ g));
            CHECK(table(m, m.apply(BinOp::Implies, fns[f], fns[g]), 2) == ((~f | g) & 15));
            CHECK(table(m, m.apply(BinOp::Iff, fns[f], fns[g]), 2) == (~(f ^ g) & 15));
        }
    }
}

TEST_CASE("a or (b and c) has three internal nodes and evaluates as expected")
{
    Manager m(3);
    NodeRef a = m.var(VarId{0}), b = m.var(VarId{1}), c = m.var(VarId{2});
    NodeRef f = m.or_(a, m.and_(b, c));
    CHECK(m.dag_size(f) == 3);
    CHECK(m.eval(f, {{VarId{0}, false}, {VarId{1}, true}, {VarId{2}, true}}));
    CHECK_FALSE(m.eval(f, {{VarId{0}, false}, {VarId{1}, true}, {VarId{2}, false}}));
    CHECK_THROWS_AS(m.eval(f, {{VarId{0}, false}}), MissingVariable);
    CHECK(m.eval(m.bdd_true(), std::map<VarId, bool>{}));
    CHECK(m.to_dot(f).find("dotted") != std::string::npos);
}

TEST_CASE("quantification")
{
    Manager m(2);
    NodeRef x0 = m.var(VarId{0}), x1 = m.var(VarId{1});
    std::vector<VarId> v0{VarId{0}};
    CHECK(m.exists(m.and_(x0, x1), v0) == x1);
    CHECK(m.forall(m.or_(x0, x1), v0) == x1);

    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        Manager mm(4);
        const std::uint64_t tt = rng() & 0xffff;
        NodeRef f = from_table(mm, tt, 4);
        std::vector<VarId> vars;
        const auto mask = rng() % 16;
        for (std::uint32_t v = 0; v < 4; ++v)
            if (mask >> v & 1)
                vars.push_back(VarId{v});
        // Oracle: disjunction / conjunction over all restrictions.
        std::uint64_t ex = 0, fa = 0;
        for (std::uint32_t row = 0; row < 16; ++row) {
            bool any = false, all = true;
            for (std::uint32_t sub = 0; sub < 16; ++sub) {
                if ((sub & ~mask) != 0)
                    continue;
                const std::uint32_t r = (row & ~mask) | sub;
                const bool val = tt >> r & 1;
                any = any || val;
                all = all && val;
            }
            if (any)
                ex |= std::uint64_t{1} << row;
            if (all)
                fa |= std::uint64_t{1} << row;
        }
        NodeRef e = mm.exists(f, vars);
        NodeRef a = mm.forall(f, vars);
        CHECK(table(mm, e, 4) == ex);
        CHECK(table(mm, a, 4) == fa);
        CHECK(a == mm.negate(mm.exists(mm.negate(f), vars)));
        const std::uint64_t tt2 = rng() & 0xffff;
        NodeRef g = from_table(mm, tt2, 4);
        CHECK(mm.and_exists(f, g, vars) == mm.exists(mm.and_(f, g), vars));
    }
}

TEST_CASE("rename")
{
    Manager m(4);
    NodeRef x0 = m.var(VarId{0}), x1 = m.var(VarId{1});
    NodeRef f = m.and_(x0, x1);
    CHECK(m.rename(f, {{VarId{0}, VarId{2}}, {VarId{1}, VarId{3}}}) == m.and_(m.var(VarId{2}), m.var(VarId{3})));
    CHECK(m.rename(f, {}) == f);
    CHECK(m.rename(f, {{VarId{0}, VarId{0}}, {VarId{1}, VarId{1}}}) == f);
    CHECK_THROWS_AS(m.rename(f, {{VarId{0}, VarId{1}}}), RenameConflict);

    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        Manager mm(4);
        const std::uint64_t tt = rng() & 0xffff;
        NodeRef g = from_table(mm, tt, 4);
        std::vector<std::uint32_t> perm{0, 1, 2, 3};
        std::shuffle(perm.begin(), perm.end(), rng);
        std::map<VarId, VarId> mapping;
        for (std::uint32_t v = 0; v < 4; ++v)
            mapping[VarId{v}] = VarId{perm[v]};
        NodeRef r = mm.rename(g, mapping);
        // r(y) = g(x) where y[perm[v]] = x[v].
        for (std::uint32_t row = 0; row < 16; ++row) {
            std::vector<bool> y(4);
            for (std::uint32_t v = 0; v < 4; ++v)
                y[v] = row >> v & 1;
            std::uint32_t pre = 0;
            for (std::uint32_t v = 0; v < 4; ++v)
                if (y[perm[v]])
                    pre |= 1u << v;
            CHECK(mm.eval(r, y) == static_cast<bool>(tt >> pre & 1));
        }
    }
}

TEST_CASE("sat_count")
{
    Manager m(6);
    CHECK(m.sat_count(m.bdd_true(), 3) == 8);
    CHECK(m.sat_count(m.or_(m.var(VarId{0}), m.var(VarId{1})), 2) == 3);
    CHECK_THROWS_AS(m.sat_count(m.var(VarId{4}), 3), epimc::InvalidArgument);

    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 50; ++iter) {
        const std::uint64_t tt = rng();
        NodeRef f = from_table(m, tt, 6);
        CHECK(m.sat_count(f, 6) == __builtin_popcountll(tt));
    }
}

TEST_CASE("canonicity: equal truth tables iff identical handles")
{
    std::mt19937_64 rng(2024);
    Manager m(4);
    std::vector<std::pair<std::uint64_t, NodeRef>> built;
    for (int i = 0; i < 300; ++i) {
        Expr e = random_expr(rng, 4, 1 + rng() % 4);
        built.emplace_back(expr_table(e, 4), e.build(m));
    }
    std::size_t violations = 0;
    for (const auto& [ta, a] : built)
        for (const auto& [tb, b] : built)
            if ((ta == tb) != (a == b))
                ++violations;
    CHECK(violations == 0);
    CHECK(m.check_invariants());

    // De Morgan and quantifier duality as handle equalities.
    for (std::size_t i = 0; i + 1 < built.size(); ++i) {
        NodeRef a = built[i].second, b = built[i + 1].second;
        CHECK(m.or_(a, b) == m.negate(m.and_(m.negate(a), m.negate(b))));
        std::vector<VarId> vs{VarId{static_cast<std::uint32_t>(i % 4)}};
        CHECK(m.forall(a, vs) == m.negate(m.exists(m.negate(a), vs)));
    }
    CHECK(m.check_invariants());
}

TEST_CASE("eval agrees with truth tables of random functions")
{
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 100; ++iter) {
        Manager m(4);
        Expr e = random_expr(rng, 4, 4);
        CHECK(table(m, e.build(m), 4) == expr_table(e, 4));
    }
}
