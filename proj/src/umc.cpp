#include "epimc/umc.hpp"

#include "epimc/prop_bridge.hpp"
#include "epimc/resolve.hpp"

#include <algorithm>
#include <unordered_map>

namespace epimc::umc {

using logic::Formula;
using logic::Op;
using sat::PropRef;

UmcEngine::UmcEngine(symbolic::SymbolicModel& sm, UmcOptions options)
    : sm_(sm), options_(options), m_(sm.encoding().state_bits())
{
    for (std::size_t j = 0; j < m_; ++j) {
        w_.push_back(static_cast<sat::Var>(j + 1));
        v_.push_back(static_cast<sat::Var>(m_ + j + 1));
    }
    same_.resize(sm.system().agents.size());
    compute_reachable();
}

StateSetCnf UmcEngine::all() const { return StateSetCnf{sat::Cnf(static_cast<sat::Var>(m_))}; }

StateSetCnf UmcEngine::none() const
{
    StateSetCnf s = all();
    s.cnf.add_clause({});
    return s;
}

PropRef UmcEngine::over_v(const StateSetCnf& s)
{
    std::unordered_map<sat::Var, sat::Var> map;
    for (std::size_t j = 0; j < m_; ++j)
        map.emplace(w_[j], v_[j]);
    return dag_.rename(over_w(s), map);
}

PropRef UmcEngine::reach_v()
{
    if (!reach_v_) {
        std::unordered_map<sat::Var, sat::Var> map;
        for (std::size_t j = 0; j < m_; ++j)
            map.emplace(w_[j], v_[j]);
        reach_v_ = dag_.rename(reach_w_, map);
    }
    return *reach_v_;
}

PropRef UmcEngine::transition(bool backward)
{
    auto& slot = backward ? backward_ : forward_;
    if (!slot) {
        const auto& enc = sm_.encoding();
        const auto map = backward ? symbolic::state_var_map(enc, v_, w_) : symbolic::state_var_map(enc, w_, v_);
        slot = symbolic::to_prop(sm_.manager(), sm_.state_transition(), dag_, map);
    }
    return *slot;
}

PropRef UmcEngine::same_local(std::uint32_t agent)
{
    auto& slot = same_.at(agent);
    if (!slot) {
        const auto& enc = sm_.encoding();
        std::unordered_map<std::uint32_t, std::size_t> position;
        for (std::size_t j = 0; j < enc.cur_vars.size(); ++j)
            position[enc.cur_vars[j].index] = j;
        std::vector<PropRef> bits;
        for (auto var : enc.agents.at(agent).cur) {
            const auto j = position.at(var.index);
            bits.push_back(dag_.iff(dag_.var(w_[j]), dag_.var(v_[j])));
        }
        slot = dag_.and_all(std::move(bits));
    }
    return *slot;
}

bool UmcEngine::satisfiable(PropRef f)
{
    const sat::Cnf cnf = sat::tseitin(dag_, f, static_cast<sat::Var>(2 * m_));
    sat::Solver solver(cnf.num_vars(), options_.solver);
    solver.add_cnf(cnf);
    solver.add_clause({*cnf.top});
    ++stats_.solver_calls;
    return solver.solve();
}

StateSetCnf UmcEngine::characterize(PropRef f, bool eliminate_v)
{
    sat::EquCnfStats st;
    sat::EquCnfOptions opts{options_.solver, options_.max_blocking_clauses};
    const auto eliminate = eliminate_v ? std::span<const sat::Var>(v_) : std::span<const sat::Var>();
    const sat::Cnf raw =
        sat::equ_cnf(dag_, dag_.implies(reach_w_, f), eliminate, &st, opts, static_cast<sat::Var>(2 * m_));
    ++stats_.eliminations;
    stats_.blocking_clauses += st.blocking_clauses;
    stats_.max_blocking_per_elimination = std::max(stats_.max_blocking_per_elimination, st.blocking_clauses);
    stats_.solver_calls += st.solver_calls;
    StateSetCnf out = all();
    for (const auto& c : raw.clauses())
        out.cnf.add_clause(c);
    return out;
}

StateSetCnf UmcEngine::forall_related(PropRef relation, const StateSetCnf& s, bool target_in_reach)
{
    PropRef premise = target_in_reach ? dag_.and_(reach_v(), relation) : relation;
    return characterize(dag_.implies(premise, over_v(s)), true);
}

void UmcEngine::compute_reachable()
{
    const auto& enc = sm_.encoding();
    reach_w_ = symbolic::state_equals(enc, dag_, w_, model::GlobalState{sm_.system().initial_state});
    std::unordered_map<sat::Var, sat::Var> to_w;
    for (std::size_t j = 0; j < m_; ++j)
        to_w.emplace(v_[j], w_[j]);
    const PropRef trans = transition(false);
    sat::EquCnfOptions opts{options_.solver, options_.max_blocking_clauses};

    PropRef frontier = reach_w_;
    while (true) {
        // States without a predecessor in the frontier, as a CNF over v.
        sat::EquCnfStats st;
        const sat::Cnf none_after =
            sat::equ_cnf(dag_, dag_.implies(frontier, dag_.neg(trans)), w_, &st, opts, static_cast<sat::Var>(2 * m_));
        ++stats_.eliminations;
        stats_.blocking_clauses += st.blocking_clauses;
        stats_.max_blocking_per_elimination = std::max(stats_.max_blocking_per_elimination, st.blocking_clauses);
        stats_.solver_calls += st.solver_calls;
        const PropRef image = dag_.rename(dag_.neg(dag_.from_cnf(none_after)), to_w);
        const PropRef fresh = dag_.and_(image, dag_.neg(reach_w_));
        if (!satisfiable(fresh))
            break;
        ++stats_.reach_iterations;
        frontier = fresh;
        reach_w_ = dag_.or_(reach_w_, image);
    }
}

std::size_t UmcEngine::reachable_count()
{
    const sat::Cnf cnf = sat::tseitin(dag_, reach_w_, static_cast<sat::Var>(2 * m_));
    sat::Solver solver(cnf.num_vars(), options_.solver);
    solver.add_cnf(cnf);
    solver.add_clause({*cnf.top});
    std::size_t count = 0;
    while (solver.solve()) {
        ++count;
        sat::Clause block;
        for (auto w : w_)
            block.push_back(sat::Lit::make(w, !solver.model()[w]));
        if (block.empty())
            break;
        solver.add_clause(block);
    }
    return count;
}

StateSetCnf UmcEngine::atom(const std::string& name)
{
    const auto idx = resolve_atom(sm_.system(), name);
    const auto cond = sm_.condition(sm_.system().atoms[idx].condition);
    const auto map = symbolic::state_var_map(sm_.encoding(), w_);
    return characterize(symbolic::to_prop(sm_.manager(), cond, dag_, map), false);
}

StateSetCnf UmcEngine::negate(const StateSetCnf& s) { return characterize(dag_.neg(over_w(s)), false); }

StateSetCnf UmcEngine::conjoin(const StateSetCnf& a, const StateSetCnf& b) const
{
    StateSetCnf out = a;
    for (const auto& c : b.cnf.clauses())
        out.cnf.add_clause(c);
    return out;
}

StateSetCnf UmcEngine::disjoin(const StateSetCnf& a, const StateSetCnf& b)
{
    return characterize(dag_.or_(over_w(a), over_w(b)), false);
}

StateSetCnf UmcEngine::forall_ax(const StateSetCnf& s) { return forall_related(transition(false), s, false); }

StateSetCnf UmcEngine::forall_ay(const StateSetCnf& s) { return forall_related(transition(true), s, true); }

StateSetCnf UmcEngine::forall_k(std::uint32_t agent, const StateSetCnf& s)
{
    return forall_related(same_local(agent), s, true);
}

StateSetCnf UmcEngine::forall_d(const std::vector<std::uint32_t>& group, const StateSetCnf& s)
{
    std::vector<PropRef> rel;
    for (auto i : group)
        rel.push_back(same_local(i));
    return forall_related(dag_.and_all(std::move(rel)), s, true);
}

StateSetCnf UmcEngine::forall_e(const std::vector<std::uint32_t>& group, const StateSetCnf& s)
{
    if (options_.e_by_union) {
        std::vector<PropRef> rel;
        for (auto i : group)
            rel.push_back(same_local(i));
        return forall_related(dag_.or_all(std::move(rel)), s, true);
    }
    StateSetCnf out = all();
    for (auto i : group)
        out = conjoin(out, forall_k(i, s));
    return out;
}

namespace {

// Iterates `step` from `start` until two consecutive sets agree on R.
template <class Step>
StateSetCnf iterate(UmcEngine& engine, UmcStats& stats, StateSetCnf start, bool greatest, Step step)
{
    StateSetCnf q = std::move(start);
    while (true) {
        StateSetCnf next = step(q);
        ++stats.fixpoint_iterations;
        if (engine.equivalent(next, q))
            return next;
        if (greatest ? !engine.subset(next, q) : !engine.subset(q, next))
            ++stats.monotonicity_violations;
        q = std::move(next);
    }
}

} // namespace

StateSetCnf UmcEngine::gfp_ag(const StateSetCnf& s)
{
    return iterate(*this, stats_, all(), true, [&](const StateSetCnf& q) { return conjoin(s, forall_ax(q)); });
}

StateSetCnf UmcEngine::gfp_ah(const StateSetCnf& s)
{
    return iterate(*this, stats_, all(), true, [&](const StateSetCnf& q) { return conjoin(s, forall_ay(q)); });
}

StateSetCnf UmcEngine::gfp_c(const std::vector<std::uint32_t>& group, const StateSetCnf& s)
{
    return iterate(*this, stats_, all(), true,
                   [&](const StateSetCnf& q) { return forall_e(group, conjoin(s, q)); });
}

StateSetCnf UmcEngine::lfp_au(const StateSetCnf& a, const StateSetCnf& b)
{
    const StateSetCnf live = conjoin(a, negate(forall_ax(none())));
    return iterate(*this, stats_, none(), false,
                   [&](const StateSetCnf& q) { return disjoin(b, conjoin(live, forall_ax(q))); });
}

bool UmcEngine::contains(const StateSetCnf& s, const model::GlobalState& g) const
{
    const auto bits = symbolic::state_bits(sm_.encoding(), g);
    std::vector<bool> assignment(m_ + 1, false);
    for (std::size_t j = 0; j < m_; ++j)
        assignment[j + 1] = bits[j];
    return s.cnf.satisfied_by(assignment);
}

bool UmcEngine::equivalent(const StateSetCnf& a, const StateSetCnf& b)
{
    return !satisfiable(dag_.and_(reach_w_, dag_.xor_(over_w(a), over_w(b))));
}

bool UmcEngine::subset(const StateSetCnf& a, const StateSetCnf& b)
{
    return !satisfiable(dag_.and_all({reach_w_, over_w(a), dag_.neg(over_w(b))}));
}

std::vector<std::uint32_t> UmcEngine::group_of(const Formula& f) const
{
    if (f.op == Op::K || f.op == Op::Kbar)
        return {resolve_agent(sm_.system(), f.name)};
    return resolve_group(sm_.system(), f.group);
}

StateSetCnf UmcEngine::eval(const Formula& f)
{
    auto arg = [&](std::size_t i) { return eval(*f.args.at(i)); };
    switch (f.op) {
    case Op::True: return all();
    case Op::False: return none();
    case Op::Atom: return atom(f.name);
    case Op::Not: return negate(arg(0));
    case Op::And: return conjoin(arg(0), arg(1));
    case Op::Or: return disjoin(arg(0), arg(1));
    case Op::Implies: return disjoin(negate(arg(0)), arg(1));
    case Op::AX: return forall_ax(arg(0));
    case Op::EX: return negate(forall_ax(negate(arg(0))));
    case Op::AG: return gfp_ag(arg(0));
    case Op::AF: return lfp_au(all(), arg(0));
    case Op::AU: return lfp_au(arg(0), arg(1));
    case Op::EF:
    case Op::EU: {
        const StateSetCnf a = f.op == Op::EU ? arg(0) : all();
        const StateSetCnf b = eval(*f.args.back());
        return iterate(*this, stats_, none(), false, [&](const StateSetCnf& q) {
            return disjoin(b, conjoin(a, negate(forall_ax(negate(q)))));
        });
    }
    case Op::EG: {
        const StateSetCnf a = arg(0);
        const StateSetCnf dead = forall_ax(none());
        return iterate(*this, stats_, all(), true, [&](const StateSetCnf& q) {
            return conjoin(a, disjoin(dead, negate(forall_ax(negate(q)))));
        });
    }
    case Op::AW: {
        const StateSetCnf a = arg(0);
        const StateSetCnf b = arg(1);
        return iterate(*this, stats_, all(), true,
                       [&](const StateSetCnf& q) { return disjoin(b, conjoin(a, forall_ax(q))); });
    }
    case Op::AY: return forall_ay(arg(0));
    case Op::AH: return gfp_ah(arg(0));
    case Op::K: return forall_k(group_of(f).front(), arg(0));
    case Op::Kbar: return negate(forall_k(group_of(f).front(), negate(arg(0))));
    case Op::E: return forall_e(group_of(f), arg(0));
    case Op::Ebar: return negate(forall_e(group_of(f), negate(arg(0))));
    case Op::D: return forall_d(group_of(f), arg(0));
    case Op::Dbar: return negate(forall_d(group_of(f), negate(arg(0))));
    case Op::C: return gfp_c(group_of(f), arg(0));
    case Op::Cbar: return negate(gfp_c(group_of(f), negate(arg(0))));
    }
    throw UnsupportedOperator("UMC backend: unknown operator");
}

StateSetCnf UmcEngine::sat_set(const Formula& f)
{
    check_names(sm_.system(), f);
    return eval(f);
}

bool UmcEngine::check(const Formula& f)
{
    const StateSetCnf s = sat_set(f);
    const PropRef init =
        symbolic::state_equals(sm_.encoding(), dag_, w_, model::GlobalState{sm_.system().initial_state});
    return satisfiable(dag_.and_(init, over_w(s)));
}

bool umc_check(const model::InterpretedSystem& is, const Formula& f, UmcOptions options)
{
    symbolic::SymbolicModel sm(is);
    UmcEngine engine(sm, options);
    return engine.check(f);
}

} // namespace epimc::umc
