#include "epimc/symbolic.hpp"

#include "epimc/resolve.hpp"

namespace epimc::symbolic {

std::uint32_t bit_width(std::uint32_t values)
{
    std::uint32_t w = 0;
    while ((std::uint64_t{1} << w) < values)
        ++w;
    return w;
}

StateEncoding make_encoding(const model::InterpretedSystem& is)
{
    StateEncoding enc;
    std::uint32_t next_var = 0;
    for (const auto& a : is.agents) {
        AgentBits bits;
        bits.n_locals = static_cast<std::uint32_t>(a.local_states.size());
        bits.n_actions = static_cast<std::uint32_t>(a.actions.size());
        enc.agents.push_back(std::move(bits));
    }
    for (std::size_t k = enc.agents.size(); k-- > 0;) {
        auto& bits = enc.agents[k];
        for (std::uint32_t j = 0; j < bit_width(bits.n_actions); ++j)
            bits.act.push_back(VarId{next_var++});
        enc.action_vars.insert(enc.action_vars.end(), bits.act.begin(), bits.act.end());
    }
    for (auto& bits : enc.agents) {
        for (std::uint32_t j = 0; j < bit_width(bits.n_locals); ++j) {
            bits.cur.push_back(VarId{next_var++});
            bits.next.push_back(VarId{next_var++});
        }
        enc.cur_vars.insert(enc.cur_vars.end(), bits.cur.begin(), bits.cur.end());
        enc.next_vars.insert(enc.next_vars.end(), bits.next.begin(), bits.next.end());
    }
    if (next_var > (1u << 20))
        throw EncodingError("encoding needs " + std::to_string(next_var) + " variables");
    enc.var_count = next_var;
    return enc;
}

SymbolicModel::SymbolicModel(const model::InterpretedSystem& is, Options options)
    : system_(is), enc_(make_encoding(is)), mgr_(enc_.var_count)
{
    if (auto problems = is.validate(); !problems.empty())
        throw InvalidArgument("ill-formed system: " + problems.front());

    dom_cur_ = dom_next_ = mgr_.bdd_true();
    for (std::uint32_t i = 0; i < enc_.agents.size(); ++i) {
        NodeRef cur = mgr_.bdd_false(), nxt = mgr_.bdd_false();
        for (std::uint32_t s = 0; s < enc_.agents[i].n_locals; ++s) {
            cur = mgr_.or_(cur, local_is(i, s, false));
            nxt = mgr_.or_(nxt, local_is(i, s, true));
        }
        dom_cur_ = mgr_.and_(dom_cur_, cur);
        dom_next_ = mgr_.and_(dom_next_, nxt);
    }

    init_ = encode_state(model::GlobalState{is.initial_state});

    for (std::uint32_t i = 0; i < is.agents.size(); ++i) {
        const auto& agent = is.agents[i];
        NodeRef enabled = mgr_.bdd_false();
        for (std::uint32_t s = 0; s < agent.local_states.size(); ++s) {
            NodeRef acts = mgr_.bdd_false();
            for (auto x : agent.protocol[s])
                acts = mgr_.or_(acts, action_is(i, x));
            enabled = mgr_.or_(enabled, mgr_.and_(local_is(i, s), acts));
        }
        NodeRef any_rule = mgr_.bdd_false();
        NodeRef moves = mgr_.bdd_false();
        for (const auto& rule : agent.evolution) {
            NodeRef guard = condition(rule.guard);
            any_rule = mgr_.or_(any_rule, guard);
            moves = mgr_.or_(moves, mgr_.and_(guard, local_is(i, rule.target, true)));
        }
        NodeRef same = mgr_.bdd_true();
        for (std::size_t j = 0; j < enc_.agents[i].cur.size(); ++j)
            same = mgr_.and_(same, mgr_.apply(bdd::BinOp::Iff, mgr_.var(enc_.agents[i].cur[j]),
                                              mgr_.var(enc_.agents[i].next[j])));
        epistemic_.push_back(same);
        moves = mgr_.or_(moves, mgr_.and_(mgr_.negate(any_rule), same));
        local_trans_.push_back(mgr_.and_(enabled, moves));
    }

    // The relation over state variables is assembled one action of the agent
    // with the most actions at a time; the full relation with action bits
    // gets large on models with a big joint action space.
    std::uint32_t split = 0;
    for (std::uint32_t i = 1; i < enc_.agents.size(); ++i)
        if (enc_.agents[i].n_actions > enc_.agents[split].n_actions)
            split = i;
    const NodeRef frame = mgr_.and_(dom_cur_, dom_next_);
    trans_states_ = mgr_.bdd_false();
    for (std::uint32_t a = 0; a < enc_.agents[split].n_actions; ++a) {
        NodeRef part = mgr_.and_(frame, action_is(split, a));
        for (std::uint32_t i = 0; i < local_trans_.size() && part != mgr_.bdd_false(); ++i)
            part = mgr_.and_(part, local_trans_[i]);
        trans_states_ = mgr_.or_(trans_states_, mgr_.exists(part, enc_.action_vars));
    }

    compute_reachable();
    if (options.deterministic)
        check_determinism();
}

NodeRef SymbolicModel::transition()
{
    if (!trans_) {
        NodeRef t = mgr_.and_(dom_cur_, dom_next_);
        for (NodeRef part : local_trans_)
            t = mgr_.and_(t, part);
        trans_ = t;
    }
    return *trans_;
}

NodeRef SymbolicModel::value_is(const std::vector<VarId>& bits, std::uint32_t value)
{
    NodeRef out = mgr_.bdd_true();
    for (std::size_t j = 0; j < bits.size(); ++j)
        out = mgr_.and_(out, (value >> j & 1) ? mgr_.var(bits[j]) : mgr_.nvar(bits[j]));
    return out;
}

NodeRef SymbolicModel::local_is(std::uint32_t agent, std::uint32_t state, bool next)
{
    const auto& bits = enc_.agents.at(agent);
    return value_is(next ? bits.next : bits.cur, state);
}

NodeRef SymbolicModel::action_is(std::uint32_t agent, std::uint32_t action)
{
    return value_is(enc_.agents.at(agent).act, action);
}

NodeRef SymbolicModel::condition(const model::Condition& c, bool next)
{
    using K = model::Condition::Kind;
    switch (c.kind) {
    case K::True: return mgr_.bdd_true();
    case K::False: return mgr_.bdd_false();
    case K::LocalIs: return local_is(c.agent, c.value, next);
    case K::ActionIs: return action_is(c.agent, c.value);
    case K::Not: return mgr_.negate(condition(c.children.front(), next));
    case K::And: {
        NodeRef out = mgr_.bdd_true();
        for (const auto& ch : c.children)
            out = mgr_.and_(out, condition(ch, next));
        return out;
    }
    case K::Or: {
        NodeRef out = mgr_.bdd_false();
        for (const auto& ch : c.children)
            out = mgr_.or_(out, condition(ch, next));
        return out;
    }
    }
    return mgr_.bdd_false();
}

NodeRef SymbolicModel::encode_state(const model::GlobalState& g, bool next)
{
    NodeRef out = mgr_.bdd_true();
    for (std::uint32_t i = 0; i < g.locals.size(); ++i)
        out = mgr_.and_(out, local_is(i, g.locals[i], next));
    return out;
}

NodeRef SymbolicModel::to_next(NodeRef cur_set)
{
    std::map<VarId, VarId> mapping;
    for (std::size_t j = 0; j < enc_.cur_vars.size(); ++j)
        mapping[enc_.cur_vars[j]] = enc_.next_vars[j];
    return mgr_.rename(cur_set, mapping);
}

NodeRef SymbolicModel::to_cur(NodeRef next_set)
{
    std::map<VarId, VarId> mapping;
    for (std::size_t j = 0; j < enc_.cur_vars.size(); ++j)
        mapping[enc_.next_vars[j]] = enc_.cur_vars[j];
    return mgr_.rename(next_set, mapping);
}

void SymbolicModel::compute_reachable()
{
    NodeRef q = mgr_.bdd_false();
    while (true) {
        NodeRef image = to_cur(mgr_.and_exists(q, trans_states_, enc_.cur_vars));
        NodeRef next = mgr_.or_(init_, image);
        if (next == q)
            break;
        q = next;
        ++stats_.reach_iterations;
    }
    reach_ = q;
}

void SymbolicModel::check_determinism()
{
    NodeRef enabled_states = mgr_.bdd_true();
    for (std::uint32_t i = 0; i < system_.agents.size(); ++i) {
        const auto& agent = system_.agents[i];
        NodeRef enabled = mgr_.bdd_false();
        for (std::uint32_t s = 0; s < agent.local_states.size(); ++s)
            for (auto x : agent.protocol[s])
                enabled = mgr_.or_(enabled, mgr_.and_(local_is(i, s), action_is(i, x)));
        enabled_states = mgr_.and_(enabled_states, enabled);
    }
    NodeRef scope = mgr_.and_(reach_, enabled_states);
    for (const auto& agent : system_.agents) {
        for (std::size_t r = 0; r < agent.evolution.size(); ++r) {
            NodeRef gr = mgr_.and_(scope, condition(agent.evolution[r].guard));
            for (std::size_t q = r + 1; q < agent.evolution.size(); ++q)
                if (!mgr_.and_(gr, condition(agent.evolution[q].guard)).is_false())
                    throw model::NondeterminismError("agent " + agent.name +
                                                     " has several matching evolution rules in a reachable state");
        }
    }
}

NodeRef SymbolicModel::pre_relation(NodeRef relation, NodeRef target)
{
    return mgr_.and_(reach_, mgr_.and_exists(relation, to_next(target), enc_.next_vars));
}

NodeRef SymbolicModel::pre_exists(NodeRef target)
{
    return pre_relation(trans_states_, target);
}

NodeRef SymbolicModel::pre_forall(NodeRef target)
{
    return mgr_.and_(reach_, mgr_.negate(pre_exists(mgr_.and_(reach_, mgr_.negate(target)))));
}

bool SymbolicModel::contains(NodeRef set, const model::GlobalState& g) const
{
    std::vector<bool> asg(enc_.var_count, false);
    for (std::uint32_t i = 0; i < g.locals.size(); ++i) {
        const auto& bits = enc_.agents[i].cur;
        for (std::size_t j = 0; j < bits.size(); ++j)
            asg[bits[j].index] = g.locals[i] >> j & 1;
    }
    return mgr_.eval(set, asg);
}

bdd::BigCount SymbolicModel::count_states(NodeRef set)
{
    bdd::BigCount all = mgr_.sat_count(set, enc_.var_count);
    return all >> (enc_.var_count - enc_.state_bits());
}

NodeRef SymbolicModel::group_relation(const std::vector<std::uint32_t>& group, bool intersect)
{
    NodeRef rel = intersect ? mgr_.bdd_true() : mgr_.bdd_false();
    for (auto i : group)
        rel = intersect ? mgr_.and_(rel, epistemic_[i]) : mgr_.or_(rel, epistemic_[i]);
    return rel;
}

NodeRef SymbolicModel::sat_set(const logic::Formula& f)
{
    check_names(system_, f);
    return eval(f);
}

bool SymbolicModel::check(const logic::Formula& f)
{
    NodeRef s = sat_set(f);
    return mgr_.and_(init_, mgr_.negate(s)).is_false();
}

NodeRef SymbolicModel::eval(const logic::Formula& f)
{
    using logic::Op;
    const auto& a = f.args;
    auto neg = [&](NodeRef x) { return mgr_.and_(reach_, mgr_.negate(x)); };
    auto lfp = [&](auto step) {
        NodeRef z = mgr_.bdd_false();
        while (true) {
            NodeRef next = step(z);
            ++stats_.fixpoint_iterations;
            if (next == z)
                return z;
            z = next;
        }
    };
    auto gfp = [&](auto step) {
        NodeRef z = reach_;
        while (true) {
            NodeRef next = step(z);
            ++stats_.fixpoint_iterations;
            if (next == z)
                return z;
            z = next;
        }
    };
    auto eu = [&](NodeRef lhs, NodeRef rhs) {
        return lfp([&](NodeRef z) { return mgr_.or_(rhs, mgr_.and_(lhs, pre_exists(z))); });
    };
    auto au = [&](NodeRef lhs, NodeRef rhs) {
        NodeRef live = pre_exists(reach_);
        return lfp([&](NodeRef z) {
            return mgr_.or_(rhs, mgr_.and_(mgr_.and_(lhs, live), pre_forall(z)));
        });
    };
    // States with some related reachable state in `target`.
    auto diamond = [&](NodeRef relation, NodeRef target) { return pre_relation(relation, target); };

    switch (f.op) {
    case Op::True: return reach_;
    case Op::False: return mgr_.bdd_false();
    case Op::Atom:
        return mgr_.and_(reach_, condition(system_.atoms[resolve_atom(system_, f.name)].condition));
    case Op::Not: return neg(eval(*a[0]));
    case Op::And: return mgr_.and_(eval(*a[0]), eval(*a[1]));
    case Op::Or: return mgr_.or_(eval(*a[0]), eval(*a[1]));
    case Op::Implies: return mgr_.or_(neg(eval(*a[0])), eval(*a[1]));
    case Op::EX: return pre_exists(eval(*a[0]));
    case Op::AX: return pre_forall(eval(*a[0]));
    case Op::EU: return eu(eval(*a[0]), eval(*a[1]));
    case Op::EF: return eu(reach_, eval(*a[0]));
    case Op::AU: return au(eval(*a[0]), eval(*a[1]));
    case Op::AF: return au(reach_, eval(*a[0]));
    case Op::AG: return neg(eu(reach_, neg(eval(*a[0]))));
    case Op::EG: {
        NodeRef inner = eval(*a[0]);
        NodeRef deadlock = neg(pre_exists(reach_));
        return gfp([&](NodeRef z) { return mgr_.and_(inner, mgr_.or_(deadlock, pre_exists(z))); });
    }
    case Op::AW: {
        NodeRef lhs = eval(*a[0]);
        NodeRef rhs = eval(*a[1]);
        return gfp([&](NodeRef z) { return mgr_.or_(rhs, mgr_.and_(lhs, pre_forall(z))); });
    }
    case Op::AY:
    case Op::AH:
        throw UnsupportedOperator("the OBDD backend does not support past operator " +
                                  std::string(logic::op_name(f.op)));
    case Op::K:
    case Op::Kbar: {
        NodeRef rel = epistemic_[resolve_agent(system_, f.name)];
        NodeRef inner = eval(*a[0]);
        return f.op == Op::Kbar ? diamond(rel, inner) : neg(diamond(rel, neg(inner)));
    }
    case Op::E:
    case Op::Ebar:
    case Op::D:
    case Op::Dbar: {
        const bool intersect = f.op == Op::D || f.op == Op::Dbar;
        NodeRef rel = group_relation(resolve_group(system_, f.group), intersect);
        NodeRef inner = eval(*a[0]);
        const bool bar = f.op == Op::Ebar || f.op == Op::Dbar;
        return bar ? diamond(rel, inner) : neg(diamond(rel, neg(inner)));
    }
    case Op::C:
    case Op::Cbar: {
        NodeRef rel = group_relation(resolve_group(system_, f.group), false);
        NodeRef inner = eval(*a[0]);
        if (f.op == Op::Cbar)
            inner = neg(inner);
        // Greatest fixpoint of Q = E(inner and Q).
        NodeRef q = reach_;
        while (true) {
            NodeRef next = neg(diamond(rel, neg(mgr_.and_(inner, q))));
            ++stats_.common_knowledge_iterations;
            if (next == q)
                break;
            q = next;
        }
        return f.op == Op::C ? q : neg(q);
    }
    }
    throw UnsupportedOperator("OBDD backend: unknown operator");
}

} // namespace epimc::symbolic
