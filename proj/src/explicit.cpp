#include "epimc/explicit.hpp"

#include "epimc/resolve.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>

namespace epimc::model {

std::optional<std::uint32_t> ExplicitModel::find(const GlobalState& g) const
{
    auto it = index_.find(g);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t ExplicitModel::edge_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& s : succ_)
        n += s.size();
    return n;
}

ExplicitModel build_explicit_model(const InterpretedSystem& is, ExplicitOptions options)
{
    if (auto problems = is.validate(); !problems.empty())
        throw InvalidArgument("ill-formed system: " + problems.front());

    ExplicitModel m;
    m.system_ = is;
    auto intern = [&](const GlobalState& g, std::uint32_t depth) -> std::uint32_t {
        auto [it, inserted] = m.index_.try_emplace(g, static_cast<std::uint32_t>(m.states_.size()));
        if (inserted) {
            if (m.states_.size() >= options.max_states)
                throw StateExplosionError(options.max_states);
            m.states_.push_back(g);
            m.depth_.push_back(depth);
            m.max_depth_ = std::max(m.max_depth_, depth);
        }
        return it->second;
    };

    intern(GlobalState{is.initial_state}, 0);
    for (std::uint32_t cur = 0; cur < m.states_.size(); ++cur) {
        auto transitions = model::successors(is, m.states_[cur], options.deterministic);
        std::vector<Edge> edges;
        edges.reserve(transitions.size());
        for (auto& t : transitions) {
            std::uint32_t target = intern(t.target, m.depth_[cur] + 1);
            edges.push_back({target, std::move(t.action)});
        }
        m.edges_.push_back(std::move(edges));
    }

    const std::size_t n = m.states_.size();
    m.succ_.resize(n);
    m.pred_.resize(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        auto& out = m.succ_[s];
        for (const auto& e : m.edges_[s])
            out.push_back(e.target);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        for (auto t : out)
            m.pred_[t].push_back(s);
    }
    return m;
}

bool epistemic_related(const ExplicitModel& m, std::uint32_t a, std::uint32_t b, std::uint32_t agent)
{
    if (agent >= m.system().agents.size())
        throw InvalidArgument("invalid agent index " + std::to_string(agent));
    return m.state(a).locals[agent] == m.state(b).locals[agent];
}

namespace {

using logic::Formula;
using logic::Op;

class Checker {
public:
    explicit Checker(const ExplicitModel& m) : m_(m), n_(m.size())
    {
        has_succ_ = m_.empty_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            if (!m_.successors(s).empty())
                has_succ_.set(s);
    }

    StateSet eval(const Formula& f)
    {
        const auto& a = f.args;
        switch (f.op) {
        case Op::True: return m_.full_set();
        case Op::False: return m_.empty_set();
        case Op::Atom: return atom(f.name);
        case Op::Not: return ~eval(*a[0]);
        case Op::And: return eval(*a[0]) & eval(*a[1]);
        case Op::Or: return eval(*a[0]) | eval(*a[1]);
        case Op::Implies: return ~eval(*a[0]) | eval(*a[1]);
        case Op::EX: return pre_exists(eval(*a[0]));
        case Op::AX: return pre_forall(eval(*a[0]));
        case Op::EF: return eu(m_.full_set(), eval(*a[0]));
        case Op::EU: return eu(eval(*a[0]), eval(*a[1]));
        case Op::AF: return au(m_.full_set(), eval(*a[0]));
        case Op::AU: return au(eval(*a[0]), eval(*a[1]));
        case Op::AW: {
            auto lhs = eval(*a[0]);
            auto rhs = eval(*a[1]);
            return gfp([&](const StateSet& z) { return rhs | (lhs & pre_forall(z)); });
        }
        case Op::EG: {
            auto inner = eval(*a[0]);
            auto deadlock = ~has_succ_;
            return gfp([&](const StateSet& z) { return inner & (deadlock | pre_exists(z)); });
        }
        case Op::AG: {
            auto inner = eval(*a[0]);
            return gfp([&](const StateSet& z) { return inner & pre_forall(z); });
        }
        case Op::AY: return yesterday(eval(*a[0]));
        case Op::AH: {
            auto inner = eval(*a[0]);
            return gfp([&](const StateSet& z) { return inner & yesterday(z); });
        }
        case Op::K:
        case Op::Kbar: {
            std::vector<std::uint32_t> group{resolve_agent(m_.system(), f.name)};
            return f.op == Op::K ? distributed(group, eval(*a[0])) : ~distributed(group, ~eval(*a[0]));
        }
        case Op::E:
        case Op::Ebar: {
            auto group = resolve_group(m_.system(), f.group);
            auto inner = eval(*a[0]);
            if (f.op == Op::Ebar)
                inner.flip();
            auto out = m_.full_set();
            for (auto i : group)
                out &= distributed({i}, inner);
            return f.op == Op::E ? out : ~out;
        }
        case Op::D:
        case Op::Dbar: {
            auto group = resolve_group(m_.system(), f.group);
            return f.op == Op::D ? distributed(group, eval(*a[0])) : ~distributed(group, ~eval(*a[0]));
        }
        case Op::C:
        case Op::Cbar: {
            auto group = resolve_group(m_.system(), f.group);
            return f.op == Op::C ? common(group, eval(*a[0])) : ~common(group, ~eval(*a[0]));
        }
        }
        throw UnsupportedOperator("explicit checker: unknown operator");
    }

private:
    StateSet atom(const std::string& name)
    {
        const auto& cond = m_.system().atoms[resolve_atom(m_.system(), name)].condition;
        auto out = m_.empty_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            if (holds(cond, m_.state(s).locals))
                out.set(s);
        return out;
    }

    StateSet pre_exists(const StateSet& z) const
    {
        auto out = m_.empty_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            for (auto t : m_.successors(s))
                if (z.test(t)) {
                    out.set(s);
                    break;
                }
        return out;
    }

    StateSet pre_forall(const StateSet& z) const
    {
        auto out = m_.full_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            for (auto t : m_.successors(s))
                if (!z.test(t)) {
                    out.reset(s);
                    break;
                }
        return out;
    }

    StateSet yesterday(const StateSet& z) const
    {
        auto out = m_.full_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            for (auto p : m_.predecessors(s))
                if (!z.test(p)) {
                    out.reset(s);
                    break;
                }
        return out;
    }

    template <class Step>
    StateSet gfp(Step step) const
    {
        auto z = m_.full_set();
        while (true) {
            auto next = step(z);
            if (next == z)
                return z;
            z = std::move(next);
        }
    }

    template <class Step>
    StateSet lfp(Step step) const
    {
        auto z = m_.empty_set();
        while (true) {
            auto next = step(z);
            if (next == z)
                return z;
            z = std::move(next);
        }
    }

    StateSet eu(const StateSet& lhs, const StateSet& rhs) const
    {
        return lfp([&](const StateSet& z) { return rhs | (lhs & pre_exists(z)); });
    }

    StateSet au(const StateSet& lhs, const StateSet& rhs) const
    {
        return lfp([&](const StateSet& z) { return rhs | (lhs & has_succ_ & pre_forall(z)); });
    }

    // States all of whose group-indistinguishable states satisfy `inner`.
    // With a single agent this is K, with several it is distributed knowledge.
    StateSet distributed(const std::vector<std::uint32_t>& group, const StateSet& inner) const
    {
        std::map<std::vector<std::uint32_t>, bool> all_in;
        std::vector<std::vector<std::uint32_t>> keys(n_);
        for (std::uint32_t s = 0; s < n_; ++s) {
            for (auto i : group)
                keys[s].push_back(m_.state(s).locals[i]);
            auto [it, _] = all_in.try_emplace(keys[s], true);
            if (!inner.test(s))
                it->second = false;
        }
        auto out = m_.empty_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            if (all_in[keys[s]])
                out.set(s);
        return out;
    }

    // States whose component under the union of the group's relations lies
    // inside `inner`.
    StateSet common(const std::vector<std::uint32_t>& group, const StateSet& inner) const
    {
        std::vector<std::uint32_t> parent(n_);
        std::iota(parent.begin(), parent.end(), 0u);
        auto find = [&](std::uint32_t x) {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto i : group) {
            std::map<std::uint32_t, std::uint32_t> first;
            for (std::uint32_t s = 0; s < n_; ++s) {
                auto [it, inserted] = first.try_emplace(m_.state(s).locals[i], s);
                if (!inserted)
                    parent[find(s)] = find(it->second);
            }
        }
        std::vector<char> bad(n_, 0);
        for (std::uint32_t s = 0; s < n_; ++s)
            if (!inner.test(s))
                bad[find(s)] = 1;
        auto out = m_.empty_set();
        for (std::uint32_t s = 0; s < n_; ++s)
            if (!bad[find(s)])
                out.set(s);
        return out;
    }

    const ExplicitModel& m_;
    std::size_t n_;
    StateSet has_succ_;
};

} // namespace

StateSet check_explicit(const ExplicitModel& m, const logic::Formula& f)
{
    check_names(m.system(), f);
    return Checker(m).eval(f);
}

bool holds_initially(const ExplicitModel& m, const logic::Formula& f)
{
    return check_explicit(m, f).test(m.initial());
}

// ---------------------------------------------------------------------------

namespace {

Condition random_guard(std::mt19937_64& rng, const InterpretedSystem& is, std::uint32_t owner, int depth)
{
    const auto pick = rng() % (depth > 0 ? 4 : 2);
    if (pick == 0)
        return Condition::local_is(owner, rng() % is.agents[owner].local_states.size());
    if (pick == 1) {
        std::uint32_t agent = rng() % is.agents.size();
        return Condition::action_is(agent, rng() % is.agents[agent].actions.size());
    }
    std::vector<Condition> parts{random_guard(rng, is, owner, depth - 1), random_guard(rng, is, owner, depth - 1)};
    return pick == 2 ? Condition::conjunction(std::move(parts)) : Condition::disjunction(std::move(parts));
}

Condition random_valuation(std::mt19937_64& rng, const InterpretedSystem& is, int depth)
{
    const auto pick = rng() % (depth > 0 ? 4 : 1);
    if (pick == 0) {
        std::uint32_t agent = rng() % is.agents.size();
        return Condition::local_is(agent, rng() % is.agents[agent].local_states.size());
    }
    if (pick == 1)
        return Condition::negation(random_valuation(rng, is, depth - 1));
    std::vector<Condition> parts{random_valuation(rng, is, depth - 1), random_valuation(rng, is, depth - 1)};
    return pick == 2 ? Condition::conjunction(std::move(parts)) : Condition::disjunction(std::move(parts));
}

} // namespace

InterpretedSystem generate_random_system(std::uint64_t seed, RandomBounds bounds)
{
    if (bounds.max_agents == 0 || bounds.max_locals == 0 || bounds.max_actions == 0)
        throw InvalidArgument("random system bounds must be positive");
    std::mt19937_64 rng(seed);
    InterpretedSystem is;
    const std::uint32_t n_agents = 1 + rng() % bounds.max_agents;
    for (std::uint32_t i = 0; i < n_agents; ++i) {
        AgentDef a;
        a.name = "Ag" + std::to_string(i + 1);
        const std::uint32_t n_locals = 1 + rng() % bounds.max_locals;
        const std::uint32_t n_actions = 1 + rng() % bounds.max_actions;
        for (std::uint32_t s = 0; s < n_locals; ++s)
            a.local_states.push_back("s" + std::to_string(s));
        for (std::uint32_t x = 0; x < n_actions; ++x)
            a.actions.push_back("act" + std::to_string(x));
        for (std::uint32_t s = 0; s < n_locals; ++s) {
            const std::uint64_t mask = 1 + rng() % ((1u << n_actions) - 1);
            std::vector<std::uint32_t> enabled;
            for (std::uint32_t x = 0; x < n_actions; ++x)
                if (mask >> x & 1)
                    enabled.push_back(x);
            a.protocol.push_back(std::move(enabled));
        }
        is.agents.push_back(std::move(a));
    }
    for (std::uint32_t i = 0; i < n_agents; ++i) {
        auto& a = is.agents[i];
        const std::uint32_t n_rules = rng() % (a.local_states.size() + 2);
        for (std::uint32_t r = 0; r < n_rules; ++r) {
            EvolutionRule rule;
            rule.target = rng() % a.local_states.size();
            rule.guard = random_guard(rng, is, i, 2);
            a.evolution.push_back(std::move(rule));
        }
        is.initial_state.push_back(rng() % a.local_states.size());
    }
    const std::uint32_t n_atoms = 2 + rng() % 2;
    static const char* names[] = {"p", "q", "r"};
    for (std::uint32_t k = 0; k < n_atoms; ++k)
        is.atoms.push_back({names[k], random_valuation(rng, is, 2)});
    return is;
}

} // namespace epimc::model
