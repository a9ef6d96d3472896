#include "epimc/system.hpp"

#include "epimc/error.hpp"

#include <algorithm>
#include <set>

namespace epimc::model {

Condition Condition::truth(bool value)
{
    Condition c;
    c.kind = value ? Kind::True : Kind::False;
    return c;
}

Condition Condition::local_is(std::uint32_t agent, std::uint32_t state)
{
    Condition c;
    c.kind = Kind::LocalIs;
    c.agent = agent;
    c.value = state;
    return c;
}

Condition Condition::action_is(std::uint32_t agent, std::uint32_t action)
{
    Condition c;
    c.kind = Kind::ActionIs;
    c.agent = agent;
    c.value = action;
    return c;
}

Condition Condition::negation(Condition inner)
{
    Condition c;
    c.kind = Kind::Not;
    c.children.push_back(std::move(inner));
    return c;
}

namespace {

Condition nary(Condition::Kind kind, std::vector<Condition> cs)
{
    if (cs.size() == 1)
        return std::move(cs.front());
    Condition c;
    c.kind = kind;
    for (auto& child : cs) {
        if (child.kind == kind)
            for (auto& grand : child.children)
                c.children.push_back(std::move(grand));
        else
            c.children.push_back(std::move(child));
    }
    return c;
}

} // namespace

Condition Condition::conjunction(std::vector<Condition> cs)
{
    if (cs.empty())
        return truth(true);
    return nary(Kind::And, std::move(cs));
}

Condition Condition::disjunction(std::vector<Condition> cs)
{
    if (cs.empty())
        return truth(false);
    return nary(Kind::Or, std::move(cs));
}

std::optional<std::uint32_t> AgentDef::find_state(std::string_view n) const
{
    auto it = std::find(local_states.begin(), local_states.end(), n);
    if (it == local_states.end())
        return std::nullopt;
    return static_cast<std::uint32_t>(it - local_states.begin());
}

std::optional<std::uint32_t> AgentDef::find_action(std::string_view n) const
{
    auto it = std::find(actions.begin(), actions.end(), n);
    if (it == actions.end())
        return std::nullopt;
    return static_cast<std::uint32_t>(it - actions.begin());
}

std::optional<std::uint32_t> InterpretedSystem::find_agent(std::string_view n) const
{
    for (std::uint32_t i = 0; i < agents.size(); ++i)
        if (agents[i].name == n)
            return i;
    return std::nullopt;
}

std::optional<std::uint32_t> InterpretedSystem::find_atom(std::string_view n) const
{
    for (std::uint32_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].name == n)
            return i;
    return std::nullopt;
}

std::vector<std::string> InterpretedSystem::agent_names() const
{
    std::vector<std::string> out;
    for (const auto& a : agents)
        out.push_back(a.name);
    return out;
}

namespace {

void check_condition(const InterpretedSystem& is, const Condition& c, bool allow_actions, const std::string& where,
                     std::vector<std::string>& problems)
{
    switch (c.kind) {
    case Condition::Kind::True:
    case Condition::Kind::False:
        return;
    case Condition::Kind::LocalIs:
        if (c.agent >= is.agents.size())
            problems.push_back(where + ": unknown agent index " + std::to_string(c.agent));
        else if (c.value >= is.agents[c.agent].local_states.size())
            problems.push_back(where + ": unknown local state index for agent " + is.agents[c.agent].name);
        return;
    case Condition::Kind::ActionIs:
        if (!allow_actions)
            problems.push_back(where + ": action condition not allowed here");
        else if (c.agent >= is.agents.size())
            problems.push_back(where + ": unknown agent index " + std::to_string(c.agent));
        else if (c.value >= is.agents[c.agent].actions.size())
            problems.push_back(where + ": unknown action index for agent " + is.agents[c.agent].name);
        return;
    case Condition::Kind::Not:
    case Condition::Kind::And:
    case Condition::Kind::Or:
        if (c.children.empty())
            problems.push_back(where + ": empty connective");
        for (const auto& child : c.children)
            check_condition(is, child, allow_actions, where, problems);
        return;
    }
}

} // namespace

std::vector<std::string> InterpretedSystem::validate() const
{
    std::vector<std::string> problems;
    if (agents.empty())
        problems.push_back("system declares no agents");
    std::set<std::string> agent_seen;
    for (std::uint32_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        if (!agent_seen.insert(a.name).second)
            problems.push_back("duplicate agent " + a.name);
        if (a.local_states.empty())
            problems.push_back("agent " + a.name + " has no local states");
        if (a.actions.empty())
            problems.push_back("agent " + a.name + " has no actions");
        std::set<std::string> names(a.local_states.begin(), a.local_states.end());
        if (names.size() != a.local_states.size())
            problems.push_back("agent " + a.name + " has duplicate local states");
        names = std::set<std::string>(a.actions.begin(), a.actions.end());
        if (names.size() != a.actions.size())
            problems.push_back("agent " + a.name + " has duplicate actions");
        if (a.protocol.size() != a.local_states.size())
            problems.push_back("agent " + a.name + " protocol does not cover every local state");
        for (const auto& enabled : a.protocol)
            for (auto act : enabled)
                if (act >= a.actions.size())
                    problems.push_back("agent " + a.name + " protocol uses an undeclared action");
        for (const auto& rule : a.evolution) {
            if (rule.target >= a.local_states.size())
                problems.push_back("agent " + a.name + " evolution targets an undeclared state");
            check_condition(*this, rule.guard, true, "agent " + a.name + " evolution", problems);
            // Guards may test only the owner's local state.
            std::vector<const Condition*> stack{&rule.guard};
            while (!stack.empty()) {
                const Condition* c = stack.back();
                stack.pop_back();
                if (c->kind == Condition::Kind::LocalIs && c->agent != i)
                    problems.push_back("agent " + a.name + " evolution guard reads another agent's local state");
                for (const auto& ch : c->children)
                    stack.push_back(&ch);
            }
        }
    }
    if (initial_state.size() != agents.size())
        problems.push_back("initial state does not assign every agent");
    else
        for (std::size_t i = 0; i < agents.size(); ++i)
            if (initial_state[i] >= agents[i].local_states.size())
                problems.push_back("initial state of " + agents[i].name + " is undeclared");
    std::set<std::string> atom_seen;
    for (const auto& atom : atoms) {
        if (!atom_seen.insert(atom.name).second)
            problems.push_back("duplicate atom " + atom.name);
        check_condition(*this, atom.condition, false, "atom " + atom.name, problems);
    }
    return problems;
}

bool holds(const Condition& c, LocalStates locals, std::span<const std::uint32_t> actions)
{
    switch (c.kind) {
    case Condition::Kind::True:
        return true;
    case Condition::Kind::False:
        return false;
    case Condition::Kind::LocalIs:
        return locals[c.agent] == c.value;
    case Condition::Kind::ActionIs:
        return c.agent < actions.size() && actions[c.agent] == c.value;
    case Condition::Kind::Not:
        return !holds(c.children.front(), locals, actions);
    case Condition::Kind::And:
        return std::all_of(c.children.begin(), c.children.end(),
                           [&](const Condition& ch) { return holds(ch, locals, actions); });
    case Condition::Kind::Or:
        return std::any_of(c.children.begin(), c.children.end(),
                           [&](const Condition& ch) { return holds(ch, locals, actions); });
    }
    return false;
}

std::size_t GlobalStateHash::operator()(const GlobalState& g) const noexcept
{
    std::size_t h = g.locals.size();
    for (auto v : g.locals)
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::vector<Transition> successors(const InterpretedSystem& is, const GlobalState& g, bool deterministic)
{
    const std::size_t n = is.agents.size();
    std::vector<Transition> out;
    std::vector<const std::vector<std::uint32_t>*> enabled(n);
    for (std::size_t i = 0; i < n; ++i) {
        enabled[i] = &is.agents[i].protocol[g.locals[i]];
        if (enabled[i]->empty())
            return out;
    }

    JointAction act(n);
    std::vector<std::size_t> pick(n, 0);
    std::vector<std::vector<std::uint32_t>> choices(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            act[i] = (*enabled[i])[pick[i]];

        for (std::size_t i = 0; i < n; ++i) {
            auto& targets = choices[i];
            targets.clear();
            for (const auto& rule : is.agents[i].evolution)
                if (holds(rule.guard, g.locals, act))
                    targets.push_back(rule.target);
            if (deterministic && targets.size() > 1)
                throw NondeterminismError("agent " + is.agents[i].name +
                                          " has several matching evolution rules in " + describe(is, g));
            if (targets.empty())
                targets.push_back(g.locals[i]);
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        }

        std::vector<std::size_t> choice(n, 0);
        while (true) {
            GlobalState next;
            next.locals.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                next.locals[i] = choices[i][choice[i]];
            out.push_back({act, std::move(next)});
            std::size_t i = 0;
            while (i < n && ++choice[i] == choices[i].size())
                choice[i++] = 0;
            if (i == n)
                break;
        }

        std::size_t i = 0;
        while (i < n && ++pick[i] == enabled[i]->size())
            pick[i++] = 0;
        if (i == n)
            break;
    }
    return out;
}

std::string describe(const InterpretedSystem& is, const GlobalState& g)
{
    std::string out = "(";
    for (std::size_t i = 0; i < g.locals.size(); ++i) {
        if (i)
            out += ", ";
        out += is.agents[i].name + "=" + is.agents[i].local_states[g.locals[i]];
    }
    return out + ")";
}

} // namespace epimc::model
