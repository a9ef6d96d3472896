#pragma once

// Interpreted systems: agents (the environment is by convention the last
// agent) with local states, actions, protocols and evolution rules, a single
// initial global state, and atoms valued by conditions over local states.

#include "epimc/error.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epimc::model {

// Boolean condition over local states and performed actions. Evolution guards
// use LocalIs only for the owning agent; atom valuations never use ActionIs.
struct Condition {
    enum class Kind : std::uint8_t { True, False, LocalIs, ActionIs, Not, And, Or };

    Kind kind = Kind::True;
    std::uint32_t agent = 0;
    std::uint32_t value = 0; // local-state or action index
    std::vector<Condition> children;

    static Condition truth(bool value);
    static Condition local_is(std::uint32_t agent, std::uint32_t state);
    static Condition action_is(std::uint32_t agent, std::uint32_t action);
    static Condition negation(Condition c);
    static Condition conjunction(std::vector<Condition> cs);
    static Condition disjunction(std::vector<Condition> cs);

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct EvolutionRule {
    std::uint32_t target = 0;
    Condition guard;

    friend bool operator==(const EvolutionRule&, const EvolutionRule&) = default;
};

struct AgentDef {
    std::string name;
    std::vector<std::string> local_states;
    std::vector<std::string> actions;
    // protocol[s] lists the actions enabled at local state s (ascending).
    std::vector<std::vector<std::uint32_t>> protocol;
    std::vector<EvolutionRule> evolution;

    std::optional<std::uint32_t> find_state(std::string_view name) const;
    std::optional<std::uint32_t> find_action(std::string_view name) const;

    friend bool operator==(const AgentDef&, const AgentDef&) = default;
};

struct Atom {
    std::string name;
    Condition condition;

    friend bool operator==(const Atom&, const Atom&) = default;
};

struct InterpretedSystem {
    std::vector<AgentDef> agents;
    std::vector<std::uint32_t> initial_state;
    std::vector<Atom> atoms;

    std::optional<std::uint32_t> find_agent(std::string_view name) const;
    std::optional<std::uint32_t> find_atom(std::string_view name) const;
    std::vector<std::string> agent_names() const;

    // Human-readable invariant violations; empty when well-formed.
    std::vector<std::string> validate() const;

    friend bool operator==(const InterpretedSystem&, const InterpretedSystem&) = default;
};

using LocalStates = std::span<const std::uint32_t>;
using JointAction = std::vector<std::uint32_t>;

bool holds(const Condition& c, LocalStates locals, std::span<const std::uint32_t> actions = {});

struct GlobalState {
    std::vector<std::uint32_t> locals;

    friend auto operator<=>(const GlobalState&, const GlobalState&) = default;
};

struct GlobalStateHash {
    std::size_t operator()(const GlobalState& g) const noexcept;
};

struct Transition {
    JointAction action;
    GlobalState target;
};

// Thrown when `deterministic` is requested and two rules of one agent match.
class NondeterminismError : public Error {
public:
    using Error::Error;
};

// All transitions leaving `g`: one per enabled joint action and per choice of
// matching evolution rule for each agent (unchanged local state when no rule
// matches). Works for any global state, reachable or not.
std::vector<Transition> successors(const InterpretedSystem& is, const GlobalState& g, bool deterministic = false);

std::string describe(const InterpretedSystem& is, const GlobalState& g);

} // namespace epimc::model
