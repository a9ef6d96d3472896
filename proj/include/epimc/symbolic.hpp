#pragma once

// OBDD backend: Boolean encoding of an interpreted system, reachability and
// the fixpoint labelling algorithms for CTLK.
//
// Variable order: action bits first (last agent's first), then for each agent in
// declaration order its current and next bits interleaved (cur0 next0 cur1
// next1 ...). Local states and actions get binary codes by declaration order;
// codes past the declared count are excluded by domain constraints.

#include "epimc/bdd.hpp"
#include "epimc/formula.hpp"
#include "epimc/system.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace epimc::symbolic {

using bdd::NodeRef;
using bdd::VarId;

class EncodingError : public Error {
public:
    using Error::Error;
};

struct AgentBits {
    std::uint32_t n_locals = 0;
    std::uint32_t n_actions = 0;
    std::vector<VarId> cur;  // least significant bit first
    std::vector<VarId> next;
    std::vector<VarId> act;
};

struct StateEncoding {
    std::vector<AgentBits> agents;
    std::uint32_t var_count = 0;
    std::vector<VarId> cur_vars;
    std::vector<VarId> next_vars;
    std::vector<VarId> action_vars;

    std::uint32_t state_bits() const noexcept { return static_cast<std::uint32_t>(cur_vars.size()); }
};

std::uint32_t bit_width(std::uint32_t values);
StateEncoding make_encoding(const model::InterpretedSystem& is);

struct SymbolicStats {
    std::size_t reach_iterations = 0;
    std::size_t fixpoint_iterations = 0;
    std::size_t common_knowledge_iterations = 0;
};

class SymbolicModel {
public:
    struct Options {
        bool deterministic = false;
    };

    explicit SymbolicModel(const model::InterpretedSystem& is) : SymbolicModel(is, Options{}) {}
    SymbolicModel(const model::InterpretedSystem& is, Options options);

    SymbolicModel(const SymbolicModel&) = delete;
    SymbolicModel& operator=(const SymbolicModel&) = delete;

    const model::InterpretedSystem& system() const noexcept { return system_; }
    const StateEncoding& encoding() const noexcept { return enc_; }
    bdd::Manager& manager() noexcept { return mgr_; }

    NodeRef initial() const noexcept { return init_; }
    // Over current, action and next variables; built on first use.
    NodeRef transition();
    // Transition with the action variables quantified away.
    NodeRef state_transition() const noexcept { return trans_states_; }
    NodeRef domain(bool next = false) const noexcept { return next ? dom_next_ : dom_cur_; }
    NodeRef reachable() const noexcept { return reach_; }
    // Equality of agent i's current and next blocks.
    NodeRef epistemic(std::uint32_t agent) const { return epistemic_.at(agent); }
    const SymbolicStats& stats() const noexcept { return stats_; }

    NodeRef local_is(std::uint32_t agent, std::uint32_t state, bool next = false);
    NodeRef action_is(std::uint32_t agent, std::uint32_t action);
    NodeRef condition(const model::Condition& c, bool next = false);
    NodeRef encode_state(const model::GlobalState& g, bool next = false);

    NodeRef to_next(NodeRef cur_set);
    NodeRef to_cur(NodeRef next_set);
    // States of `within` with some / every successor inside `target`.
    NodeRef pre_exists(NodeRef target);
    NodeRef pre_forall(NodeRef target);

    bool contains(NodeRef set, const model::GlobalState& g) const;
    // Number of current-state codes in `set` (a set over current variables).
    bdd::BigCount count_states(NodeRef set);

    // Satisfaction set of `f`, always a subset of the reachable states.
    // AY and AH are not supported here.
    NodeRef sat_set(const logic::Formula& f);
    bool check(const logic::Formula& f);

private:
    NodeRef value_is(const std::vector<VarId>& bits, std::uint32_t value);
    NodeRef pre_relation(NodeRef relation, NodeRef target);
    NodeRef group_relation(const std::vector<std::uint32_t>& group, bool intersect);
    NodeRef eval(const logic::Formula& f);
    void compute_reachable();
    void check_determinism();

    model::InterpretedSystem system_;
    StateEncoding enc_;
    bdd::Manager mgr_;
    NodeRef init_, trans_states_, dom_cur_, dom_next_, reach_;
    std::optional<NodeRef> trans_;
    std::vector<NodeRef> local_trans_;
    std::vector<NodeRef> epistemic_;
    SymbolicStats stats_;
};

} // namespace epimc::symbolic
