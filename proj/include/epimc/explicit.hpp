#pragma once

// Explicit reachable graph of an interpreted system and the reference
// CTLpK checker used as the oracle for the symbolic backends.
//
// Paths are maximal: a state without successors ends every path through it.
// AX holds vacuously at such a state, AF/AU need the goal reached on every
// maximal path, and EG is satisfied by a finite path ending in a deadlock.
// Backward paths end at states without predecessors, where AY is vacuous.
// Epistemic operators range over reachable states only.

#include "epimc/formula.hpp"
#include "epimc/system.hpp"

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace epimc::model {

using StateSet = boost::dynamic_bitset<>;

struct ExplicitOptions {
    std::size_t max_states = 1'000'000;
    bool deterministic = false;
};

struct Edge {
    std::uint32_t target = 0;
    JointAction action;
};

class ExplicitModel {
public:
    const InterpretedSystem& system() const noexcept { return system_; }
    std::size_t size() const noexcept { return states_.size(); }
    std::uint32_t initial() const noexcept { return 0; }

    const GlobalState& state(std::uint32_t idx) const { return states_.at(idx); }
    const std::vector<GlobalState>& states() const noexcept { return states_; }
    std::optional<std::uint32_t> find(const GlobalState& g) const;

    // Labeled edges in generation order; one entry per joint action.
    const std::vector<Edge>& edges(std::uint32_t idx) const { return edges_.at(idx); }
    // Distinct successor / predecessor indices, ascending.
    const std::vector<std::uint32_t>& successors(std::uint32_t idx) const { return succ_.at(idx); }
    const std::vector<std::uint32_t>& predecessors(std::uint32_t idx) const { return pred_.at(idx); }
    std::size_t edge_count() const noexcept;

    // Breadth-first distance from the initial state.
    std::uint32_t depth(std::uint32_t idx) const { return depth_.at(idx); }
    // Largest such distance.
    std::uint32_t max_depth() const noexcept { return max_depth_; }

    StateSet empty_set() const { return StateSet(states_.size()); }
    StateSet full_set() const { return ~StateSet(states_.size()); }

private:
    friend ExplicitModel build_explicit_model(const InterpretedSystem&, ExplicitOptions);

    InterpretedSystem system_;
    std::vector<GlobalState> states_;
    std::unordered_map<GlobalState, std::uint32_t, GlobalStateHash> index_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<std::vector<std::uint32_t>> succ_;
    std::vector<std::vector<std::uint32_t>> pred_;
    std::vector<std::uint32_t> depth_;
    std::uint32_t max_depth_ = 0;
};

// Breadth-first closure from the initial state. Throws StateExplosionError
// once more than `max_states` states are found.
ExplicitModel build_explicit_model(const InterpretedSystem& is, ExplicitOptions options = {});

// Agent `agent` cannot distinguish states `a` and `b`.
bool epistemic_related(const ExplicitModel& m, std::uint32_t a, std::uint32_t b, std::uint32_t agent);

// Satisfaction set of `f` over the reachable states.
StateSet check_explicit(const ExplicitModel& m, const logic::Formula& f);
inline StateSet check_explicit(const ExplicitModel& m, const logic::FormulaPtr& f) { return check_explicit(m, *f); }

// Whether the initial state satisfies `f`.
bool holds_initially(const ExplicitModel& m, const logic::Formula& f);

struct RandomBounds {
    std::uint32_t max_agents = 3;
    std::uint32_t max_locals = 4;
    std::uint32_t max_actions = 3;
};

// Deterministic in `seed`: every local state gets a nonempty protocol, guards
// are random and atoms p, q (and sometimes r) are random conditions.
InterpretedSystem generate_random_system(std::uint64_t seed, RandomBounds bounds = {});

} // namespace epimc::model
