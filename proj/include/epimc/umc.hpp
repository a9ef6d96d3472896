#pragma once

// Unbounded SAT-based model checking for CTLpK. State sets are CNFs over one
// block of state variables w; universal operators are removed with equ_cnf
// over a second block v, and the fixpoint operators iterate those steps with
// SAT-decided equivalence tests.
//
// Every set is read relative to the reachable states R, which are computed
// first (as a least fixpoint of post-images, also by quantifier elimination).
// Blocking clauses therefore only ever exclude reachable states, and the
// epistemic relations range over reachable states as in the other backends.

#include "epimc/formula.hpp"
#include "epimc/sat.hpp"
#include "epimc/symbolic.hpp"

#include <optional>
#include <vector>

namespace epimc::umc {

// CNF over the current-state block (variables 1..m in cur_vars order);
// denotes the reachable states whose encodings satisfy it.
struct StateSetCnf {
    sat::Cnf cnf;
};

struct UmcStats {
    std::uint64_t eliminations = 0; // equ_cnf calls
    std::uint64_t blocking_clauses = 0;
    // Largest number of blocking clauses of a single elimination; at most
    // the number of reachable states.
    std::uint64_t max_blocking_per_elimination = 0;
    std::uint64_t solver_calls = 0;
    std::uint64_t fixpoint_iterations = 0;
    std::uint64_t reach_iterations = 0;
    // Steps of a greatest (least) fixpoint that failed to shrink (grow).
    std::uint64_t monotonicity_violations = 0;
};

struct UmcOptions {
    sat::SolverOptions solver;
    // E over a group as one elimination over the union of the relations
    // instead of the conjunction of the members' K.
    bool e_by_union = false;
    std::uint64_t max_blocking_clauses = 10'000'000;
};

class UmcEngine {
public:
    explicit UmcEngine(symbolic::SymbolicModel& sm, UmcOptions options = {});

    std::size_t state_bits() const noexcept { return m_; }

    StateSetCnf all() const;
    StateSetCnf none() const;
    StateSetCnf atom(const std::string& name);
    StateSetCnf negate(const StateSetCnf& s);
    StateSetCnf conjoin(const StateSetCnf& a, const StateSetCnf& b) const;
    StateSetCnf disjoin(const StateSetCnf& a, const StateSetCnf& b);

    // Universal operators: AX, AY, K (agent), D and E (group).
    StateSetCnf forall_ax(const StateSetCnf& s);
    StateSetCnf forall_ay(const StateSetCnf& s);
    StateSetCnf forall_k(std::uint32_t agent, const StateSetCnf& s);
    StateSetCnf forall_d(const std::vector<std::uint32_t>& group, const StateSetCnf& s);
    StateSetCnf forall_e(const std::vector<std::uint32_t>& group, const StateSetCnf& s);

    // Greatest fixpoints of Q = s and AX Q, Q = s and AY Q, Q = E(s and Q).
    StateSetCnf gfp_ag(const StateSetCnf& s);
    StateSetCnf gfp_ah(const StateSetCnf& s);
    StateSetCnf gfp_c(const std::vector<std::uint32_t>& group, const StateSetCnf& s);
    // Least fixpoint of Q = b or (a and EX true and AX Q).
    StateSetCnf lfp_au(const StateSetCnf& a, const StateSetCnf& b);

    StateSetCnf sat_set(const logic::Formula& f);
    // The formula holds at the initial state: SAT([f](w) and I(w)).
    bool check(const logic::Formula& f);

    bool contains(const StateSetCnf& s, const model::GlobalState& g) const;
    // Same reachable members (decided by SAT on the exclusive or).
    bool equivalent(const StateSetCnf& a, const StateSetCnf& b);
    bool subset(const StateSetCnf& a, const StateSetCnf& b);

    // Number of reachable states, counted by model enumeration.
    std::size_t reachable_count();
    const UmcStats& stats() const noexcept { return stats_; }

private:
    using PropRef = sat::PropRef;

    PropRef over_w(const StateSetCnf& s) { return dag_.from_cnf(s.cnf); }
    PropRef over_v(const StateSetCnf& s);
    PropRef reach_w() const { return reach_w_; }
    PropRef reach_v();
    PropRef transition(bool backward);
    PropRef same_local(std::uint32_t agent);
    // CNF over w equivalent, within R, to f (a formula over w and v).
    StateSetCnf characterize(PropRef f, bool eliminate_v);
    // forall v. R(w) and R(v) and relation(w, v) -> s(v)
    StateSetCnf forall_related(PropRef relation, const StateSetCnf& s, bool target_in_reach);
    bool satisfiable(PropRef f);
    void compute_reachable();
    StateSetCnf eval(const logic::Formula& f);
    std::vector<std::uint32_t> group_of(const logic::Formula& f) const;

    symbolic::SymbolicModel& sm_;
    UmcOptions options_;
    std::size_t m_;
    std::vector<sat::Var> w_, v_;
    sat::PropDag dag_;
    PropRef reach_w_ = 0;
    std::optional<PropRef> reach_v_;
    std::optional<PropRef> forward_, backward_;
    std::vector<std::optional<PropRef>> same_;
    UmcStats stats_;
};

// Builds the OBDD encoding for `is` and runs the engine on `f`.
bool umc_check(const model::InterpretedSystem& is, const logic::Formula& f, UmcOptions options = {});

} // namespace epimc::umc
