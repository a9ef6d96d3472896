#pragma once

// Bounded model checking for ECTLK. For k = 1, 2, ... the k-model of the
// system (symbolic k-paths from fresh state-variable blocks) and the
// translation of the formula at the initial state are conjoined, converted to
// CNF and handed to the DPLL solver. A satisfying assignment proves the
// formula at the initial state; running out of bounds proves nothing.

#include "epimc/formula.hpp"
#include "epimc/sat.hpp"
#include "epimc/symbolic.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace epimc::bmc {

// Number of symbolic k-paths the translation of `f` (NNF, ECTLK) uses.
// Throws FragmentError outside ECTLK.
std::size_t path_count(const logic::Formula& f, std::size_t k);

// State-variable blocks w(i, j) for 0 <= i <= k, 1 <= j <= paths, plus the
// single block w(0, 0) for the initial state. Blocks take variables
// 1..num_vars() in that order.
class KUnfolding {
public:
    KUnfolding(std::size_t state_bits, std::size_t k, std::size_t paths);

    std::size_t k() const noexcept { return k_; }
    std::size_t paths() const noexcept { return paths_; }
    std::size_t state_bits() const noexcept { return bits_; }
    sat::Var num_vars() const noexcept;
    std::span<const sat::Var> state(std::size_t i, std::size_t j) const;

private:
    std::size_t bits_, k_, paths_;
    std::vector<sat::Var> vars_;
};

// I(w(0,0)) and T(w(i,j), w(i+1,j)) for every path j >= 1 and i < k.
sat::PropRef unfold_model(symbolic::SymbolicModel& sm, sat::PropDag& dag, const KUnfolding& u);

// Translation of `f` (NNF, ECTLK) at block w(m, n), using the paths
// first_path .. first_path + path_count(f, k) - 1.
sat::PropRef translate(symbolic::SymbolicModel& sm, sat::PropDag& dag, const KUnfolding& u, const logic::Formula& f,
                       std::size_t m, std::size_t n, std::size_t first_path = 1);

struct BoundStats {
    std::size_t k = 0;
    std::size_t paths = 0;
    std::size_t variables = 0;
    std::size_t clauses = 0;
    double seconds = 0;
    bool satisfiable = false;
};

struct Witness {
    std::size_t k = 0;
    // paths[0] holds only the initial state; paths[j] has k + 1 states.
    std::vector<std::vector<model::GlobalState>> paths;
};

struct BmcOptions {
    // Largest bound tried; 0 means the number of reachable states.
    std::size_t k_max = 0;
    std::size_t k_min = 1;
    sat::SolverOptions solver;
    // Receives the CNF of every bound before it is solved. The top literal
    // is already asserted as a unit clause.
    std::function<void(std::size_t k, const sat::Cnf&)> on_cnf;
};

struct BmcResult {
    bool holds = false;
    // Bound of the successful check, or the last bound tried.
    std::size_t k = 0;
    std::size_t k_max = 0;
    std::vector<BoundStats> bounds;
    std::optional<Witness> witness;
};

// One bound: builds, encodes and solves [M]_k and [f]_k.
BoundStats check_bound(symbolic::SymbolicModel& sm, const logic::Formula& nnf_formula, std::size_t k,
                       const BmcOptions& options = {}, Witness* witness = nullptr);

// Puts `f` in NNF, checks it is ECTLK and iterates k from k_min to k_max.
BmcResult bmc_check(symbolic::SymbolicModel& sm, const logic::Formula& f, const BmcOptions& options = {});

} // namespace epimc::bmc
