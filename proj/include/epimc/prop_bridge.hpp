#pragma once

// Conversions between the OBDD encoding of a system and propositional
// formulas over blocks of SAT variables (one block per symbolic state).

#include "epimc/sat.hpp"
#include "epimc/symbolic.hpp"

#include <span>
#include <vector>

namespace epimc::symbolic {

// SAT variable per BDD variable index; 0 marks an unmapped variable.
using VarMap = std::vector<sat::Var>;

// Maps the current-state bits to `cur` and the next-state bits to `next`,
// both given in the order of StateEncoding::cur_vars.
VarMap state_var_map(const StateEncoding& enc, std::span<const sat::Var> cur, std::span<const sat::Var> next = {});

// If-then-else expansion of a BDD. Throws InvalidArgument when the BDD
// depends on an unmapped variable.
sat::PropRef to_prop(const bdd::Manager& mgr, NodeRef f, sat::PropDag& dag, const VarMap& map);

// Bit values of a global state, in cur_vars order.
std::vector<bool> state_bits(const StateEncoding& enc, const model::GlobalState& g);

// Reads the state stored in the block `w` of a model (indexed by SAT variable).
model::GlobalState decode_state(const StateEncoding& enc, const std::vector<bool>& model, std::span<const sat::Var> w);

// Conjunction of literals fixing block `w` to the given state.
sat::PropRef state_equals(const StateEncoding& enc, sat::PropDag& dag, std::span<const sat::Var> w,
                          const model::GlobalState& g);

} // namespace epimc::symbolic
