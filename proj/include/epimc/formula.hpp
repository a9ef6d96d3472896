#pragma once

// CTLpK formulas: Boolean connectives, CTL operators, the past operators AY
// and AH, and the epistemic operators K, E, D, C with their diamond duals.
//
// Concrete syntax (lowest to highest precedence):
//   f -> g            right associative
//   f or g
//   f and g
//   not f, AX f, EX f, AG f, EG f, AF f, EF f, AY f, AH f
//   K <agent> f, Kbar <agent> f
//   E f, E{a,b} f, Ebar{..} f, D{..} f, Dbar{..} f, C{..} f, Cbar{..} f
//   A(f U g), E(f U g), A(f W g)
//   true, false, <atom>, (f)
// Agents are names or 1-based indices. A group-free E/D/C ranges over all
// agents.

#include "epimc/lexer.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epimc::logic {

enum class Op : std::uint8_t {
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    AX,
    EX,
    AG,
    EG,
    AF,
    EF,
    AU,
    EU,
    AW, // weak until, needed to put negated E(f U g) in negation normal form
    AY,
    AH,
    K,
    Kbar,
    E,
    Ebar,
    D,
    Dbar,
    C,
    Cbar,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;
using Group = std::optional<std::vector<std::string>>;

struct Formula {
    Op op = Op::True;
    // Atom name, or the agent reference of K / Kbar.
    std::string name;
    // Agents of E/D/C and their duals; nullopt means every agent.
    Group group;
    std::vector<FormulaPtr> args;
};

bool operator==(const Formula& a, const Formula& b);

bool is_group_op(Op op);
bool is_unary_temporal(Op op);
std::string_view op_name(Op op);

FormulaPtr truth(bool value);
FormulaPtr atom(std::string name);
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
// AX, EX, AG, EG, AF, EF, AY, AH.
FormulaPtr unary(Op op, FormulaPtr f);
// AU, EU, AW.
FormulaPtr until(Op op, FormulaPtr a, FormulaPtr b);
// K, Kbar.
FormulaPtr knows(Op op, std::string agent, FormulaPtr f);
// E, Ebar, D, Dbar, C, Cbar.
FormulaPtr group_op(Op op, Group group, FormulaPtr f);

// Left-folded conjunction/disjunction; empty lists give true/false.
FormulaPtr conj_all(const std::vector<FormulaPtr>& fs);
FormulaPtr disj_all(const std::vector<FormulaPtr>& fs);

FormulaPtr parse_formula(std::string_view text);
// Parses a formula from a token stream, stopping before the first token that
// cannot continue it. Used by the ISPL front end.
FormulaPtr parse_formula(text::TokenStream& tokens);

std::string format_formula(const Formula& f);
inline std::string format_formula(const FormulaPtr& f) { return format_formula(*f); }

// Negation normal form: negations only on atoms (and, for lack of
// existential past duals, directly above AY/AH).
FormulaPtr to_nnf(const FormulaPtr& f);

// True iff `f` (expected in NNF) lies in the existential fragment ECTLK.
bool is_ectlk(const Formula& f);

bool has_past_operators(const Formula& f);

std::size_t depth(const Formula& f);
std::size_t size(const Formula& f);

// Names of atoms and agent references occurring in the formula.
std::vector<std::string> atoms_of(const Formula& f);

} // namespace epimc::logic
