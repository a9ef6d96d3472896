#pragma once

// Propositional layer for the SAT-based engines: hash-consed formula DAGs,
// Tseitin-style CNF conversion, a DPLL solver with two watched literals,
// DIMACS input/output and blocking-clause quantifier elimination (equ_cnf).

#include "epimc/error.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace epimc::sat {

// Variables are numbered from 1 as in DIMACS.
using Var = std::uint32_t;

struct Lit {
    std::int32_t code = 0; // DIMACS literal: +v or -v

    static Lit pos(Var v) { return Lit{static_cast<std::int32_t>(v)}; }
    static Lit neg(Var v) { return Lit{-static_cast<std::int32_t>(v)}; }
    static Lit make(Var v, bool positive) { return positive ? pos(v) : neg(v); }

    Var var() const noexcept { return static_cast<Var>(code < 0 ? -code : code); }
    bool positive() const noexcept { return code > 0; }
    Lit operator~() const noexcept { return Lit{-code}; }

    friend auto operator<=>(Lit, Lit) = default;
};

using Clause = std::vector<Lit>;

class Cnf {
public:
    explicit Cnf(Var num_vars = 0) : num_vars_(num_vars) {}

    Var num_vars() const noexcept { return num_vars_; }
    Var new_var() { return ++num_vars_; }
    void reserve_vars(Var n) { num_vars_ = std::max(num_vars_, n); }

    // Sorts and deduplicates the literals. Tautologies are dropped (returns
    // false). The empty clause is kept and makes the formula unsatisfiable.
    bool add_clause(Clause clause);
    void add_unit(Lit l) { add_clause({l}); }

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    std::size_t literal_count() const;

    // Literal that stands for the encoded formula (set by tseitin).
    std::optional<Lit> top;

    // True iff the assignment (indexed by variable, slot 0 unused) satisfies
    // every clause.
    bool satisfied_by(const std::vector<bool>& assignment) const;

private:
    Var num_vars_;
    std::vector<Clause> clauses_;
};

// ---------------------------------------------------------------------------
// Formula DAG

using PropRef = std::uint32_t;

enum class PropKind : std::uint8_t { False, True, Var, Not, And, Or };

struct PropNode {
    PropKind kind;
    Var var = 0;
    std::vector<PropRef> children;
};

// Arena of hash-consed propositional formulas over var | not | and | or.
// Builders fold constants, remove double negation, deduplicate operands and
// collapse complementary operand pairs; nothing else is normalised.
class PropDag {
public:
    PropDag();

    PropRef constant(bool value) const noexcept { return value ? 1 : 0; }
    PropRef bottom() const noexcept { return 0; }
    PropRef top() const noexcept { return 1; }
    PropRef var(Var v);
    PropRef lit(Lit l);
    PropRef neg(PropRef a);
    PropRef and_(PropRef a, PropRef b) { return and_all(std::vector<PropRef>{a, b}); }
    PropRef or_(PropRef a, PropRef b) { return or_all(std::vector<PropRef>{a, b}); }
    PropRef and_all(std::vector<PropRef> operands);
    PropRef or_all(std::vector<PropRef> operands);
    PropRef implies(PropRef a, PropRef b) { return or_(neg(a), b); }
    PropRef iff(PropRef a, PropRef b);
    PropRef xor_(PropRef a, PropRef b) { return neg(iff(a, b)); }
    PropRef ite(PropRef c, PropRef t, PropRef e);
    // Conjunction of the clauses of `cnf` (its top literal is ignored).
    PropRef from_cnf(const Cnf& cnf);

    const PropNode& node(PropRef r) const { return nodes_.at(r); }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    bool eval(PropRef r, const std::vector<bool>& assignment) const;
    // Nodes plus edges of the sub-DAG below r; the size measure of the
    // Tseitin budget.
    std::size_t size(PropRef r) const;
    std::vector<Var> support(PropRef r) const;
    // Substitutes variables; unmapped variables are kept.
    PropRef rename(PropRef r, const std::unordered_map<Var, Var>& mapping);

private:
    struct Key {
        PropKind kind;
        Var var;
        std::vector<PropRef> children;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    PropRef intern(PropKind kind, Var var, std::vector<PropRef> children);
    PropRef nary(PropKind kind, std::vector<PropRef> operands);

    std::vector<PropNode> nodes_;
    std::unordered_map<Key, PropRef, KeyHash> table_;
    std::vector<PropRef> negation_; // cached Not node per node, 0 if none
};

// ---------------------------------------------------------------------------
// CNF conversion

// Polarity-aware Tseitin encoding into an existing Cnf. Variables of the DAG
// map to themselves; auxiliary variables are allocated from `out`. Each node
// gets its defining clauses only for the polarities it is used in, so
// `lit = encode(f)` satisfies: every model of the clauses with `lit` true
// satisfies f, and every model of f extends to one.
class TseitinEncoder {
public:
    TseitinEncoder(const PropDag& dag, Cnf& out);

    Lit encode(PropRef f);
    // Literal whose truth forces not f; usable on a const DAG.
    Lit encode_negated(PropRef f) { return ~encode(f, false); }
    // Adds f as a constraint.
    void assert_formula(PropRef f) { out_.add_unit(encode(f)); }

private:
    Lit encode(PropRef f, bool positive);

    const PropDag& dag_;
    Cnf& out_;
    std::unordered_map<PropRef, Lit> lit_of_;
    std::unordered_map<PropRef, std::uint8_t> done_; // bit 0: positive, bit 1: negative
};

// Fresh Cnf whose variables 1..max_var(f) are the formula's own; `top` is set.
Cnf tseitin(const PropDag& dag, PropRef f, Var num_input_vars = 0);

// ---------------------------------------------------------------------------
// Solver

struct SolverOptions {
    // Conflict-driven clause learning with backjumping; plain chronological
    // DPLL when off. Branching is the same either way.
    bool cdcl = true;
};

struct SolverStats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t learned = 0;
    std::uint64_t solve_calls = 0;
};

// Incremental DPLL solver. Branches on the lowest unassigned variable, true
// first, so results are deterministic for identical inputs.
class Solver {
public:
    explicit Solver(Var num_vars = 0, SolverOptions options = {});

    void reserve_vars(Var n);
    Var num_vars() const noexcept { return num_vars_; }
    void add_clause(std::span<const Lit> clause);
    void add_clause(std::initializer_list<Lit> clause) { add_clause(std::span<const Lit>(clause.begin(), clause.size())); }
    void add_cnf(const Cnf& cnf);

    // Satisfiability of the clauses under the assumptions.
    bool solve(std::span<const Lit> assumptions = {});
    // Total assignment of the last successful solve, indexed by variable.
    const std::vector<bool>& model() const noexcept { return model_; }
    const SolverStats& stats() const noexcept { return stats_; }

private:
    static std::uint32_t index(Lit l) { return 2 * l.var() + (l.positive() ? 0 : 1); }
    // 1 true, 0 false, -1 unassigned.
    int value(Lit l) const;
    void assign(Lit l, std::int32_t reason);
    // Returns the conflicting clause or -1.
    std::int32_t propagate();
    void backtrack(std::uint32_t level);
    std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }
    void attach(std::uint32_t clause);
    std::int32_t analyze(std::int32_t conflict, std::vector<Lit>& learnt);

    SolverOptions options_;
    Var num_vars_ = 0;
    bool inconsistent_ = false;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_; // by literal index
    std::vector<std::int8_t> assigns_;               // by variable: -1, 0, 1
    std::vector<std::uint32_t> var_level_;
    std::vector<std::int32_t> reason_;
    std::vector<Lit> trail_;
    std::vector<std::uint32_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::vector<bool> model_;
    SolverStats stats_;
};

struct SolveResult {
    bool satisfiable = false;
    std::vector<bool> model; // indexed by variable, slot 0 unused
    SolverStats stats;
};

SolveResult solve(const Cnf& cnf, std::span<const Lit> assumptions = {}, SolverOptions options = {});

// ---------------------------------------------------------------------------
// DIMACS

class DimacsError : public Error {
public:
    DimacsError(std::string message, int line);
    int line() const noexcept { return line_; }

private:
    int line_;
};

std::string to_dimacs(const Cnf& cnf);
Cnf from_dimacs(std::string_view text);

// ---------------------------------------------------------------------------
// Quantifier elimination

struct EquCnfStats {
    std::uint64_t solver_calls = 0;
    std::uint64_t blocking_clauses = 0;
};

struct EquCnfOptions {
    SolverOptions solver;
    // Stop with EquCnfLimitError after this many blocking clauses.
    std::uint64_t max_clauses = 10'000'000;
};

class EquCnfLimitError : public Error {
public:
    using Error::Error;
};

// CNF over the support of f minus `eliminate` equivalent to
// forall eliminate . f. Each satisfying assignment of the Tseitin encoding of
// not f yields a blocking clause over the kept input variables; the loop ends
// when no falsifying assignment is left. The result's variable count is the
// largest variable of f (or `num_vars`, if larger).
Cnf equ_cnf(const PropDag& dag, PropRef f, std::span<const Var> eliminate, EquCnfStats* stats = nullptr,
            const EquCnfOptions& options = {}, Var num_vars = 0);

} // namespace epimc::sat
