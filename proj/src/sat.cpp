#include "epimc/sat.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace epimc::sat {

namespace {

bool lit_less(Lit a, Lit b)
{
    if (a.var() != b.var())
        return a.var() < b.var();
    return a.positive() && !b.positive();
}

// Sorts, deduplicates and reports tautologies.
bool normalize(Clause& c)
{
    std::sort(c.begin(), c.end(), lit_less);
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i].var() == c[i - 1].var())
            return false;
    return true;
}

} // namespace

bool Cnf::add_clause(Clause clause)
{
    for (Lit l : clause) {
        if (l.code == 0)
            throw InvalidArgument("literal 0 in clause");
        reserve_vars(l.var());
    }
    if (!normalize(clause))
        return false;
    clauses_.push_back(std::move(clause));
    return true;
}

std::size_t Cnf::literal_count() const
{
    std::size_t n = 0;
    for (const auto& c : clauses_)
        n += c.size();
    return n;
}

bool Cnf::satisfied_by(const std::vector<bool>& assignment) const
{
    for (const auto& c : clauses_) {
        bool sat = false;
        for (Lit l : c) {
            if (l.var() < assignment.size() && assignment[l.var()] == l.positive()) {
                sat = true;
                break;
            }
        }
        if (!sat)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// PropDag

std::size_t PropDag::KeyHash::operator()(const Key& k) const noexcept
{
    std::size_t h = static_cast<std::size_t>(k.kind) * 0x9e3779b97f4a7c15ULL ^ k.var;
    for (PropRef c : k.children)
        h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

PropDag::PropDag()
{
    nodes_.push_back(PropNode{PropKind::False, 0, {}});
    nodes_.push_back(PropNode{PropKind::True, 0, {}});
    negation_ = {1, 0};
}

PropRef PropDag::intern(PropKind kind, Var var, std::vector<PropRef> children)
{
    Key key{kind, var, children};
    if (auto it = table_.find(key); it != table_.end())
        return it->second;
    const auto id = static_cast<PropRef>(nodes_.size());
    nodes_.push_back(PropNode{kind, var, std::move(children)});
    negation_.push_back(0);
    table_.emplace(std::move(key), id);
    return id;
}

PropRef PropDag::var(Var v)
{
    if (v == 0)
        throw InvalidArgument("propositional variables start at 1");
    return intern(PropKind::Var, v, {});
}

PropRef PropDag::lit(Lit l)
{
    PropRef v = var(l.var());
    return l.positive() ? v : neg(v);
}

PropRef PropDag::neg(PropRef a)
{
    if (a >= nodes_.size())
        throw InvalidArgument("unknown formula node");
    if (negation_[a] != 0 || a == 1)
        return negation_[a];
    if (nodes_[a].kind == PropKind::Not)
        return nodes_[a].children.front();
    PropRef n = intern(PropKind::Not, 0, {a});
    negation_[a] = n;
    return n;
}

PropRef PropDag::nary(PropKind kind, std::vector<PropRef> operands)
{
    const PropRef unit = kind == PropKind::And ? top() : bottom();
    const PropRef zero = kind == PropKind::And ? bottom() : top();
    std::vector<PropRef> ops;
    ops.reserve(operands.size());
    for (PropRef o : operands) {
        if (o >= nodes_.size())
            throw InvalidArgument("unknown formula node");
        if (o == zero)
            return zero;
        if (o != unit)
            ops.push_back(o);
    }
    std::sort(ops.begin(), ops.end());
    ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
    for (PropRef o : ops)
        if (nodes_[o].kind == PropKind::Not && std::binary_search(ops.begin(), ops.end(), nodes_[o].children.front()))
            return zero;
    if (ops.empty())
        return unit;
    if (ops.size() == 1)
        return ops.front();
    return intern(kind, 0, std::move(ops));
}

PropRef PropDag::and_all(std::vector<PropRef> operands) { return nary(PropKind::And, std::move(operands)); }
PropRef PropDag::or_all(std::vector<PropRef> operands) { return nary(PropKind::Or, std::move(operands)); }

PropRef PropDag::iff(PropRef a, PropRef b)
{
    if (a == b)
        return top();
    if (a == neg(b))
        return bottom();
    return or_(and_(a, b), and_(neg(a), neg(b)));
}

PropRef PropDag::ite(PropRef c, PropRef t, PropRef e)
{
    if (t == e)
        return t;
    return or_(and_(c, t), and_(neg(c), e));
}

PropRef PropDag::from_cnf(const Cnf& cnf)
{
    std::vector<PropRef> clauses;
    clauses.reserve(cnf.clauses().size());
    for (const auto& c : cnf.clauses()) {
        std::vector<PropRef> lits;
        for (Lit l : c)
            lits.push_back(lit(l));
        clauses.push_back(or_all(std::move(lits)));
    }
    return and_all(std::move(clauses));
}

namespace {

// Post-order visit of every node below `root`, each once.
template <class Visit>
void post_order(const PropDag& dag, PropRef root, std::vector<std::uint8_t>& state, Visit&& visit)
{
    if (state.size() < dag.node_count())
        state.resize(dag.node_count(), 0);
    std::vector<std::pair<PropRef, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto& [r, next] = stack.back();
        if (next == 0 && state[r]) {
            stack.pop_back();
            continue;
        }
        const auto& children = dag.node(r).children;
        if (next < children.size()) {
            PropRef child = children[next++];
            if (!state[child])
                stack.push_back({child, 0});
            continue;
        }
        state[r] = 1;
        visit(r);
        stack.pop_back();
    }
}

} // namespace

bool PropDag::eval(PropRef root, const std::vector<bool>& assignment) const
{
    std::vector<std::uint8_t> state;
    std::vector<std::uint8_t> value(nodes_.size(), 0);
    post_order(*this, root, state, [&](PropRef r) {
        const auto& n = nodes_[r];
        bool v = false;
        switch (n.kind) {
        case PropKind::False: v = false; break;
        case PropKind::True: v = true; break;
        case PropKind::Var:
            if (n.var >= assignment.size())
                throw InvalidArgument("assignment does not cover variable " + std::to_string(n.var));
            v = assignment[n.var];
            break;
        case PropKind::Not: v = !value[n.children.front()]; break;
        case PropKind::And:
            v = std::all_of(n.children.begin(), n.children.end(), [&](PropRef c) { return value[c] != 0; });
            break;
        case PropKind::Or:
            v = std::any_of(n.children.begin(), n.children.end(), [&](PropRef c) { return value[c] != 0; });
            break;
        }
        value[r] = v;
    });
    return value[root] != 0;
}

std::size_t PropDag::size(PropRef root) const
{
    std::vector<std::uint8_t> state;
    std::size_t total = 0;
    post_order(*this, root, state, [&](PropRef r) { total += 1 + nodes_[r].children.size(); });
    return total;
}

std::vector<Var> PropDag::support(PropRef root) const
{
    std::vector<std::uint8_t> state;
    std::vector<Var> vars;
    post_order(*this, root, state, [&](PropRef r) {
        if (nodes_[r].kind == PropKind::Var)
            vars.push_back(nodes_[r].var);
    });
    std::sort(vars.begin(), vars.end());
    return vars;
}

PropRef PropDag::rename(PropRef root, const std::unordered_map<Var, Var>& mapping)
{
    std::vector<std::uint8_t> state;
    std::unordered_map<PropRef, PropRef> image;
    post_order(*this, root, state, [&](PropRef r) {
        // Copy: building may grow nodes_.
        const PropNode n = nodes_[r];
        PropRef out = r;
        switch (n.kind) {
        case PropKind::False:
        case PropKind::True: break;
        case PropKind::Var:
            if (auto it = mapping.find(n.var); it != mapping.end())
                out = var(it->second);
            break;
        case PropKind::Not: out = neg(image.at(n.children.front())); break;
        case PropKind::And:
        case PropKind::Or: {
            std::vector<PropRef> ops;
            ops.reserve(n.children.size());
            for (PropRef c : n.children)
                ops.push_back(image.at(c));
            out = n.kind == PropKind::And ? and_all(std::move(ops)) : or_all(std::move(ops));
            break;
        }
        }
        image[r] = out;
    });
    return image.at(root);
}

// ---------------------------------------------------------------------------
// Tseitin

TseitinEncoder::TseitinEncoder(const PropDag& dag, Cnf& out) : dag_(dag), out_(out) {}

Lit TseitinEncoder::encode(PropRef f) { return encode(f, true); }

Lit TseitinEncoder::encode(PropRef f, bool positive)
{
    const PropNode& n = dag_.node(f);
    switch (n.kind) {
    case PropKind::Var: return Lit::pos(n.var);
    case PropKind::Not: return ~encode(n.children.front(), !positive);
    case PropKind::False:
    case PropKind::True: {
        // One shared variable forced true stands for both constants.
        auto it = lit_of_.find(1);
        if (it == lit_of_.end()) {
            Lit t = Lit::pos(out_.new_var());
            out_.add_unit(t);
            it = lit_of_.emplace(1, t).first;
        }
        return n.kind == PropKind::True ? it->second : ~it->second;
    }
    case PropKind::And:
    case PropKind::Or: break;
    }

    auto [it, fresh] = lit_of_.try_emplace(f, Lit{});
    if (fresh)
        it->second = Lit::pos(out_.new_var());
    const Lit t = it->second;
    auto& done = done_[f];
    const std::uint8_t bit = positive ? 1 : 2;
    if (done & bit)
        return t;
    done |= bit;

    const bool conj = n.kind == PropKind::And;
    // Copy: encoding children may rehash done_ but never touches nodes.
    const std::vector<PropRef> children = n.children;
    if (conj == positive) {
        // t -> c for each c (And, positive), or c -> t (Or, negative).
        for (PropRef c : children) {
            Lit l = encode(c, positive);
            out_.add_clause(positive ? Clause{~t, l} : Clause{t, ~l});
        }
    } else {
        // t -> or(c) (Or, positive), or and(c) -> t (And, negative).
        Clause big{positive ? ~t : t};
        for (PropRef c : children) {
            Lit l = encode(c, positive);
            big.push_back(positive ? l : ~l);
        }
        out_.add_clause(std::move(big));
    }
    return t;
}

Cnf tseitin(const PropDag& dag, PropRef f, Var num_input_vars)
{
    const auto vars = dag.support(f);
    Cnf cnf(std::max<Var>(num_input_vars, vars.empty() ? 0 : vars.back()));
    TseitinEncoder enc(dag, cnf);
    cnf.top = enc.encode(f);
    return cnf;
}

// ---------------------------------------------------------------------------
// Solver

Solver::Solver(Var num_vars, SolverOptions options) : options_(options)
{
    reserve_vars(num_vars);
}

void Solver::reserve_vars(Var n)
{
    if (n <= num_vars_)
        return;
    num_vars_ = n;
    assigns_.resize(n + 1, -1);
    var_level_.resize(n + 1, 0);
    reason_.resize(n + 1, -1);
    watches_.resize(2 * (n + 1));
}

int Solver::value(Lit l) const
{
    const int a = assigns_[l.var()];
    if (a < 0)
        return -1;
    return (a == 1) == l.positive() ? 1 : 0;
}

void Solver::assign(Lit l, std::int32_t reason)
{
    assigns_[l.var()] = l.positive() ? 1 : 0;
    var_level_[l.var()] = level();
    reason_[l.var()] = reason;
    trail_.push_back(l);
}

void Solver::attach(std::uint32_t clause)
{
    const auto& c = clauses_[clause];
    watches_[index(c[0])].push_back(clause);
    watches_[index(c[1])].push_back(clause);
}

void Solver::add_clause(std::span<const Lit> lits)
{
    if (inconsistent_)
        return;
    Clause c(lits.begin(), lits.end());
    for (Lit l : c) {
        if (l.code == 0)
            throw InvalidArgument("literal 0 in clause");
        reserve_vars(l.var());
    }
    if (!normalize(c))
        return;
    // Clauses are only added at decision level 0.
    Clause kept;
    for (Lit l : c) {
        const int v = value(l);
        if (v == 1)
            return;
        if (v == -1)
            kept.push_back(l);
    }
    if (kept.empty()) {
        inconsistent_ = true;
        return;
    }
    if (kept.size() == 1) {
        assign(kept.front(), -1);
        if (propagate() != -1)
            inconsistent_ = true;
        return;
    }
    clauses_.push_back(std::move(kept));
    attach(static_cast<std::uint32_t>(clauses_.size() - 1));
}

void Solver::add_cnf(const Cnf& cnf)
{
    reserve_vars(cnf.num_vars());
    for (const auto& c : cnf.clauses())
        add_clause(c);
}

std::int32_t Solver::propagate()
{
    while (qhead_ < trail_.size()) {
        const Lit p = trail_[qhead_++];
        ++stats_.propagations;
        const Lit falsified = ~p;
        auto& ws = watches_[index(falsified)];
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            const std::uint32_t cref = ws[i++];
            auto& c = clauses_[cref];
            if (c[0] == falsified)
                std::swap(c[0], c[1]);
            if (value(c[0]) == 1) {
                ws[j++] = cref;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (value(c[k]) != 0) {
                    std::swap(c[1], c[k]);
                    watches_[index(c[1])].push_back(cref);
                    moved = true;
                    break;
                }
            }
            if (moved)
                continue;
            ws[j++] = cref;
            if (value(c[0]) == 0) {
                while (i < ws.size())
                    ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return static_cast<std::int32_t>(cref);
            }
            assign(c[0], static_cast<std::int32_t>(cref));
        }
        ws.resize(j);
    }
    return -1;
}

void Solver::backtrack(std::uint32_t target)
{
    if (level() <= target)
        return;
    const std::size_t keep = trail_lim_[target];
    while (trail_.size() > keep) {
        assigns_[trail_.back().var()] = -1;
        reason_[trail_.back().var()] = -1;
        trail_.pop_back();
    }
    trail_lim_.resize(target);
    qhead_ = std::min(qhead_, trail_.size());
}

std::int32_t Solver::analyze(std::int32_t conflict, std::vector<Lit>& learnt)
{
    std::vector<bool> seen(num_vars_ + 1, false);
    learnt.assign(1, Lit{});
    int open = 0;
    Lit p{};
    std::size_t idx = trail_.size();
    std::int32_t cref = conflict;
    do {
        const auto& c = clauses_[static_cast<std::size_t>(cref)];
        for (std::size_t k = (p.code == 0 ? 0 : 1); k < c.size(); ++k) {
            const Lit q = c[k];
            const Var v = q.var();
            if (seen[v] || var_level_[v] == 0)
                continue;
            seen[v] = true;
            if (var_level_[v] == level())
                ++open;
            else
                learnt.push_back(q);
        }
        do
            --idx;
        while (!seen[trail_[idx].var()]);
        p = trail_[idx];
        cref = reason_[p.var()];
        seen[p.var()] = false;
        --open;
    } while (open > 0);
    learnt[0] = ~p;

    std::uint32_t back = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
        if (var_level_[learnt[k].var()] > back) {
            back = var_level_[learnt[k].var()];
            std::swap(learnt[1], learnt[k]);
        }
    }
    return static_cast<std::int32_t>(back);
}

bool Solver::solve(std::span<const Lit> assumptions)
{
    ++stats_.solve_calls;
    model_.clear();
    for (Lit a : assumptions) {
        if (a.code == 0)
            throw InvalidArgument("literal 0 in assumptions");
        reserve_vars(a.var());
    }
    if (inconsistent_)
        return false;

    struct Decision {
        Lit lit;
        bool flipped;
    };
    std::vector<Decision> decisions; // chronological mode only
    Var hint = 1;
    auto new_level = [&] { trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size())); };

    for (;;) {
        const std::int32_t conflict = propagate();
        if (conflict != -1) {
            ++stats_.conflicts;
            if (options_.cdcl) {
                if (level() == 0) {
                    inconsistent_ = true;
                    return false;
                }
                std::vector<Lit> learnt;
                const auto back = static_cast<std::uint32_t>(analyze(conflict, learnt));
                backtrack(back);
                hint = 1;
                if (learnt.size() == 1) {
                    assign(learnt[0], -1);
                } else {
                    clauses_.push_back(learnt);
                    const auto cref = static_cast<std::uint32_t>(clauses_.size() - 1);
                    attach(cref);
                    assign(learnt[0], static_cast<std::int32_t>(cref));
                }
                ++stats_.learned;
            } else {
                while (!decisions.empty() && decisions.back().flipped)
                    decisions.pop_back();
                if (decisions.empty()) {
                    backtrack(0);
                    return false;
                }
                const Lit flip = ~decisions.back().lit;
                decisions.pop_back();
                backtrack(static_cast<std::uint32_t>(decisions.size()));
                hint = 1;
                new_level();
                decisions.push_back({flip, true});
                assign(flip, -1);
            }
            continue;
        }

        if (level() < assumptions.size()) {
            const Lit a = assumptions[level()];
            const int v = value(a);
            if (v == 0) {
                backtrack(0);
                return false;
            }
            new_level();
            decisions.push_back({a, true});
            if (v == -1)
                assign(a, -1);
            continue;
        }

        while (hint <= num_vars_ && assigns_[hint] >= 0)
            ++hint;
        if (hint > num_vars_) {
            model_.assign(num_vars_ + 1, false);
            for (Var v = 1; v <= num_vars_; ++v)
                model_[v] = assigns_[v] == 1;
            backtrack(0);
            return true;
        }
        ++stats_.decisions;
        new_level();
        decisions.push_back({Lit::pos(hint), false});
        assign(Lit::pos(hint), -1);
    }
}

SolveResult solve(const Cnf& cnf, std::span<const Lit> assumptions, SolverOptions options)
{
    Solver s(cnf.num_vars(), options);
    s.add_cnf(cnf);
    SolveResult r;
    r.satisfiable = s.solve(assumptions);
    r.model = s.model();
    r.stats = s.stats();
    return r;
}

// ---------------------------------------------------------------------------
// DIMACS

DimacsError::DimacsError(std::string message, int line)
    : Error("line " + std::to_string(line) + ": " + message), line_(line)
{
}

std::string to_dimacs(const Cnf& cnf)
{
    std::string out = "p cnf " + std::to_string(cnf.num_vars()) + " " + std::to_string(cnf.clauses().size()) + "\n";
    for (const auto& c : cnf.clauses()) {
        for (Lit l : c) {
            out += std::to_string(l.code);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

Cnf from_dimacs(std::string_view text)
{
    std::optional<Cnf> cnf;
    long long declared_clauses = 0;
    long long seen_clauses = 0;
    Clause current;
    int line_no = 0;
    int last_line = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) {
            if (eol == text.size())
                break;
            continue;
        }
        last_line = line_no;
        line = line.substr(first);
        if (line.front() == 'c')
            continue;
        std::vector<std::string_view> fields;
        for (std::size_t i = 0; i < line.size();) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
                ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t')
                ++j;
            if (j > i)
                fields.push_back(line.substr(i, j - i));
            i = j;
        }
        auto parse_int = [&](std::string_view s) {
            long long v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw DimacsError("expected an integer, found '" + std::string(s) + "'", line_no);
            return v;
        };
        if (fields.front() == "p") {
            if (cnf)
                throw DimacsError("duplicate problem line", line_no);
            if (fields.size() != 4 || fields[1] != "cnf")
                throw DimacsError("problem line must be 'p cnf <variables> <clauses>'", line_no);
            const long long vars = parse_int(fields[2]);
            declared_clauses = parse_int(fields[3]);
            if (vars < 0 || vars > INT32_MAX || declared_clauses < 0)
                throw DimacsError("negative or oversized counts in problem line", line_no);
            cnf.emplace(static_cast<Var>(vars));
            continue;
        }
        if (!cnf)
            throw DimacsError("clause before the problem line", line_no);
        for (auto f : fields) {
            const long long v = parse_int(f);
            if (v == 0) {
                ++seen_clauses;
                if (seen_clauses > declared_clauses)
                    throw DimacsError("more clauses than the " + std::to_string(declared_clauses) + " declared",
                                      line_no);
                cnf->add_clause(std::move(current));
                current.clear();
                continue;
            }
            if (v > static_cast<long long>(cnf->num_vars()) || -v > static_cast<long long>(cnf->num_vars()))
                throw DimacsError("literal " + std::to_string(v) + " exceeds the declared variable count",
                                  line_no);
            current.push_back(Lit{static_cast<std::int32_t>(v)});
        }
        if (eol == text.size())
            break;
    }
    if (!cnf)
        throw DimacsError("missing problem line", std::max(last_line, 1));
    if (!current.empty())
        throw DimacsError("last clause is not terminated by 0", last_line);
    if (seen_clauses != declared_clauses)
        throw DimacsError("declared " + std::to_string(declared_clauses) + " clauses but found " +
                              std::to_string(seen_clauses),
                          last_line);
    return std::move(*cnf);
}

// ---------------------------------------------------------------------------
// equ_cnf

Cnf equ_cnf(const PropDag& dag, PropRef f, std::span<const Var> eliminate, EquCnfStats* stats,
            const EquCnfOptions& options, Var num_vars)
{
    const auto support = dag.support(f);
    const std::unordered_set<Var> drop(eliminate.begin(), eliminate.end());
    std::vector<Var> keep;
    for (Var v : support)
        if (!drop.count(v))
            keep.push_back(v);
    const Var inputs = std::max<Var>(num_vars, support.empty() ? 0 : support.back());

    Cnf work(inputs);
    TseitinEncoder enc(dag, work);
    work.add_unit(enc.encode_negated(f));

    Solver solver(work.num_vars(), options.solver);
    solver.add_cnf(work);
    Cnf result(inputs);
    while (solver.solve()) {
        const auto& model = solver.model();
        Clause block;
        block.reserve(keep.size());
        for (Var v : keep)
            block.push_back(Lit::make(v, !model[v]));
        if (stats)
            ++stats->blocking_clauses;
        if (result.clauses().size() >= options.max_clauses)
            throw EquCnfLimitError("quantifier elimination exceeded " + std::to_string(options.max_clauses) +
                                   " blocking clauses");
        result.add_clause(block);
        if (block.empty())
            break;
        solver.add_clause(block);
    }
    if (stats)
        stats->solver_calls += solver.stats().solve_calls;
    return result;
}

} // namespace epimc::sat
