#include "epimc/bmc.hpp"

#include "epimc/prop_bridge.hpp"
#include "epimc/resolve.hpp"

#include <array>
#include <chrono>
#include <map>
#include <tuple>

namespace epimc::bmc {

using logic::Formula;
using logic::Op;
using sat::PropRef;

std::size_t path_count(const Formula& f, std::size_t k)
{
    auto arg = [&](std::size_t i) { return path_count(*f.args.at(i), k); };
    switch (f.op) {
    case Op::True:
    case Op::False:
    case Op::Atom: return 0;
    case Op::Not:
        if (f.args.at(0)->op != Op::Atom)
            throw FragmentError("negation above a non-atomic formula; expected negation normal form");
        return 0;
    case Op::And: return arg(0) + arg(1);
    case Op::Or: return std::max(arg(0), arg(1));
    case Op::EX: return arg(0) + 1;
    case Op::EF: return arg(0) + 1;
    case Op::EU: return k * arg(0) + arg(1) + 1;
    case Op::EG: return (k + 1) * arg(0) + 1;
    case Op::Kbar:
    case Op::Ebar:
    case Op::Dbar: return arg(0) + 1;
    case Op::Cbar: return arg(0) + k;
    default:
        throw FragmentError("operator " + std::string(logic::op_name(f.op)) + " is outside ECTLK");
    }
}

KUnfolding::KUnfolding(std::size_t state_bits, std::size_t k, std::size_t paths)
    : bits_(state_bits), k_(k), paths_(paths)
{
    if (k == 0)
        throw InvalidArgument("bound k must be at least 1");
    const std::size_t blocks = 1 + paths * (k + 1);
    if (blocks * state_bits > 0x7fffffffu / 2)
        throw InvalidArgument("unfolding needs too many variables");
    vars_.resize(blocks * state_bits);
    for (std::size_t v = 0; v < vars_.size(); ++v)
        vars_[v] = static_cast<sat::Var>(v + 1);
}

sat::Var KUnfolding::num_vars() const noexcept { return static_cast<sat::Var>(vars_.size()); }

std::span<const sat::Var> KUnfolding::state(std::size_t i, std::size_t j) const
{
    if (i > k_ || j > paths_ || (j == 0 && i != 0))
        throw InvalidArgument("no state block w(" + std::to_string(i) + "," + std::to_string(j) + ")");
    const std::size_t block = j == 0 ? 0 : 1 + (j - 1) * (k_ + 1) + i;
    return std::span<const sat::Var>(vars_).subspan(block * bits_, bits_);
}

namespace {

class Translator {
public:
    Translator(symbolic::SymbolicModel& sm, sat::PropDag& dag, const KUnfolding& u)
        : sm_(sm), dag_(dag), u_(u), enc_(sm.encoding())
    {
        for (std::size_t j = 0; j < enc_.cur_vars.size(); ++j)
            position_[enc_.cur_vars[j].index] = j;
    }

    PropRef initial(std::span<const sat::Var> w)
    {
        return symbolic::state_equals(enc_, dag_, w, model::GlobalState{sm_.system().initial_state});
    }

    PropRef transition(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2)
    {
        const auto key = std::array<std::size_t, 4>{i1, j1, i2, j2};
        if (auto it = trans_.find(key); it != trans_.end())
            return it->second;
        const auto map = symbolic::state_var_map(enc_, u_.state(i1, j1), u_.state(i2, j2));
        const PropRef t = symbolic::to_prop(sm_.manager(), sm_.state_transition(), dag_, map);
        trans_.emplace(key, t);
        return t;
    }

    PropRef translate(const Formula& f, std::size_t m, std::size_t n, std::size_t p)
    {
        const auto key = std::make_tuple(&f, m, n, p);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        const PropRef r = translate_node(f, m, n, p);
        memo_.emplace(key, r);
        return r;
    }

private:
    PropRef translate_node(const Formula& f, std::size_t m, std::size_t n, std::size_t p)
    {
        const std::size_t k = u_.k();
        const auto w = u_.state(m, n);
        switch (f.op) {
        case Op::True: return dag_.top();
        case Op::False: return dag_.bottom();
        case Op::Atom: return atom(f.name, w);
        case Op::Not:
            if (f.args[0]->op != Op::Atom)
                throw FragmentError("negation above a non-atomic formula; expected negation normal form");
            return dag_.neg(atom(f.args[0]->name, w));
        case Op::And: {
            const PropRef a = translate(*f.args[0], m, n, p);
            return dag_.and_(a, translate(*f.args[1], m, n, p + path_count(*f.args[0], k)));
        }
        case Op::Or: return dag_.or_(translate(*f.args[0], m, n, p), translate(*f.args[1], m, n, p));
        case Op::EX: return dag_.and_(equal(w, u_.state(0, p)), translate(*f.args[0], 1, p, p + 1));
        case Op::EF:
        case Op::EU: {
            const Formula* a = f.op == Op::EU ? f.args[0].get() : nullptr;
            const Formula& b = *f.args.back();
            const std::size_t fa = a ? path_count(*a, k) : 0;
            const std::size_t fb = path_count(b, k);
            std::vector<PropRef> prefix; // a at positions 0..j-1
            std::vector<PropRef> options;
            for (std::size_t j = 0; j <= k; ++j) {
                std::vector<PropRef> here = prefix;
                here.push_back(translate(b, j, p, p + 1));
                options.push_back(dag_.and_all(std::move(here)));
                if (a && j < k)
                    prefix.push_back(translate(*a, j, p, p + 1 + fb + j * fa));
            }
            return dag_.and_(equal(w, u_.state(0, p)), dag_.or_all(std::move(options)));
        }
        case Op::EG: {
            const Formula& a = *f.args[0];
            const std::size_t fa = path_count(a, k);
            std::vector<PropRef> loops;
            for (std::size_t l = 0; l <= k; ++l)
                loops.push_back(transition(k, p, l, p));
            std::vector<PropRef> parts{equal(w, u_.state(0, p)), dag_.or_all(std::move(loops))};
            for (std::size_t j = 0; j <= k; ++j)
                parts.push_back(translate(a, j, p, p + 1 + j * fa));
            return dag_.and_all(std::move(parts));
        }
        case Op::Kbar:
        case Op::Ebar:
        case Op::Dbar: {
            std::vector<std::uint32_t> agents;
            if (f.op == Op::Kbar)
                agents.push_back(resolve_agent(sm_.system(), f.name));
            else
                agents = resolve_group(sm_.system(), f.group);
            const bool all = f.op == Op::Dbar;
            std::vector<PropRef> options;
            for (std::size_t j = 0; j <= k; ++j) {
                std::vector<PropRef> rel;
                for (auto agent : agents)
                    rel.push_back(same_local(agent, w, u_.state(j, p)));
                const PropRef related = all ? dag_.and_all(std::move(rel)) : dag_.or_all(std::move(rel));
                options.push_back(dag_.and_(related, translate(*f.args[0], j, p, p + 1)));
            }
            return dag_.and_(initial(u_.state(0, p)), dag_.or_all(std::move(options)));
        }
        case Op::Cbar: {
            // The iterated formulas stay alive so the memo can key on them.
            auto& iterated = powers_[&f];
            if (iterated.empty())
                iterated.push_back(f.args[0]);
            while (iterated.size() <= k)
                iterated.push_back(logic::group_op(Op::Ebar, f.group, iterated.back()));
            std::vector<PropRef> options;
            for (std::size_t j = 1; j <= k; ++j)
                options.push_back(translate(*iterated[j], m, n, p));
            return dag_.or_all(std::move(options));
        }
        default:
            throw FragmentError("operator " + std::string(logic::op_name(f.op)) + " is outside ECTLK");
        }
    }

    PropRef atom(const std::string& name, std::span<const sat::Var> w)
    {
        const auto idx = resolve_atom(sm_.system(), name);
        auto it = atoms_.find(idx);
        if (it == atoms_.end())
            it = atoms_.emplace(idx, sm_.condition(sm_.system().atoms[idx].condition)).first;
        const auto map = symbolic::state_var_map(enc_, w);
        return symbolic::to_prop(sm_.manager(), it->second, dag_, map);
    }

    PropRef equal(std::span<const sat::Var> a, std::span<const sat::Var> b)
    {
        std::vector<PropRef> bits;
        for (std::size_t j = 0; j < a.size(); ++j)
            bits.push_back(dag_.iff(dag_.var(a[j]), dag_.var(b[j])));
        return dag_.and_all(std::move(bits));
    }

    PropRef same_local(std::uint32_t agent, std::span<const sat::Var> a, std::span<const sat::Var> b)
    {
        std::vector<PropRef> bits;
        for (auto v : enc_.agents.at(agent).cur) {
            const auto j = position_.at(v.index);
            bits.push_back(dag_.iff(dag_.var(a[j]), dag_.var(b[j])));
        }
        return dag_.and_all(std::move(bits));
    }

    symbolic::SymbolicModel& sm_;
    sat::PropDag& dag_;
    const KUnfolding& u_;
    const symbolic::StateEncoding& enc_;
    std::map<std::uint32_t, std::size_t> position_;
    std::map<std::array<std::size_t, 4>, PropRef> trans_;
    std::map<std::uint32_t, bdd::NodeRef> atoms_;
    std::map<std::tuple<const Formula*, std::size_t, std::size_t, std::size_t>, PropRef> memo_;
    std::map<const Formula*, std::vector<logic::FormulaPtr>> powers_;
};

} // namespace

PropRef unfold_model(symbolic::SymbolicModel& sm, sat::PropDag& dag, const KUnfolding& u)
{
    Translator t(sm, dag, u);
    std::vector<PropRef> parts{t.initial(u.state(0, 0))};
    for (std::size_t j = 1; j <= u.paths(); ++j)
        for (std::size_t i = 0; i < u.k(); ++i)
            parts.push_back(t.transition(i, j, i + 1, j));
    return dag.and_all(std::move(parts));
}

PropRef translate(symbolic::SymbolicModel& sm, sat::PropDag& dag, const KUnfolding& u, const Formula& f,
                  std::size_t m, std::size_t n, std::size_t first_path)
{
    if (first_path == 0 || first_path + path_count(f, u.k()) > u.paths() + 1)
        throw InvalidArgument("not enough symbolic paths allocated for the formula");
    Translator t(sm, dag, u);
    return t.translate(f, m, n, first_path);
}

BoundStats check_bound(symbolic::SymbolicModel& sm, const Formula& nnf_formula, std::size_t k,
                       const BmcOptions& options, Witness* witness)
{
    const auto start = std::chrono::steady_clock::now();
    BoundStats stats;
    stats.k = k;
    stats.paths = path_count(nnf_formula, k);
    const KUnfolding u(sm.encoding().state_bits(), k, stats.paths);
    sat::PropDag dag;
    Translator t(sm, dag, u);
    std::vector<PropRef> parts{t.initial(u.state(0, 0))};
    for (std::size_t j = 1; j <= u.paths(); ++j)
        for (std::size_t i = 0; i < k; ++i)
            parts.push_back(t.transition(i, j, i + 1, j));
    parts.push_back(t.translate(nnf_formula, 0, 0, 1));
    const PropRef whole = dag.and_all(std::move(parts));

    sat::Cnf cnf(u.num_vars());
    sat::TseitinEncoder encoder(dag, cnf);
    const sat::Lit top = encoder.encode(whole);
    cnf.add_unit(top);
    cnf.top = top;
    stats.variables = cnf.num_vars();
    stats.clauses = cnf.clauses().size();
    if (options.on_cnf)
        options.on_cnf(k, cnf);

    sat::Solver solver(cnf.num_vars(), options.solver);
    solver.add_cnf(cnf);
    stats.satisfiable = solver.solve();
    if (stats.satisfiable && witness) {
        const auto& enc = sm.encoding();
        witness->k = k;
        witness->paths.assign(1, {symbolic::decode_state(enc, solver.model(), u.state(0, 0))});
        for (std::size_t j = 1; j <= u.paths(); ++j) {
            std::vector<model::GlobalState> path;
            for (std::size_t i = 0; i <= k; ++i)
                path.push_back(symbolic::decode_state(enc, solver.model(), u.state(i, j)));
            witness->paths.push_back(std::move(path));
        }
    }
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

BmcResult bmc_check(symbolic::SymbolicModel& sm, const Formula& f, const BmcOptions& options)
{
    check_names(sm.system(), f);
    const auto nnf = logic::to_nnf(std::make_shared<const Formula>(f));
    if (!logic::is_ectlk(*nnf))
        throw FragmentError("formula is not in ECTLK after negation normal form: " + logic::format_formula(nnf));

    BmcResult result;
    result.k_max = options.k_max;
    if (result.k_max == 0) {
        const auto reachable = sm.count_states(sm.reachable());
        result.k_max = reachable > bdd::BigCount(1'000'000) ? 1'000'000 : static_cast<std::size_t>(reachable);
    }
    for (std::size_t k = std::max<std::size_t>(1, options.k_min); k <= result.k_max; ++k) {
        Witness w;
        auto stats = check_bound(sm, *nnf, k, options, &w);
        result.bounds.push_back(stats);
        result.k = k;
        if (stats.satisfiable) {
            result.holds = true;
            result.witness = std::move(w);
            break;
        }
    }
    return result;
}

} // namespace epimc::bmc
