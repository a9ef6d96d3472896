#include "epimc/prop_bridge.hpp"

#include <unordered_map>

namespace epimc::symbolic {

namespace {

// Position of each current-state variable in cur_vars, by BDD index.
std::vector<std::size_t> cur_positions(const StateEncoding& enc)
{
    std::vector<std::size_t> pos(enc.var_count, SIZE_MAX);
    for (std::size_t j = 0; j < enc.cur_vars.size(); ++j)
        pos[enc.cur_vars[j].index] = j;
    return pos;
}

} // namespace

VarMap state_var_map(const StateEncoding& enc, std::span<const sat::Var> cur, std::span<const sat::Var> next)
{
    const std::size_t m = enc.cur_vars.size();
    if (cur.size() != m || (!next.empty() && next.size() != m))
        throw InvalidArgument("state block width does not match the encoding");
    VarMap map(enc.var_count, 0);
    for (std::size_t j = 0; j < m; ++j) {
        map[enc.cur_vars[j].index] = cur[j];
        if (!next.empty())
            map[enc.next_vars[j].index] = next[j];
    }
    return map;
}

sat::PropRef to_prop(const bdd::Manager& mgr, NodeRef f, sat::PropDag& dag, const VarMap& map)
{
    std::unordered_map<std::uint32_t, sat::PropRef> memo;
    auto rec = [&](auto& self, NodeRef n) -> sat::PropRef {
        if (n.is_terminal())
            return dag.constant(n.is_true());
        if (auto it = memo.find(n.id()); it != memo.end())
            return it->second;
        const auto v = mgr.top_var(n).index;
        if (v >= map.size() || map[v] == 0)
            throw InvalidArgument("BDD depends on unmapped variable " + std::to_string(v));
        const sat::PropRef hi = self(self, mgr.high(n));
        const sat::PropRef lo = self(self, mgr.low(n));
        const sat::PropRef out = dag.ite(dag.var(map[v]), hi, lo);
        memo.emplace(n.id(), out);
        return out;
    };
    return rec(rec, f);
}

std::vector<bool> state_bits(const StateEncoding& enc, const model::GlobalState& g)
{
    if (g.locals.size() != enc.agents.size())
        throw InvalidArgument("state arity does not match the encoding");
    const auto pos = cur_positions(enc);
    std::vector<bool> bits(enc.cur_vars.size(), false);
    for (std::size_t a = 0; a < enc.agents.size(); ++a) {
        const auto& cur = enc.agents[a].cur;
        for (std::size_t j = 0; j < cur.size(); ++j)
            bits[pos[cur[j].index]] = (g.locals[a] >> j) & 1;
    }
    return bits;
}

model::GlobalState decode_state(const StateEncoding& enc, const std::vector<bool>& model, std::span<const sat::Var> w)
{
    const auto pos = cur_positions(enc);
    model::GlobalState g;
    g.locals.resize(enc.agents.size(), 0);
    for (std::size_t a = 0; a < enc.agents.size(); ++a) {
        const auto& cur = enc.agents[a].cur;
        for (std::size_t j = 0; j < cur.size(); ++j)
            if (model.at(w[pos[cur[j].index]]))
                g.locals[a] |= 1u << j;
    }
    return g;
}

sat::PropRef state_equals(const StateEncoding& enc, sat::PropDag& dag, std::span<const sat::Var> w,
                          const model::GlobalState& g)
{
    const auto bits = state_bits(enc, g);
    std::vector<sat::PropRef> lits;
    for (std::size_t j = 0; j < bits.size(); ++j)
        lits.push_back(dag.lit(sat::Lit::make(w[j], bits[j])));
    return dag.and_all(std::move(lits));
}

} // namespace epimc::symbolic
