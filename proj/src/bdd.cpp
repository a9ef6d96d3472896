#include "epimc/bdd.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace epimc::bdd {

namespace {

constexpr std::uint32_t kTerminalLevel = std::numeric_limits<std::uint32_t>::max();

std::atomic<std::uint32_t> next_serial{1};

std::size_t mix(std::size_t h, std::uint32_t v) noexcept
{
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

bool commutative(BinOp op) noexcept
{
    return op == BinOp::And || op == BinOp::Or || op == BinOp::Xor || op == BinOp::Iff;
}

} // namespace

std::size_t Manager::TripleHash::operator()(const Triple& t) const noexcept
{
    return mix(mix(mix(0, t.a), t.b), t.c);
}

std::size_t Manager::CacheKeyHash::operator()(const CacheKey& k) const noexcept
{
    return mix(mix(mix(mix(0, k.op), k.a), k.b), k.c);
}

Manager::Manager(std::uint32_t var_count)
    : var_count_(var_count), serial_(next_serial.fetch_add(1))
{
    nodes_.push_back({kTerminalLevel, 0, 0});
    nodes_.push_back({kTerminalLevel, 1, 1});
}

std::uint32_t Manager::check(NodeRef a) const
{
    if (a.owner_ != serial_ || a.id_ >= nodes_.size())
        throw WrongManager("node does not belong to this BDD manager");
    return a.id_;
}

void Manager::check_var(VarId v) const
{
    if (v.index >= var_count_)
        throw InvalidVariable("variable " + std::to_string(v.index) + " out of range (manager has " +
                              std::to_string(var_count_) + " variables)");
}

std::uint32_t Manager::make(std::uint32_t var, std::uint32_t low, std::uint32_t high)
{
    if (low == high)
        return low;
    Triple key{var, low, high};
    if (auto it = unique_.find(key); it != unique_.end())
        return it->second;
    auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({var, low, high});
    unique_.emplace(key, id);
    return id;
}

NodeRef Manager::var(VarId v)
{
    check_var(v);
    return wrap(make(v.index, 0, 1));
}

NodeRef Manager::nvar(VarId v)
{
    check_var(v);
    return wrap(make(v.index, 1, 0));
}

std::uint32_t Manager::cube_of(std::span<const VarId> vars)
{
    std::vector<std::uint32_t> sorted;
    sorted.reserve(vars.size());
    for (VarId v : vars) {
        check_var(v);
        sorted.push_back(v.index);
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::uint32_t r = 1;
    for (auto v : sorted)
        r = make(v, 0, r);
    return r;
}

NodeRef Manager::cube(std::span<const VarId> vars)
{
    return wrap(cube_of(vars));
}

NodeRef Manager::apply(BinOp op, NodeRef a, NodeRef b)
{
    return wrap(apply_rec(op, check(a), check(b)));
}

NodeRef Manager::negate(NodeRef a)
{
    return wrap(not_rec(check(a)));
}

NodeRef Manager::ite(NodeRef f, NodeRef g, NodeRef h)
{
    return wrap(ite_rec(check(f), check(g), check(h)));
}

void Manager::remember(const CacheKey& key, std::uint32_t result)
{
    if (cache_.size() >= kCacheLimit)
        cache_.clear();
    cache_.emplace(key, result);
}

std::uint32_t Manager::not_rec(std::uint32_t a)
{
    if (a < 2)
        return 1 - a;
    CacheKey key{kNot, a, 0, 0};
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;
    const Node n = nodes_[a];
    auto r = make(n.var, not_rec(n.low), not_rec(n.high));
    remember(key, r);
    return r;
}

std::uint32_t Manager::apply_rec(BinOp op, std::uint32_t a, std::uint32_t b)
{
    switch (op) {
    case BinOp::And:
        if (a == 0 || b == 0) return 0;
        if (a == 1) return b;
        if (b == 1 || a == b) return a;
        break;
    case BinOp::Or:
        if (a == 1 || b == 1) return 1;
        if (a == 0) return b;
        if (b == 0 || a == b) return a;
        break;
    case BinOp::Xor:
        if (a == 0) return b;
        if (b == 0) return a;
        if (a == b) return 0;
        if (a == 1) return not_rec(b);
        if (b == 1) return not_rec(a);
        break;
    case BinOp::Implies:
        if (a == 0 || b == 1 || a == b) return 1;
        if (a == 1) return b;
        if (b == 0) return not_rec(a);
        break;
    case BinOp::Iff:
        if (a == b) return 1;
        if (a == 1) return b;
        if (b == 1) return a;
        if (a == 0) return not_rec(b);
        if (b == 0) return not_rec(a);
        break;
    }
    if (commutative(op) && a > b)
        std::swap(a, b);
    CacheKey key{static_cast<std::uint32_t>(op), a, b, 0};
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;

    const Node na = nodes_[a];
    const Node nb = nodes_[b];
    const std::uint32_t v = std::min(na.var, nb.var);
    const std::uint32_t a0 = na.var == v ? na.low : a;
    const std::uint32_t a1 = na.var == v ? na.high : a;
    const std::uint32_t b0 = nb.var == v ? nb.low : b;
    const std::uint32_t b1 = nb.var == v ? nb.high : b;
    const std::uint32_t lo = apply_rec(op, a0, b0);
    const std::uint32_t hi = apply_rec(op, a1, b1);
    auto r = make(v, lo, hi);
    remember(key, r);
    return r;
}

std::uint32_t Manager::ite_rec(std::uint32_t f, std::uint32_t g, std::uint32_t h)
{
    if (f == 1) return g;
    if (f == 0) return h;
    if (g == h) return g;
    if (g == 1 && h == 0) return f;
    if (g == 0 && h == 1) return not_rec(f);
    if (g == 1) return apply_rec(BinOp::Or, f, h);
    if (h == 0) return apply_rec(BinOp::And, f, g);

    CacheKey key{kIte, f, g, h};
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;

    const std::uint32_t v = std::min({level(f), level(g), level(h)});
    auto cof = [&](std::uint32_t x, bool hi) {
        if (level(x) != v) return x;
        return hi ? nodes_[x].high : nodes_[x].low;
    };
    const std::uint32_t lo = ite_rec(cof(f, false), cof(g, false), cof(h, false));
    const std::uint32_t hi = ite_rec(cof(f, true), cof(g, true), cof(h, true));
    auto r = make(v, lo, hi);
    remember(key, r);
    return r;
}

std::uint32_t Manager::exists_rec(std::uint32_t a, std::uint32_t cube)
{
    if (a < 2 || cube == 1)
        return a;
    // Skip cube variables above the top of `a`.
    while (cube != 1 && level(cube) < level(a))
        cube = nodes_[cube].high;
    if (cube == 1)
        return a;

    CacheKey key{kExists, a, cube, 0};
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;

    const Node n = nodes_[a];
    std::uint32_t r;
    if (n.var == level(cube)) {
        const std::uint32_t rest = nodes_[cube].high;
        const std::uint32_t lo = exists_rec(n.low, rest);
        r = lo == 1 ? 1 : apply_rec(BinOp::Or, lo, exists_rec(n.high, rest));
    } else {
        r = make(n.var, exists_rec(n.low, cube), exists_rec(n.high, cube));
    }
    remember(key, r);
    return r;
}

NodeRef Manager::exists(NodeRef a, std::span<const VarId> vars)
{
    auto id = check(a);
    return wrap(exists_rec(id, cube_of(vars)));
}

NodeRef Manager::forall(NodeRef a, std::span<const VarId> vars)
{
    auto id = check(a);
    auto c = cube_of(vars);
    return wrap(not_rec(exists_rec(not_rec(id), c)));
}

std::uint32_t Manager::and_exists_rec(std::uint32_t a, std::uint32_t b, std::uint32_t cube)
{
    if (a == 0 || b == 0)
        return 0;
    if (a == 1 && b == 1)
        return 1;
    if (a == 1)
        return exists_rec(b, cube);
    if (b == 1 || a == b)
        return exists_rec(a, cube);
    if (a > b)
        std::swap(a, b);

    const std::uint32_t v = std::min(level(a), level(b));
    while (cube != 1 && level(cube) < v)
        cube = nodes_[cube].high;
    if (cube == 1)
        return apply_rec(BinOp::And, a, b);

    CacheKey key{kAndExists, a, b, cube};
    if (auto it = cache_.find(key); it != cache_.end())
        return it->second;

    const Node na = nodes_[a];
    const Node nb = nodes_[b];
    const std::uint32_t a0 = na.var == v ? na.low : a;
    const std::uint32_t a1 = na.var == v ? na.high : a;
    const std::uint32_t b0 = nb.var == v ? nb.low : b;
    const std::uint32_t b1 = nb.var == v ? nb.high : b;

    std::uint32_t r;
    if (level(cube) == v) {
        const std::uint32_t rest = nodes_[cube].high;
        const std::uint32_t lo = and_exists_rec(a0, b0, rest);
        r = lo == 1 ? 1 : apply_rec(BinOp::Or, lo, and_exists_rec(a1, b1, rest));
    } else {
        r = make(v, and_exists_rec(a0, b0, cube), and_exists_rec(a1, b1, cube));
    }
    remember(key, r);
    return r;
}

NodeRef Manager::and_exists(NodeRef a, NodeRef b, std::span<const VarId> vars)
{
    auto ia = check(a);
    auto ib = check(b);
    return wrap(and_exists_rec(ia, ib, cube_of(vars)));
}

NodeRef Manager::rename(NodeRef a, const std::map<VarId, VarId>& mapping)
{
    const auto root = check(a);
    for (const auto& [from, to] : mapping) {
        check_var(from);
        check_var(to);
    }
    const auto supp = support(a);
    auto image = [&](std::uint32_t v) {
        auto it = mapping.find(VarId{v});
        return it == mapping.end() ? v : it->second.index;
    };

    std::set<std::uint32_t> seen;
    bool order_preserving = true;
    std::uint32_t prev = 0;
    bool first = true;
    for (VarId v : supp) {
        const auto img = image(v.index);
        if (!seen.insert(img).second)
            throw RenameConflict("rename maps two support variables onto variable " + std::to_string(img));
        if (!first && img <= prev)
            order_preserving = false;
        prev = img;
        first = false;
    }

    std::unordered_map<std::uint32_t, std::uint32_t> memo;
    std::function<std::uint32_t(std::uint32_t)> rec = [&](std::uint32_t n) -> std::uint32_t {
        if (n < 2)
            return n;
        if (auto it = memo.find(n); it != memo.end())
            return it->second;
        const Node node = nodes_[n];
        const std::uint32_t lo = rec(node.low);
        const std::uint32_t hi = rec(node.high);
        const std::uint32_t v = image(node.var);
        std::uint32_t r;
        if (order_preserving)
            r = make(v, lo, hi);
        else
            r = ite_rec(make(v, 0, 1), hi, lo);
        memo.emplace(n, r);
        return r;
    };
    return wrap(rec(root));
}

BigCount Manager::sat_count(NodeRef a, std::uint32_t over)
{
    const auto root = check(a);
    const auto supp = support(a);
    if (!supp.empty() && supp.back().index >= over)
        throw InvalidArgument("sat_count: variable count " + std::to_string(over) +
                              " does not cover support variable " + std::to_string(supp.back().index));

    auto lvl = [&](std::uint32_t n) { return n < 2 ? over : nodes_[n].var; };
    std::unordered_map<std::uint32_t, BigCount> memo;
    // Count over variables [lvl(n), over).
    std::function<BigCount(std::uint32_t)> rec = [&](std::uint32_t n) -> BigCount {
        if (n == 0) return 0;
        if (n == 1) return 1;
        if (auto it = memo.find(n); it != memo.end())
            return it->second;
        const Node node = nodes_[n];
        BigCount lo = rec(node.low) << (lvl(node.low) - node.var - 1);
        BigCount hi = rec(node.high) << (lvl(node.high) - node.var - 1);
        BigCount r = lo + hi;
        memo.emplace(n, r);
        return r;
    };
    return rec(root) << lvl(root);
}

bool Manager::eval(NodeRef a, const std::map<VarId, bool>& assignment) const
{
    auto n = check(a);
    for (VarId v : support(a)) {
        if (!assignment.contains(v))
            throw MissingVariable("assignment lacks support variable " + std::to_string(v.index));
    }
    while (n >= 2) {
        const Node& node = nodes_[n];
        n = assignment.at(VarId{node.var}) ? node.high : node.low;
    }
    return n == 1;
}

bool Manager::eval(NodeRef a, const std::vector<bool>& assignment) const
{
    auto n = check(a);
    while (n >= 2) {
        const Node& node = nodes_[n];
        if (node.var >= assignment.size())
            throw MissingVariable("assignment lacks support variable " + std::to_string(node.var));
        n = assignment[node.var] ? node.high : node.low;
    }
    return n == 1;
}

VarId Manager::top_var(NodeRef a) const
{
    auto n = check(a);
    if (n < 2)
        throw InvalidArgument("terminal node has no variable");
    return VarId{nodes_[n].var};
}

NodeRef Manager::low(NodeRef a) const
{
    auto n = check(a);
    return n < 2 ? a : wrap(nodes_[n].low);
}

NodeRef Manager::high(NodeRef a) const
{
    auto n = check(a);
    return n < 2 ? a : wrap(nodes_[n].high);
}

std::vector<VarId> Manager::support(NodeRef a) const
{
    std::set<std::uint32_t> vars;
    std::unordered_set<std::uint32_t> visited;
    std::vector<std::uint32_t> stack{check(a)};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (n < 2 || !visited.insert(n).second)
            continue;
        vars.insert(nodes_[n].var);
        stack.push_back(nodes_[n].low);
        stack.push_back(nodes_[n].high);
    }
    std::vector<VarId> out;
    for (auto v : vars)
        out.push_back(VarId{v});
    return out;
}

std::size_t Manager::dag_size(NodeRef a) const
{
    std::unordered_set<std::uint32_t> visited;
    std::vector<std::uint32_t> stack{check(a)};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (n < 2 || !visited.insert(n).second)
            continue;
        stack.push_back(nodes_[n].low);
        stack.push_back(nodes_[n].high);
    }
    return visited.size();
}

std::string Manager::to_dot(NodeRef a, const std::function<std::string(VarId)>& name) const
{
    auto root = check(a);
    std::ostringstream out;
    out << "digraph bdd {\n";
    out << "  n0 [shape=box,label=\"false\"];\n";
    out << "  n1 [shape=box,label=\"true\"];\n";
    std::unordered_set<std::uint32_t> visited;
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (n < 2 || !visited.insert(n).second)
            continue;
        const Node& node = nodes_[n];
        const std::string label = name ? name(VarId{node.var}) : "x" + std::to_string(node.var);
        out << "  n" << n << " [label=\"" << label << "\"];\n";
        out << "  n" << n << " -> n" << node.high << ";\n";
        out << "  n" << n << " -> n" << node.low << " [style=dotted];\n";
        stack.push_back(node.low);
        stack.push_back(node.high);
    }
    out << "}\n";
    return out.str();
}

bool Manager::check_invariants() const
{
    if (unique_.size() != nodes_.size() - 2)
        return false;
    for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.low == n.high || n.var >= var_count_)
            return false;
        if (level(n.low) <= n.var || level(n.high) <= n.var)
            return false;
        auto it = unique_.find(Triple{n.var, n.low, n.high});
        if (it == unique_.end() || it->second != i)
            return false;
    }
    return true;
}

} // namespace epimc::bdd
