#pragma once

// Reduced ordered binary decision diagrams.
//
// Nodes are hash-consed in a per-manager unique table, so two NodeRefs of the
// same manager denote the same Boolean function iff they compare equal. The
// variable order is the index order and is fixed when the manager is created.
// There are no complement edges and no garbage collection: the node arena only
// grows for the lifetime of a manager.

#include "epimc/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace epimc::bdd {

using BigCount = boost::multiprecision::cpp_int;

struct VarId {
    std::uint32_t index = 0;

    friend auto operator<=>(VarId, VarId) = default;
};

class InvalidVariable : public Error {
public:
    using Error::Error;
};

class WrongManager : public Error {
public:
    using Error::Error;
};

class RenameConflict : public Error {
public:
    using Error::Error;
};

class MissingVariable : public Error {
public:
    using Error::Error;
};

class Manager;

// Handle to a node of one manager. Terminals are the reserved ids 0 (false)
// and 1 (true).
class NodeRef {
public:
    NodeRef() = default;

    bool is_false() const noexcept { return id_ == 0; }
    bool is_true() const noexcept { return id_ == 1; }
    bool is_terminal() const noexcept { return id_ < 2; }
    std::uint32_t id() const noexcept { return id_; }

    friend bool operator==(NodeRef, NodeRef) = default;

private:
    friend class Manager;
    NodeRef(std::uint32_t id, std::uint32_t owner) : id_(id), owner_(owner) {}

    std::uint32_t id_ = 0;
    std::uint32_t owner_ = 0;
};

enum class BinOp : std::uint8_t { And, Or, Xor, Implies, Iff };

class Manager {
public:
    explicit Manager(std::uint32_t var_count);

    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;
    Manager(Manager&&) noexcept = default;
    Manager& operator=(Manager&&) noexcept = default;

    std::uint32_t var_count() const noexcept { return var_count_; }

    NodeRef bdd_true() const noexcept { return {1, serial_}; }
    NodeRef bdd_false() const noexcept { return {0, serial_}; }
    NodeRef constant(bool value) const noexcept { return value ? bdd_true() : bdd_false(); }

    NodeRef var(VarId v);
    NodeRef nvar(VarId v);
    // Conjunction of the positive literals of `vars`.
    NodeRef cube(std::span<const VarId> vars);

    NodeRef apply(BinOp op, NodeRef a, NodeRef b);
    NodeRef negate(NodeRef a);
    NodeRef ite(NodeRef f, NodeRef g, NodeRef h);

    NodeRef and_(NodeRef a, NodeRef b) { return apply(BinOp::And, a, b); }
    NodeRef or_(NodeRef a, NodeRef b) { return apply(BinOp::Or, a, b); }

    NodeRef exists(NodeRef a, std::span<const VarId> vars);
    NodeRef forall(NodeRef a, std::span<const VarId> vars);
    // exists(and(a, b), vars) without building the conjunction.
    NodeRef and_exists(NodeRef a, NodeRef b, std::span<const VarId> vars);

    // Substitutes variables according to `mapping`; unmapped variables are
    // kept. The extended mapping must be injective on the support of `a`.
    NodeRef rename(NodeRef a, const std::map<VarId, VarId>& mapping);

    // Number of satisfying assignments over variables [0, over).
    BigCount sat_count(NodeRef a, std::uint32_t over);

    bool eval(NodeRef a, const std::map<VarId, bool>& assignment) const;
    // Total assignment indexed by variable; no support check beyond bounds.
    bool eval(NodeRef a, const std::vector<bool>& assignment) const;

    VarId top_var(NodeRef a) const;
    NodeRef low(NodeRef a) const;
    NodeRef high(NodeRef a) const;

    std::vector<VarId> support(NodeRef a) const;
    // Number of internal nodes reachable from `a`.
    std::size_t dag_size(NodeRef a) const;

    // Internal nodes currently stored (unique-table size). Without garbage
    // collection this is also the peak.
    std::size_t node_count() const noexcept { return nodes_.size() - 2; }
    std::size_t cache_size() const noexcept { return cache_.size(); }
    void clear_cache() { cache_.clear(); }

    // Graphviz rendering: solid edges for the high child, dotted for low.
    std::string to_dot(NodeRef a, const std::function<std::string(VarId)>& name = {}) const;

    // Reducedness, ordering and uniqueness of the whole arena.
    bool check_invariants() const;

private:
    struct Node {
        std::uint32_t var;
        std::uint32_t low;
        std::uint32_t high;
    };

    struct Triple {
        std::uint32_t a, b, c;
        friend bool operator==(const Triple&, const Triple&) = default;
    };
    struct TripleHash {
        std::size_t operator()(const Triple& t) const noexcept;
    };
    struct CacheKey {
        std::uint32_t op, a, b, c;
        friend bool operator==(const CacheKey&, const CacheKey&) = default;
    };
    struct CacheKeyHash {
        std::size_t operator()(const CacheKey& k) const noexcept;
    };

    enum CacheOp : std::uint32_t {
        kAnd, kOr, kXor, kImplies, kIff, kNot, kIte, kExists, kAndExists
    };

    // Computed-table entries kept before the table is flushed.
    static constexpr std::size_t kCacheLimit = std::size_t{1} << 21;

    void remember(const CacheKey& key, std::uint32_t result);
    std::uint32_t check(NodeRef a) const;
    void check_var(VarId v) const;
    NodeRef wrap(std::uint32_t id) const noexcept { return {id, serial_}; }
    std::uint32_t level(std::uint32_t id) const noexcept { return nodes_[id].var; }

    std::uint32_t make(std::uint32_t var, std::uint32_t low, std::uint32_t high);
    std::uint32_t apply_rec(BinOp op, std::uint32_t a, std::uint32_t b);
    std::uint32_t not_rec(std::uint32_t a);
    std::uint32_t ite_rec(std::uint32_t f, std::uint32_t g, std::uint32_t h);
    std::uint32_t exists_rec(std::uint32_t a, std::uint32_t cube);
    std::uint32_t and_exists_rec(std::uint32_t a, std::uint32_t b, std::uint32_t cube);
    std::uint32_t cube_of(std::span<const VarId> vars);

    std::uint32_t var_count_;
    std::uint32_t serial_;
    std::vector<Node> nodes_;
    std::unordered_map<Triple, std::uint32_t, TripleHash> unique_;
    std::unordered_map<CacheKey, std::uint32_t, CacheKeyHash> cache_;
};

} // namespace epimc::bdd
