#ifndef RLBAYES_GRAPH_HPP
#define RLBAYES_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlbayes/error.hpp"

namespace rlbayes {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

enum class OpKind : std::uint8_t { Add = 0, Delete = 1, Reverse = 2 };

const char* to_string(OpKind kind);

// A single structure edit on the ordered pair (source, target).
struct Operation {
    OpKind kind = OpKind::Add;
    NodeId source = 0;
    NodeId target = 0;

    friend bool operator==(const Operation&, const Operation&) = default;
};

using OperationId = std::uint32_t;

std::size_t operation_count(std::size_t n_nodes);

// Canonical ids: all Adds by (source, target), then all Deletes, then all Reverses.
OperationId operation_id(const Operation& op, std::size_t n_nodes);
Operation operation_from_id(OperationId id, std::size_t n_nodes);

std::vector<Operation> all_operation_ids(std::size_t n_nodes);

Operation reverse_of(const Operation& op);

std::string describe(const Operation& op);

// Packed row-major adjacency bits, ceil(n*n/8) bytes.
struct CanonicalKey {
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
    std::size_t operator()(const CanonicalKey& key) const noexcept;
};

class OperationNotApplicable : public Error {
public:
    enum class Reason { EdgeExists, EdgeMissing, Cycle };

    OperationNotApplicable(const Operation& op, Reason reason);

    Reason reason() const { return reason_; }
    const Operation& operation() const { return op_; }

private:
    Operation op_;
    Reason reason_;
};

// Directed acyclic graph over n nodes stored as two bit matrices (children and
// parents rows). Values are immutable from the outside: every edit returns a
// fresh Dag and acyclicity holds for every reachable value.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t n_nodes);

    // Throws ContractViolation on self-loops, out-of-range nodes or cycles.
    static Dag from_edges(std::size_t n_nodes, std::span<const Edge> edges);

    std::size_t n_nodes() const { return n_; }
    std::size_t edge_count() const { return edges_; }
    bool has_edge(NodeId source, NodeId target) const;

    std::vector<NodeId> parents(NodeId node) const;
    std::vector<NodeId> children(NodeId node) const;
    std::span<const std::uint64_t> parent_words(NodeId node) const;
    std::size_t words_per_row() const { return words_; }

    // Edges in (source, target) lexicographic order.
    std::vector<Edge> edges() const;

    // True iff a directed path target ~> source exists, i.e. adding
    // source -> target would close a cycle.
    bool creates_cycle(NodeId source, NodeId target) const;

    bool is_applicable(const Operation& op) const;
    Dag apply(const Operation& op) const;

    CanonicalKey canonical_key() const;

    friend bool operator==(const Dag& a, const Dag& b) { return a.n_ == b.n_ && a.out_ == b.out_; }

private:
    void check_node(NodeId node) const;
    void set_edge(NodeId source, NodeId target);
    void clear_edge(NodeId source, NodeId target);
    bool reaches(NodeId from, NodeId to) const;

    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::uint64_t> out_;  // row i: children of i
    std::vector<std::uint64_t> in_;   // row i: parents of i
};

// Free-function spellings of the Dag members.
inline bool is_applicable(const Dag& dag, const Operation& op) { return dag.is_applicable(op); }
inline Dag apply(const Dag& dag, const Operation& op) { return dag.apply(op); }
inline bool creates_cycle(const Dag& dag, const Edge& candidate) {
    return dag.creates_cycle(candidate.first, candidate.second);
}
inline CanonicalKey canonical_key(const Dag& dag) { return dag.canonical_key(); }

}  // namespace rlbayes

#endif  // RLBAYES_GRAPH_HPP
