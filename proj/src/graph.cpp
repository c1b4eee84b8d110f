#include "rlbayes/graph.hpp"

#include <bit>

namespace rlbayes {

const char* to_string(OpKind kind) {
    switch (kind) {
        case OpKind::Add: return "add";
        case OpKind::Delete: return "del";
        case OpKind::Reverse: return "rev";
    }
    return "?";
}

std::size_t operation_count(std::size_t n_nodes) { return 3 * n_nodes * (n_nodes - 1); }

OperationId operation_id(const Operation& op, std::size_t n) {
    if (op.source >= n || op.target >= n || op.source == op.target) {
        throw ContractViolation("operation " + describe(op) + " is not well formed for " + std::to_string(n) + " nodes");
    }
    const std::size_t pairs = n * (n - 1);
    const std::size_t pair = op.source * (n - 1) + (op.target < op.source ? op.target : op.target - 1);
    return static_cast<OperationId>(static_cast<std::size_t>(op.kind) * pairs + pair);
}

Operation operation_from_id(OperationId id, std::size_t n) {
    const std::size_t pairs = n * (n - 1);
    if (n < 2 || id >= 3 * pairs) {
        throw ContractViolation("operation id " + std::to_string(id) + " out of range");
    }
    Operation op;
    op.kind = static_cast<OpKind>(id / pairs);
    const std::size_t pair = id % pairs;
    op.source = pair / (n - 1);
    const std::size_t t = pair % (n - 1);
    op.target = t < op.source ? t : t + 1;
    return op;
}

std::vector<Operation> all_operation_ids(std::size_t n_nodes) {
    if (n_nodes < 2) {
        throw ContractViolation("operation space needs at least 2 nodes");
    }
    std::vector<Operation> ops;
    ops.reserve(operation_count(n_nodes));
    for (OperationId id = 0; id < operation_count(n_nodes); ++id) {
        ops.push_back(operation_from_id(id, n_nodes));
    }
    return ops;
}

Operation reverse_of(const Operation& op) {
    switch (op.kind) {
        case OpKind::Add: return {OpKind::Delete, op.source, op.target};
        case OpKind::Delete: return {OpKind::Add, op.source, op.target};
        case OpKind::Reverse: return {OpKind::Reverse, op.target, op.source};
    }
    return op;
}

std::string describe(const Operation& op) {
    return std::string(to_string(op.kind)) + "_" + std::to_string(op.source) + "_" + std::to_string(op.target);
}

std::size_t CanonicalKeyHash::operator()(const CanonicalKey& key) const noexcept {
    // FNV-1a over 8-byte chunks.
    std::uint64_t h = 1469598103934665603ULL;
    const auto& b = key.bytes;
    std::size_t i = 0;
    for (; i + 8 <= b.size(); i += 8) {
        std::uint64_t chunk = 0;
        for (std::size_t k = 0; k < 8; ++k) chunk |= std::uint64_t{b[i + k]} << (8 * k);
        h = (h ^ chunk) * 1099511628211ULL;
    }
    for (; i < b.size(); ++i) h = (h ^ b[i]) * 1099511628211ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

const char* reason_text(OperationNotApplicable::Reason reason) {
    switch (reason) {
        case OperationNotApplicable::Reason::EdgeExists: return "edge already exists";
        case OperationNotApplicable::Reason::EdgeMissing: return "edge does not exist";
        case OperationNotApplicable::Reason::Cycle: return "result would contain a cycle";
    }
    return "?";
}

}  // namespace

OperationNotApplicable::OperationNotApplicable(const Operation& op, Reason reason)
    : Error("cannot apply " + describe(op) + ": " + reason_text(reason)), op_(op), reason_(reason) {}

Dag::Dag(std::size_t n_nodes)
    : n_(n_nodes), words_((n_nodes + 63) / 64), out_(n_ * words_, 0), in_(n_ * words_, 0) {}

Dag Dag::from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
    Dag dag(n_nodes);
    for (const auto& [s, t] : edges) {
        dag.check_node(s);
        dag.check_node(t);
        if (s == t) throw ContractViolation("self-loop on node " + std::to_string(s));
        if (dag.has_edge(s, t)) continue;
        if (dag.creates_cycle(s, t)) {
            throw ContractViolation("edge " + std::to_string(s) + " -> " + std::to_string(t) + " closes a cycle");
        }
        dag.set_edge(s, t);
    }
    return dag;
}

void Dag::check_node(NodeId node) const {
    if (node >= n_) {
        throw ContractViolation("node index " + std::to_string(node) + " out of range for " + std::to_string(n_) +
                                " nodes");
    }
}

bool Dag::has_edge(NodeId source, NodeId target) const {
    check_node(source);
    check_node(target);
    return (out_[source * words_ + target / 64] >> (target % 64)) & 1U;
}

void Dag::set_edge(NodeId s, NodeId t) {
    out_[s * words_ + t / 64] |= std::uint64_t{1} << (t % 64);
    in_[t * words_ + s / 64] |= std::uint64_t{1} << (s % 64);
    ++edges_;
}

void Dag::clear_edge(NodeId s, NodeId t) {
    out_[s * words_ + t / 64] &= ~(std::uint64_t{1} << (t % 64));
    in_[t * words_ + s / 64] &= ~(std::uint64_t{1} << (s % 64));
    --edges_;
}

namespace {

std::vector<NodeId> bits_to_nodes(std::span<const std::uint64_t> row) {
    std::vector<NodeId> nodes;
    for (std::size_t w = 0; w < row.size(); ++w) {
        std::uint64_t bits = row[w];
        while (bits != 0) {
            nodes.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return nodes;
}

}  // namespace

std::vector<NodeId> Dag::parents(NodeId node) const {
    check_node(node);
    return bits_to_nodes(parent_words(node));
}

std::vector<NodeId> Dag::children(NodeId node) const {
    check_node(node);
    return bits_to_nodes({out_.data() + node * words_, words_});
}

std::span<const std::uint64_t> Dag::parent_words(NodeId node) const { return {in_.data() + node * words_, words_}; }

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> result;
    result.reserve(edges_);
    for (NodeId s = 0; s < n_; ++s) {
        for (NodeId t : children(s)) result.emplace_back(s, t);
    }
    return result;
}

bool Dag::reaches(NodeId from, NodeId to) const {
    if (from == to) return true;
    std::vector<std::uint64_t> seen(words_, 0);
    std::vector<NodeId> stack{from};
    seen[from / 64] |= std::uint64_t{1} << (from % 64);
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        const std::uint64_t* row = out_.data() + u * words_;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t fresh = row[w] & ~seen[w];
            if (fresh == 0) continue;
            seen[w] |= fresh;
            while (fresh != 0) {
                const NodeId v = w * 64 + static_cast<std::size_t>(std::countr_zero(fresh));
                if (v == to) return true;
                stack.push_back(v);
                fresh &= fresh - 1;
            }
        }
    }
    return false;
}

bool Dag::creates_cycle(NodeId source, NodeId target) const {
    check_node(source);
    check_node(target);
    return reaches(target, source);
}

bool Dag::is_applicable(const Operation& op) const {
    check_node(op.source);
    check_node(op.target);
    if (op.source == op.target) throw ContractViolation("operation " + describe(op) + " is a self-loop");
    const bool present = has_edge(op.source, op.target);
    switch (op.kind) {
        case OpKind::Add:
            return !present && !creates_cycle(op.source, op.target);
        case OpKind::Delete:
            return present;
        case OpKind::Reverse: {
            if (!present) return false;
            Dag scratch = *this;
            scratch.clear_edge(op.source, op.target);
            return !scratch.creates_cycle(op.target, op.source);
        }
    }
    return false;
}

Dag Dag::apply(const Operation& op) const {
    using Reason = OperationNotApplicable::Reason;
    check_node(op.source);
    check_node(op.target);
    if (op.source == op.target) throw ContractViolation("operation " + describe(op) + " is a self-loop");
    const bool present = has_edge(op.source, op.target);
    Dag next = *this;
    switch (op.kind) {
        case OpKind::Add:
            if (present) throw OperationNotApplicable(op, Reason::EdgeExists);
            if (creates_cycle(op.source, op.target)) throw OperationNotApplicable(op, Reason::Cycle);
            next.set_edge(op.source, op.target);
            break;
        case OpKind::Delete:
            if (!present) throw OperationNotApplicable(op, Reason::EdgeMissing);
            next.clear_edge(op.source, op.target);
            break;
        case OpKind::Reverse:
            if (!present) throw OperationNotApplicable(op, Reason::EdgeMissing);
            next.clear_edge(op.source, op.target);
            if (next.creates_cycle(op.target, op.source)) throw OperationNotApplicable(op, Reason::Cycle);
            next.set_edge(op.target, op.source);
            break;
    }
    return next;
}

CanonicalKey Dag::canonical_key() const {
    CanonicalKey key;
    key.bytes.assign((n_ * n_ + 7) / 8, 0);
    for (NodeId s = 0; s < n_; ++s) {
        const std::uint64_t* row = out_.data() + s * words_;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = row[w];
            while (bits != 0) {
                const std::size_t t = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                const std::size_t bit = s * n_ + t;
                key.bytes[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
                bits &= bits - 1;
            }
        }
    }
    return key;
}

}  // namespace rlbayes
