#ifndef RLBAYES_SEARCH_HPP
#define RLBAYES_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rlbayes/dataset.hpp"
#include "rlbayes/graph.hpp"
#include "rlbayes/rng.hpp"
#include "rlbayes/scoring.hpp"

namespace rlbayes {

inline constexpr double kMasked = -std::numeric_limits<double>::infinity();

// One Q-table row: a visited DAG, its score and the benefits learned for its
// operations. Absent benefits are 0; kMasked marks an operation that failed.
class QRow {
public:
    QRow(Dag dag, double score, std::uint64_t stamp) : dag_(std::move(dag)), score_(score), stamp_(stamp) {}

    const Dag& dag() const { return dag_; }
    double score() const { return score_; }
    std::uint64_t stamp() const { return stamp_; }

    double benefit(OperationId op) const;
    bool is_masked(OperationId op) const { return benefit(op) == kMasked; }

    // Stored entries only (finite non-zero values and masks), ascending id.
    const std::map<OperationId, double>& benefits() const { return benefits_; }
    std::size_t masked_count() const { return masked_; }

    // Zero erases the entry so the row stays in sparse canonical form.
    void set_benefit(OperationId op, double value);

    friend bool operator==(const QRow&, const QRow&) = default;

private:
    Dag dag_;
    double score_ = 0.0;
    std::uint64_t stamp_ = 0;
    std::map<OperationId, double> benefits_;
    std::size_t masked_ = 0;
};

class AllOperationsMasked : public Error {
public:
    AllOperationsMasked() : Error("every operation of the row is masked") {}
};

// Bounded memory of visited DAGs keyed by their adjacency bits, with a cursor
// row (where the search currently is) and the best-scored row.
class QTable {
public:
    QTable(std::size_t n_nodes, std::size_t max_length);

    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t n_operations() const { return operation_count(n_nodes_); }
    std::size_t max_length() const { return max_length_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    const QRow* find(const CanonicalKey& key) const;
    QRow* find(const CanonicalKey& key);
    const QRow& at(const CanonicalKey& key) const;
    QRow& at(const CanonicalKey& key);

    // Adds a row unless the DAG is already present. New rows start all-zero,
    // except re-inserted ones (see evict_worst). Returns the key and whether it was inserted.
    std::pair<CanonicalKey, bool> insert(const Dag& dag, double score);

    // Highest score; ties go to the earliest inserted row.
    const CanonicalKey& best_key() const;
    const QRow& best() const { return at(best_key()); }

    const CanonicalKey& cursor() const;
    void set_cursor(const CanonicalKey& key);

    // While size() >= max_length, drops the lowest-scored row (oldest first on
    // ties), never the best row and, while any other row remains, never the
    // cursor row. Surviving rows keep their benefits; an evicted DAG that is
    // inserted again takes the negated benefits its neighbours still hold.
    // Returns the evicted keys in eviction order.
    std::vector<CanonicalKey> evict_worst();

    // Rows in insertion order.
    std::vector<const QRow*> rows() const;

    std::uint64_t next_stamp() const { return next_stamp_; }

    friend bool operator==(const QTable& a, const QTable& b);

private:
    friend QTable load_snapshot(const std::string& text);
    friend std::string snapshot(const QTable& table);
    void insert_row(const CanonicalKey& key, QRow row);
    void erase(const CanonicalKey& key);
    void inherit_benefits(const CanonicalKey& key, QRow& row) const;

    std::size_t n_nodes_;
    std::size_t max_length_;
    std::unordered_map<CanonicalKey, QRow, CanonicalKeyHash> rows_;
    std::set<std::pair<double, std::uint64_t>> by_score_;  // (score, stamp)
    std::map<std::uint64_t, CanonicalKey> by_stamp_;
    CanonicalKey cursor_;
    std::uint64_t next_stamp_ = 0;
    std::unordered_set<std::uint64_t> evicted_;  // key hashes of evicted rows
};

// With probability epsilon_explore a uniform choice among the operations that
// are not masked. Otherwise greedy: a uniform choice among the largest stored
// benefits, or among the untried (zero-benefit) operations when every stored
// benefit is negative. Never returns a masked operation.
Operation choose_operation(const QRow& row, Rng& rng, double epsilon_explore);

// Records delta = score(next) - score(prev) on prev's op and -delta on next's
// reverse operation. Both rows must be present.
void update_on_success(QTable& table, const CanonicalKey& prev, const Operation& op, const CanonicalKey& next,
                       double delta);

void mask_operation(QTable& table, const CanonicalKey& key, const Operation& op);

inline std::vector<CanonicalKey> evict_worst(QTable& table) { return table.evict_worst(); }

// Versioned JSON; masked benefits are written as "-inf".
std::string snapshot(const QTable& table);
QTable load_snapshot(const std::string& text);

inline constexpr int kSnapshotVersion = 1;

struct SearchConfig {
    std::size_t max_iter = 100000;
    std::size_t max_length = 500;
    double theta = 0.01;
    double epsilon_explore = 0.5;
    ScoreKind score_kind = ScoreKind::BIC;
    std::uint64_t seed = 0;
    // 0 means max(1, max_iter / 1000).
    std::size_t checkpoint_every = 0;

    // Throws ContractViolation on out-of-range fields.
    void validate() const;
    std::size_t checkpoint_interval() const;
};

struct TracePoint {
    std::size_t iteration = 0;
    double best_score = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct SearchCounters {
    std::uint64_t applied = 0;
    std::uint64_t rejected = 0;
    std::uint64_t evictions = 0;
    std::uint64_t transfers = 0;
    std::uint64_t all_masked = 0;

    friend bool operator==(const SearchCounters&, const SearchCounters&) = default;
};

struct SearchResult {
    Dag best_dag;
    double best_score = 0.0;
    std::vector<TracePoint> trace;
    SearchCounters counters;

    friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Optional hooks; both are called synchronously from the search loop.
struct SearchObserver {
    std::function<void(std::size_t iteration, const QTable& table)> on_iteration;
    std::function<void(const TracePoint& point, const Dag& best_dag)> on_checkpoint;
};

// The Q-learning search from the empty DAG. Deterministic in (dataset, cfg).
SearchResult run(const Dataset& ds, const SearchConfig& cfg, const SearchObserver& observer = {});

// Same loop against a caller-owned scorer (shares its cache).
SearchResult run(Scorer& scorer, const SearchConfig& cfg, const SearchObserver& observer = {});

}  // namespace rlbayes

#endif  // RLBAYES_SEARCH_HPP
