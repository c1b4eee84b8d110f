#include "rlbayes/search.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "json.hpp"

namespace rlbayes {

double QRow::benefit(OperationId op) const {
    const auto it = benefits_.find(op);
    return it == benefits_.end() ? 0.0 : it->second;
}

void QRow::set_benefit(OperationId op, double value) {
    if (std::isnan(value)) throw InvariantViolation("benefit is NaN");
    const auto it = benefits_.find(op);
    if (it != benefits_.end() && it->second == kMasked) --masked_;
    if (value == 0.0) {
        if (it != benefits_.end()) benefits_.erase(it);
        return;
    }
    if (value == kMasked) ++masked_;
    benefits_.insert_or_assign(op, value);
}

QTable::QTable(std::size_t n_nodes, std::size_t max_length) : n_nodes_(n_nodes), max_length_(max_length) {
    if (n_nodes < 2) throw ContractViolation("a Q-table needs at least 2 nodes");
    if (max_length < 2) throw ContractViolation("max_length must be at least 2");
}

const QRow* QTable::find(const CanonicalKey& key) const {
    const auto it = rows_.find(key);
    return it == rows_.end() ? nullptr : &it->second;
}

QRow* QTable::find(const CanonicalKey& key) {
    const auto it = rows_.find(key);
    return it == rows_.end() ? nullptr : &it->second;
}

const QRow& QTable::at(const CanonicalKey& key) const {
    const QRow* row = find(key);
    if (row == nullptr) throw InvariantViolation("Q-table row is missing");
    return *row;
}

QRow& QTable::at(const CanonicalKey& key) {
    QRow* row = find(key);
    if (row == nullptr) throw InvariantViolation("Q-table row is missing");
    return *row;
}

void QTable::insert_row(const CanonicalKey& key, QRow row) {
    by_score_.emplace(row.score(), row.stamp());
    by_stamp_.emplace(row.stamp(), key);
    rows_.emplace(key, std::move(row));
}

std::pair<CanonicalKey, bool> QTable::insert(const Dag& dag, double score) {
    if (dag.n_nodes() != n_nodes_) throw ContractViolation("dag size does not match the Q-table");
    if (!std::isfinite(score)) throw InvariantViolation("row score must be finite");
    CanonicalKey key = dag.canonical_key();
    if (rows_.contains(key)) return {std::move(key), false};
    QRow row(dag, score, next_stamp_++);
    if (evicted_.contains(CanonicalKeyHash{}(key))) inherit_benefits(key, row);
    insert_row(key, std::move(row));
    if (rows_.size() == 1) cursor_ = key;
    return {std::move(key), true};
}

void QTable::inherit_benefits(const CanonicalKey& key, QRow& row) const {
    // A surviving neighbour may still hold a benefit toward this DAG from before
    // it was evicted; take the negation so the pair stays antisymmetric.
    CanonicalKey probe = key;
    auto bit = [&](NodeId s, NodeId t) { return s * n_nodes_ + t; };
    auto get = [&](std::size_t i) { return (probe.bytes[i / 8] >> (i % 8)) & 1U; };
    auto flip = [&](std::size_t i) { probe.bytes[i / 8] ^= static_cast<std::uint8_t>(1U << (i % 8)); };
    for (OperationId id = 0; id < n_operations(); ++id) {
        const Operation op = operation_from_id(id, n_nodes_);
        const std::size_t st = bit(op.source, op.target);
        const std::size_t ts = bit(op.target, op.source);
        const bool has = get(st) != 0;
        if ((op.kind == OpKind::Add) == has) continue;
        flip(st);
        if (op.kind == OpKind::Reverse) flip(ts);
        const QRow* partner = find(probe);
        flip(st);
        if (op.kind == OpKind::Reverse) flip(ts);
        if (partner == nullptr) continue;
        const double back = partner->benefit(operation_id(reverse_of(op), n_nodes_));
        if (back != kMasked && back != 0.0) row.set_benefit(id, -back);
    }
}

void QTable::erase(const CanonicalKey& key) {
    const auto it = rows_.find(key);
    if (it == rows_.end()) throw InvariantViolation("erasing a missing Q-table row");
    by_score_.erase({it->second.score(), it->second.stamp()});
    by_stamp_.erase(it->second.stamp());
    rows_.erase(it);
}

const CanonicalKey& QTable::best_key() const {
    if (by_score_.empty()) throw InvariantViolation("best row of an empty Q-table");
    const double top = std::prev(by_score_.end())->first;
    const auto best = by_score_.lower_bound({top, 0});
    return by_stamp_.at(best->second);
}

const CanonicalKey& QTable::cursor() const {
    if (rows_.empty()) throw InvariantViolation("cursor of an empty Q-table");
    return cursor_;
}

void QTable::set_cursor(const CanonicalKey& key) {
    if (!rows_.contains(key)) throw InvariantViolation("cursor must point at a present row");
    cursor_ = key;
}

std::vector<CanonicalKey> QTable::evict_worst() {
    std::vector<CanonicalKey> evicted;
    while (rows_.size() >= max_length_) {
        const std::uint64_t best_stamp = at(best_key()).stamp();
        const std::uint64_t cursor_stamp = at(cursor_).stamp();
        std::optional<std::uint64_t> victim;
        for (const auto& [score, stamp] : by_score_) {
            if (stamp != best_stamp && stamp != cursor_stamp) {
                victim = stamp;
                break;
            }
        }
        if (!victim) {
            // Only the best and cursor rows are left: give up the cursor.
            victim = cursor_stamp;
            cursor_ = best_key();
        }
        CanonicalKey key = by_stamp_.at(*victim);
        evicted_.insert(CanonicalKeyHash{}(key));
        erase(key);
        evicted.push_back(std::move(key));
    }
    return evicted;
}

std::vector<const QRow*> QTable::rows() const {
    std::vector<const QRow*> out;
    out.reserve(rows_.size());
    for (const auto& [stamp, key] : by_stamp_) out.push_back(&rows_.at(key));
    return out;
}

bool operator==(const QTable& a, const QTable& b) {
    return a.n_nodes_ == b.n_nodes_ && a.max_length_ == b.max_length_ && a.next_stamp_ == b.next_stamp_ &&
           a.rows_ == b.rows_ && a.evicted_ == b.evicted_ && (a.rows_.empty() || a.cursor_ == b.cursor_);
}

namespace {

// Uniform id in [0, n_ops) subject to keep(id); 'excluded' ids fail keep().
template <typename Keep>
OperationId uniform_where(std::size_t n_ops, std::size_t excluded, Rng& rng, Keep keep) {
    if (excluded * 2 <= n_ops) {
        for (;;) {
            const auto id = static_cast<OperationId>(rng.below(n_ops));
            if (keep(id)) return id;
        }
    }
    std::vector<OperationId> pool;
    pool.reserve(n_ops - excluded);
    for (OperationId id = 0; id < n_ops; ++id) {
        if (keep(id)) pool.push_back(id);
    }
    return pool[rng.below(pool.size())];
}

}  // namespace

Operation choose_operation(const QRow& row, Rng& rng, double epsilon_explore) {
    const std::size_t n = row.dag().n_nodes();
    const std::size_t n_ops = operation_count(n);
    if (row.masked_count() >= n_ops) throw AllOperationsMasked();
    const auto& stored = row.benefits();

    if (rng.uniform() < epsilon_explore) {
        const OperationId id = uniform_where(n_ops, row.masked_count(), rng,
                                             [&](OperationId op) { return !row.is_masked(op); });
        return operation_from_id(id, n);
    }

    double best = kMasked;
    std::vector<OperationId> candidates;
    for (const auto& [id, value] : stored) {
        if (value == kMasked) continue;
        if (value > best) {
            best = value;
            candidates.assign(1, id);
        } else if (value == best) {
            candidates.push_back(id);
        }
    }
    const std::size_t unexplored = n_ops - stored.size();
    if (unexplored > 0 && (candidates.empty() || best < 0.0)) {
        const OperationId id = uniform_where(n_ops, stored.size(), rng,
                                             [&](OperationId op) { return !stored.contains(op); });
        return operation_from_id(id, n);
    }
    return operation_from_id(candidates[rng.below(candidates.size())], n);
}

void update_on_success(QTable& table, const CanonicalKey& prev, const Operation& op, const CanonicalKey& next,
                       double delta) {
    const std::size_t n = table.n_nodes();
    QRow& p = table.at(prev);
    QRow& q = table.at(next);
    p.set_benefit(operation_id(op, n), delta);
    q.set_benefit(operation_id(reverse_of(op), n), -delta);
}

void mask_operation(QTable& table, const CanonicalKey& key, const Operation& op) {
    table.at(key).set_benefit(operation_id(op, table.n_nodes()), kMasked);
}

void SearchConfig::validate() const {
    if (max_iter < 1) throw ContractViolation("max_iter must be at least 1");
    if (max_length < 2) throw ContractViolation("max_length must be at least 2");
    if (!(theta >= 0.0 && theta <= 1.0)) throw ContractViolation("theta must lie in [0, 1]");
    if (!(epsilon_explore >= 0.0 && epsilon_explore <= 1.0)) {
        throw ContractViolation("epsilon_explore must lie in [0, 1]");
    }
}

std::size_t SearchConfig::checkpoint_interval() const {
    if (checkpoint_every > 0) return checkpoint_every;
    return std::max<std::size_t>(1, max_iter / 1000);
}

SearchResult run(Scorer& scorer, const SearchConfig& cfg, const SearchObserver& observer) {
    cfg.validate();
    if (scorer.kind() != cfg.score_kind) throw ContractViolation("scorer kind differs from the search config");
    const std::size_t n = scorer.dataset().n_vars();
    if (n < 2) throw ContractViolation("structure search needs at least 2 variables");

    Rng rng(cfg.seed);
    QTable table(n, cfg.max_length);
    const Dag empty(n);
    table.insert(empty, scorer.total(empty));

    SearchResult result;
    const std::size_t every = cfg.checkpoint_interval();
    auto checkpoint = [&](std::size_t iteration) {
        const QRow& best = table.best();
        TracePoint point{iteration, best.score()};
        result.trace.push_back(point);
        if (observer.on_checkpoint) observer.on_checkpoint(point, best.dag());
    };
    checkpoint(0);

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        const CanonicalKey cursor = table.cursor();
        const QRow& current = table.at(cursor);
        std::optional<Operation> op;
        try {
            op = choose_operation(current, rng, cfg.epsilon_explore);
        } catch (const AllOperationsMasked&) {
            ++result.counters.all_masked;
            table.set_cursor(table.best_key());
        }
        if (op) {
            if (current.dag().is_applicable(*op)) {
                Dag next = current.dag().apply(*op);
                const double delta = scorer.delta(current.dag(), *op);
                CanonicalKey next_key = next.canonical_key();
                if (table.find(next_key) == nullptr) {
                    const double score = scorer.total(next);
                    table.insert(next, score);
                }
                update_on_success(table, cursor, *op, next_key, delta);
                table.set_cursor(next_key);
                ++result.counters.applied;
            } else {
                mask_operation(table, cursor, *op);
                ++result.counters.rejected;
            }
        }
        result.counters.evictions += table.evict_worst().size();
        if (rng.uniform() < cfg.theta) {
            table.set_cursor(table.best_key());
            ++result.counters.transfers;
        }
        if (observer.on_iteration) observer.on_iteration(it, table);
        if (it % every == 0 || it == cfg.max_iter) checkpoint(it);
    }

    const QRow& best = table.best();
    result.best_dag = best.dag();
    result.best_score = best.score();
    return result;
}

SearchResult run(const Dataset& ds, const SearchConfig& cfg, const SearchObserver& observer) {
    cfg.validate();
    Scorer scorer(ds, cfg.score_kind);
    return run(scorer, cfg, observer);
}

std::string snapshot(const QTable& table) {
    using nlohmann::json;
    json rows = json::array();
    for (const QRow* row : table.rows()) {
        json edges = json::array();
        for (const auto& [s, t] : row->dag().edges()) edges.push_back({s, t});
        json benefits = json::array();
        for (const auto& [id, value] : row->benefits()) {
            if (value == kMasked) {
                benefits.push_back({id, "-inf"});
            } else {
                benefits.push_back({id, value});
            }
        }
        rows.push_back({{"stamp", row->stamp()}, {"score", row->score()}, {"edges", edges}, {"benefits", benefits}});
    }
    json doc = {{"format", "rlbayes-qtable"},
                {"version", kSnapshotVersion},
                {"n_nodes", table.n_nodes()},
                {"max_length", table.max_length()},
                {"next_stamp", table.next_stamp()},
                {"rows", rows}};
    std::vector<std::uint64_t> evicted(table.evicted_.begin(), table.evicted_.end());
    std::sort(evicted.begin(), evicted.end());
    doc["evicted"] = evicted;
    if (!table.empty()) {
        doc["cursor"] = table.at(table.cursor()).stamp();
        doc["best"] = table.best().stamp();
    }
    return doc.dump();
}

QTable load_snapshot(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("snapshot is not valid JSON: ") + e.what());
    }
    try {
        if (doc.value("format", "") != "rlbayes-qtable") throw DataError("not a Q-table snapshot");
        const int version = doc.at("version").get<int>();
        if (version != kSnapshotVersion) {
            throw DataError("snapshot version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kSnapshotVersion) + ")");
        }
        const auto n = doc.at("n_nodes").get<std::size_t>();
        QTable table(n, doc.at("max_length").get<std::size_t>());
        table.next_stamp_ = doc.at("next_stamp").get<std::uint64_t>();
        std::map<std::uint64_t, CanonicalKey> keys;
        for (const auto& r : doc.at("rows")) {
            std::vector<Edge> edges;
            for (const auto& e : r.at("edges")) edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
            Dag dag = Dag::from_edges(n, edges);
            const auto stamp = r.at("stamp").get<std::uint64_t>();
            if (stamp >= table.next_stamp_) throw DataError("snapshot stamp beyond next_stamp");
            QRow row(dag, r.at("score").get<double>(), stamp);
            for (const auto& b : r.at("benefits")) {
                const auto id = b.at(0).get<OperationId>();
                if (id >= operation_count(n)) throw DataError("snapshot operation id out of range");
                if (b.at(1).is_string()) {
                    if (b.at(1).get<std::string>() != "-inf") throw DataError("unknown benefit sentinel");
                    row.set_benefit(id, kMasked);
                } else {
                    row.set_benefit(id, b.at(1).get<double>());
                }
            }
            CanonicalKey key = dag.canonical_key();
            if (table.find(key) != nullptr) throw DataError("snapshot repeats a DAG");
            keys.emplace(stamp, key);
            table.insert_row(key, std::move(row));
        }
        if (doc.contains("evicted")) {
            for (const auto& h : doc.at("evicted")) table.evicted_.insert(h.get<std::uint64_t>());
        }
        if (!table.empty()) {
            const auto cursor = doc.at("cursor").get<std::uint64_t>();
            if (!keys.contains(cursor)) throw DataError("snapshot cursor refers to a missing row");
            table.cursor_ = keys.at(cursor);
            if (table.best().stamp() != doc.at("best").get<std::uint64_t>()) {
                throw DataError("snapshot best row is inconsistent with its scores");
            }
        }
        return table;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed snapshot: ") + e.what());
    } catch (const ContractViolation& e) {
        throw DataError(std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace rlbayes
