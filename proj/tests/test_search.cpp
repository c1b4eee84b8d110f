#include "doctest.h"

#include <cmath>

#include "rlbayes/sampling.hpp"
#include "rlbayes/search.hpp"
#include "support.hpp"

using namespace rlbayes;

namespace {

OperationId id_of(const Operation& op, std::size_t n) { return operation_id(op, n); }

// Dataset from the chain A->B->C->D with strong binary links.
Dataset chain_data(std::size_t rows, std::uint64_t seed) {
    Schema s;
    std::vector<Cpt> cpts;
    std::vector<Edge> edges;
    for (std::size_t v = 0; v < 4; ++v) {
        s.push_back(integer_variable(std::string(1, static_cast<char>('A' + v)), 2));
        if (v == 0) {
            cpts.push_back(Cpt{0, {}, {{0.6, 0.4}}});
        } else {
            cpts.push_back(Cpt{v, {v - 1}, {{0.8, 0.2}, {0.25, 0.75}}});
            edges.emplace_back(v - 1, v);
        }
    }
    const DiscreteNetwork net("chain", s, Dag::from_edges(4, edges), cpts);
    Rng rng(seed);
    return forward_sample(net, rows, rng);
}

}  // namespace

TEST_CASE("fresh rows choose uniformly in both branches") {
    const std::size_t n = 3;
    const QRow row(Dag(n), 0.0, 0);
    for (double eps : {0.0, 1.0}) {
        Rng rng(1);
        std::vector<double> freq(operation_count(n), 0.0);
        const int draws = 90000;
        for (int i = 0; i < draws; ++i) freq[id_of(choose_operation(row, rng, eps), n)] += 1.0 / draws;
        for (double f : freq) CHECK(std::abs(f - 1.0 / 18.0) < 0.006);
    }
}

TEST_CASE("greedy branch follows the single positive benefit") {
    QRow row(Dag(4), -600.0, 0);
    const Operation best{OpKind::Add, 1, 2};
    row.set_benefit(id_of(best, 4), 3.5128);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) CHECK(choose_operation(row, rng, 0.0) == best);
}

TEST_CASE("negative stored benefits send greedy to unexplored operations") {
    QRow row(Dag(3), 0.0, 0);
    const Operation bad{OpKind::Add, 0, 1};
    row.set_benefit(id_of(bad, 3), -2.0);
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) CHECK_FALSE(choose_operation(row, rng, 0.0) == bad);
}

TEST_CASE("masked operations are never chosen") {
    QRow row(Dag(5), 0.0, 0);
    const Operation x{OpKind::Delete, 1, 2};
    row.set_benefit(id_of(x, 5), kMasked);
    for (double eps : {0.0, 0.5, 1.0}) {
        Rng rng(4);
        for (int i = 0; i < 10000; ++i) CHECK_FALSE(choose_operation(row, rng, eps) == x);
    }
}

TEST_CASE("masking all but one operation forces the choice") {
    const std::size_t n = 4;
    QRow row(Dag(n), 0.0, 0);
    const Operation keep{OpKind::Reverse, 3, 0};
    for (const Operation& op : all_operation_ids(n))
        if (!(op == keep)) row.set_benefit(id_of(op, n), kMasked);
    CHECK(row.masked_count() == operation_count(n) - 1);
    Rng rng(5);
    for (double eps : {0.0, 0.5, 1.0})
        for (int i = 0; i < 200; ++i) CHECK(choose_operation(row, rng, eps) == keep);
    row.set_benefit(id_of(keep, n), kMasked);
    CHECK_THROWS_AS(choose_operation(row, rng, 0.5), AllOperationsMasked);
}

TEST_CASE("update_on_success writes antisymmetric benefits") {
    QTable table(4, 10);
    const Dag empty(4);
    const Operation add12{OpKind::Add, 1, 2};
    const Dag next = empty.apply(add12);
    const auto [p, p_new] = table.insert(empty, -587.1813);
    const auto [q, q_new] = table.insert(next, -583.6685);
    CHECK(p_new);
    CHECK(q_new);
    update_on_success(table, p, add12, q, 3.5128);
    CHECK(table.at(p).benefit(id_of(add12, 4)) == 3.5128);
    CHECK(table.at(q).benefit(id_of({OpKind::Delete, 1, 2}, 4)) == -3.5128);
    // A revisit overwrites both sides.
    update_on_success(table, p, add12, q, 1.25);
    CHECK(table.at(p).benefit(id_of(add12, 4)) == 1.25);
    CHECK(table.at(q).benefit(id_of({OpKind::Delete, 1, 2}, 4)) == -1.25);
    CHECK_THROWS_AS(update_on_success(table, p, add12, Dag(4).apply({OpKind::Add, 0, 3}).canonical_key(), 1.0),
                    InvariantViolation);
}

TEST_CASE("mask_operation records the sentinel") {
    QTable table(3, 5);
    const auto [key, inserted] = table.insert(Dag(3), 0.0);
    const Operation del12{OpKind::Delete, 1, 2};
    CHECK_FALSE(Dag(3).is_applicable(del12));
    mask_operation(table, key, del12);
    CHECK(table.at(key).is_masked(id_of(del12, 3)));
    CHECK(table.at(key).masked_count() == 1);
}

TEST_CASE("eviction drops the worst row") {
    QTable table(3, 3);
    const Dag a(3);
    const Dag b = a.apply({OpKind::Add, 0, 1});
    const Dag c = a.apply({OpKind::Add, 1, 2});
    table.insert(a, -10.0);
    table.insert(b, -20.0);
    table.insert(c, -30.0);
    const auto evicted = evict_worst(table);
    REQUIRE(evicted.size() == 1);
    CHECK(evicted[0] == c.canonical_key());
    CHECK(table.size() == 2);
}

TEST_CASE("eviction spares the cursor row") {
    QTable table(3, 3);
    const Dag a(3);
    const Dag b = a.apply({OpKind::Add, 0, 1});
    const Dag c = a.apply({OpKind::Add, 1, 2});
    table.insert(a, -10.0);
    table.insert(b, -20.0);
    const auto [ck, ins] = table.insert(c, -30.0);
    table.set_cursor(ck);
    const auto evicted = evict_worst(table);
    REQUIRE(evicted.size() == 1);
    CHECK(evicted[0] == b.canonical_key());
    CHECK(table.find(table.cursor()) != nullptr);
}

TEST_CASE("max_length 2 keeps the best row") {
    QTable table(4, 2);
    Rng rng(6);
    double best = -1e300;
    for (int i = 0; i < 200; ++i) {
        const Dag d = testsupport::random_dag(4, rng, 6);
        const double score = -static_cast<double>(rng.below(1000));
        if (table.insert(d, score).second) best = std::max(best, score);
        evict_worst(table);
        CHECK(table.size() <= 2);
        CHECK(table.best().score() == best);
        CHECK(table.find(table.cursor()) != nullptr);
    }
}

TEST_CASE("re-inserted row inherits antisymmetric benefits") {
    QTable table(3, 3);
    const Dag a(3);
    const Operation op{OpKind::Add, 0, 1};
    const Dag b = a.apply(op);
    const auto [ka, ia] = table.insert(a, -10.0);
    const auto [kb, ib] = table.insert(b, -30.0);
    update_on_success(table, ka, op, kb, -20.0);
    table.insert(a.apply({OpKind::Add, 1, 2}), -15.0);
    const auto evicted = evict_worst(table);
    REQUIRE(evicted.size() == 1);
    CHECK(evicted[0] == kb);
    // The survivor keeps its memory of the move.
    CHECK(table.at(ka).benefit(id_of(op, 3)) == -20.0);

    const auto [kb2, fresh] = table.insert(b, -30.0);
    CHECK(fresh);
    CHECK(table.at(kb2).benefit(id_of(reverse_of(op), 3)) == 20.0);
    CHECK(table.at(kb2).benefits().size() == 1);
    CHECK(load_snapshot(snapshot(table)) == table);

    // A DAG never seen before starts all-zero.
    const auto [kc, ic] = table.insert(b.apply({OpKind::Add, 1, 2}), -40.0);
    CHECK(table.at(kc).benefits().empty());
}

TEST_CASE("snapshots round trip") {
    QTable empty(5, 7);
    CHECK(load_snapshot(snapshot(empty)) == empty);

    const Dataset ds = chain_data(500, 1);
    SearchConfig cfg;
    cfg.max_iter = 800;
    cfg.max_length = 40;
    cfg.seed = 3;
    bool checked = false;
    SearchObserver observer;
    observer.on_iteration = [&](std::size_t it, const QTable& table) {
        if (it != 600) return;
        std::size_t masked = 0;
        for (const QRow* row : table.rows()) masked += row->masked_count();
        CHECK(masked > 0);
        const QTable back = load_snapshot(snapshot(table));
        CHECK(back == table);
        CHECK(back.best_key() == table.best_key());
        CHECK(back.cursor() == table.cursor());
        CHECK(snapshot(back) == snapshot(table));
        checked = true;
    };
    run(ds, cfg, observer);
    CHECK(checked);

    std::string text = snapshot(empty);
    text.replace(text.find("\"version\":1"), 11, "\"version\":9");
    CHECK_THROWS_AS(load_snapshot(text), DataError);
    CHECK_THROWS_AS(load_snapshot("{"), DataError);
}

TEST_CASE("a single iteration moves at most one edge") {
    const Dataset ds = chain_data(300, 2);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SearchConfig cfg;
        cfg.max_iter = 1;
        cfg.seed = seed;
        SearchObserver observer;
        observer.on_iteration = [](std::size_t, const QTable& table) { CHECK(table.size() <= 2); };
        const SearchResult r = run(ds, cfg, observer);
        CHECK(r.best_dag.edge_count() <= 1);
        CHECK(r.trace.size() == 2);
    }
}

TEST_CASE("runs are deterministic and traces monotone") {
    const Dataset ds = chain_data(1000, 3);
    SearchConfig cfg;
    cfg.max_iter = 5000;
    cfg.max_length = 50;
    cfg.seed = 42;
    const SearchResult a = run(ds, cfg);
    const SearchResult b = run(ds, cfg);
    CHECK(a == b);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].best_score >= a.trace[i - 1].best_score);
    CHECK(a.trace.back().iteration == 5000);
    CHECK(a.best_score == a.trace.back().best_score);
}

TEST_CASE("chain data: the search reaches the enumerated optimum") {
    const Dataset ds = chain_data(5000, 4);
    Scorer scorer(ds, ScoreKind::BIC);
    double optimum = -1e300;
    for (const auto& edges : testsupport::enumerate_dags(4)) optimum = std::max(optimum, scorer.total(Dag::from_edges(4, edges)));
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SearchConfig cfg;
        cfg.max_iter = 50000;
        cfg.max_length = 200;
        cfg.seed = seed;
        const SearchResult r = run(scorer, cfg);
        hits += std::abs(r.best_score - optimum) <= 1e-9 * std::abs(optimum);
    }
    CHECK(hits >= 9);
}

TEST_CASE("config validation") {
    SearchConfig cfg;
    cfg.max_length = 1;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = {};
    cfg.theta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg = {};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("stored benefits equal the score change of their move") {
    Rng data_rng(21);
    const Dataset ds = testsupport::random_dataset(5, 300, data_rng);
    SearchConfig cfg;
    cfg.max_iter = 3000;
    cfg.max_length = 12;  // small, so rows are evicted and come back
    cfg.seed = 4;
    std::size_t checked = 0;
    SearchObserver observer;
    observer.on_iteration = [&](std::size_t it, const QTable& table) {
        if (it % 300 != 0) return;
        for (const QRow* row : table.rows()) {
            const double here = testsupport::oracle_score(ScoreKind::BIC, ds, row->dag().edges());
            CHECK(row->score() == doctest::Approx(here).epsilon(1e-9));
            for (const auto& [id, value] : row->benefits()) {
                if (value == kMasked) continue;
                const Operation op = operation_from_id(id, 5);
                REQUIRE(row->dag().is_applicable(op));
                const double there = testsupport::oracle_score(ScoreKind::BIC, ds, row->dag().apply(op).edges());
                CHECK(value == doctest::Approx(there - here).epsilon(1e-9).scale(1.0));
                ++checked;
            }
        }
    };
    run(ds, cfg, observer);
    CHECK(checked >= 100);
}
