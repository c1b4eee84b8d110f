#include "doctest.h"

#include <cmath>

#include "rlbayes/sampling.hpp"
#include "rlbayes/scoring.hpp"
#include "support.hpp"

using namespace rlbayes;

namespace {

bool close(double a, double b, double rel = 1e-9) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("closed-form single-variable scores") {
    const Dataset ds({integer_variable("A", 2)}, {{0, 0, 1, 1}});
    const std::vector<std::size_t> none;
    CHECK(local_score(ScoreKind::LL, ds, 0, none) == doctest::Approx(4.0 * std::log(0.5)));
    CHECK(local_score(ScoreKind::LL, ds, 0, none) == doctest::Approx(-2.77259).epsilon(1e-5));
    CHECK(local_score(ScoreKind::BIC, ds, 0, none) == doctest::Approx(-4.15888).epsilon(1e-5));
    CHECK(local_score(ScoreKind::AIC, ds, 0, none) == doctest::Approx(-4.77259).epsilon(1e-5));

    const Dataset constant({integer_variable("A", 3)}, {{0, 0, 0, 0, 0}});
    CHECK(local_score(ScoreKind::LL, constant, 0, none) == 0.0);
    CHECK(local_score(ScoreKind::BIC, constant, 0, none) == doctest::Approx(-std::log(5.0) * 2.0));
}

TEST_CASE("empty graph total is the sum of parentless families") {
    Rng rng(4);
    const Dataset ds = testsupport::random_dataset(5, 300, rng);
    double sum = 0.0;
    for (std::size_t v = 0; v < 5; ++v) sum += local_score(ScoreKind::BIC, ds, v, {});
    CHECK(total_score(ScoreKind::BIC, ds, Dag(5)) == doctest::Approx(sum));
}

TEST_CASE("total score matches the row-wise oracle") {
    Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const Dataset ds = testsupport::random_dataset(5, 150, rng);
        const Dag dag = testsupport::random_dag(5, rng, 12);
        for (ScoreKind kind : {ScoreKind::LL, ScoreKind::AIC, ScoreKind::BIC}) {
            const double oracle = testsupport::oracle_score(kind, ds, dag.edges());
            CHECK(close(total_score(kind, ds, dag), oracle));
            Scorer scorer(ds, kind);
            CHECK(close(scorer.total(dag), oracle));
        }
    }
}

TEST_CASE("an extra edge on independent data lowers BIC") {
    const Dataset ds = [] {
        Rng rng(10);
        std::vector<std::vector<State>> cols(3, std::vector<State>(5000));
        for (auto& c : cols)
            for (auto& x : c) x = static_cast<State>(rng.below(2));
        return Dataset({integer_variable("A", 2), integer_variable("B", 2), integer_variable("C", 2)}, cols);
    }();
    Scorer scorer(ds, ScoreKind::BIC);
    for (const Operation& op : all_operation_ids(3)) {
        if (op.kind == OpKind::Add) CHECK(scorer.delta(Dag(3), op) < 0.0);
    }
}

TEST_CASE("log-likelihood never drops when a parent is added") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Dataset ds = testsupport::random_dataset(5, 100, rng);
        const Dag dag = testsupport::random_dag(5, rng, 8);
        Scorer scorer(ds, ScoreKind::LL);
        for (const Operation& op : all_operation_ids(5))
            if (op.kind == OpKind::Add && dag.is_applicable(op)) CHECK(scorer.delta(dag, op) >= -1e-9);
    }
}

TEST_CASE("delta matches a full re-score") {
    Rng rng(13);
    const Dataset ds = testsupport::random_dataset(6, 400, rng);
    Scorer scorer(ds, ScoreKind::BIC);
    int checked = 0;
    while (checked < 1000) {
        const Dag dag = testsupport::random_dag(6, rng, rng.below(20));
        const Operation op = operation_from_id(static_cast<OperationId>(rng.below(operation_count(6))), 6);
        if (!dag.is_applicable(op)) {
            CHECK_THROWS_AS(scorer.delta(dag, op), OperationNotApplicable);
            continue;
        }
        const double full = total_score(ScoreKind::BIC, ds, dag.apply(op)) - total_score(ScoreKind::BIC, ds, dag);
        CHECK(close(scorer.delta(dag, op), full));
        ++checked;
    }
}

TEST_CASE("delta decomposes over the touched families") {
    Rng rng(14);
    const Dataset ds = testsupport::random_dataset(4, 200, rng);
    Scorer scorer(ds, ScoreKind::BIC);
    const std::vector<Edge> e = {{0, 1}, {2, 1}};
    const Dag dag = Dag::from_edges(4, e);
    auto local = [&](std::size_t child, std::vector<std::size_t> ps) { return local_score(ScoreKind::BIC, ds, child, ps); };
    CHECK(close(scorer.delta(dag, {OpKind::Add, 3, 1}), local(1, {0, 2, 3}) - local(1, {0, 2})));
    CHECK(close(scorer.delta(dag, {OpKind::Reverse, 0, 1}),
                local(1, {2}) - local(1, {0, 2}) + local(0, {1}) - local(0, {})));
}

TEST_CASE("cache statistics and transparency") {
    Rng rng(15);
    const Dataset ds = testsupport::random_dataset(4, 100, rng);
    Scorer scorer(ds, ScoreKind::BIC);
    CHECK(cache_stats(scorer.cache()) == CacheStats{0, 0, 0});
    const LocalScoreCache::Mask none{0, 0};
    const double first = scorer.local(1, none);
    CHECK(cache_stats(scorer.cache()) == CacheStats{0, 1, 1});
    CHECK(scorer.local(1, none) == first);
    CHECK(cache_stats(scorer.cache()) == CacheStats{1, 1, 1});
    (void)scorer.local(1, LocalScoreCache::Mask{1, 0});
    CHECK(cache_stats(scorer.cache()).entries == 2);

    // Cached and uncached values agree bit for bit.
    for (int trial = 0; trial < 30; ++trial) {
        const Dag dag = testsupport::random_dag(4, rng, 8);
        CHECK(scorer.total(dag) == total_score(ScoreKind::BIC, ds, dag));
        scorer.clear_cache();
        CHECK(scorer.total(dag) == total_score(ScoreKind::BIC, ds, dag));
    }
}

TEST_CASE("scorer guards") {
    const Dataset empty({integer_variable("A", 2), integer_variable("B", 2)}, {{}, {}});
    CHECK_THROWS_AS(Scorer(empty, ScoreKind::BIC), ContractViolation);
    CHECK(parse_score_kind("bic") == ScoreKind::BIC);
    CHECK_FALSE(parse_score_kind("k2").has_value());
}
