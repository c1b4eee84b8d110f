#include "rlbayes/baselines.hpp"

#include <cmath>
#include <optional>

namespace rlbayes {

void HcConfig::validate() const {
    if (max_restarts < 1) throw ContractViolation("max_restarts must be at least 1");
}

void SaConfig::validate() const {
    if (!(initial_temperature > 0.0)) throw ContractViolation("initial_temperature must be positive");
    if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) throw ContractViolation("cooling_factor must lie in (0, 1)");
    if (steps < 1) throw ContractViolation("steps must be at least 1");
}

namespace {

// Uniform over applicable operations of dag. One always exists for n >= 2.
Operation random_applicable(const Dag& dag, Rng& rng) {
    const std::size_t n = dag.n_nodes();
    const std::size_t n_ops = operation_count(n);
    for (std::size_t attempt = 0; attempt < 4 * n_ops; ++attempt) {
        const Operation op = operation_from_id(static_cast<OperationId>(rng.below(n_ops)), n);
        if (dag.is_applicable(op)) return op;
    }
    std::vector<Operation> pool;
    for (OperationId id = 0; id < n_ops; ++id) {
        const Operation op = operation_from_id(id, n);
        if (dag.is_applicable(op)) pool.push_back(op);
    }
    if (pool.empty()) throw InvariantViolation("dag has no applicable operation");
    return pool[rng.below(pool.size())];
}

}  // namespace

SearchResult hill_climb(const Dataset& ds, ScoreKind kind, const HcConfig& cfg) {
    cfg.validate();
    const std::size_t n = ds.n_vars();
    if (n < 2) throw ContractViolation("structure search needs at least 2 variables");
    Scorer scorer(ds, kind);
    Rng rng(cfg.seed);
    const std::size_t n_ops = operation_count(n);

    SearchResult result;
    result.best_dag = Dag(n);
    result.best_score = scorer.total(result.best_dag);
    result.trace.push_back({0, result.best_score});
    std::size_t moves = 0;

    for (std::size_t restart = 0; restart < cfg.max_restarts; ++restart) {
        Dag dag = result.best_dag;
        if (restart > 0) {
            const std::size_t kicks = cfg.perturbation > 0 ? cfg.perturbation : n;
            for (std::size_t k = 0; k < kicks; ++k) dag = dag.apply(random_applicable(dag, rng));
        }
        for (;;) {
            std::optional<Operation> best_op;
            double best_delta = kMinImprovement;
            for (OperationId id = 0; id < n_ops; ++id) {
                const Operation op = operation_from_id(id, n);
                if (!dag.is_applicable(op)) continue;
                const double d = scorer.delta(dag, op);
                if (d > best_delta) {
                    best_delta = d;
                    best_op = op;
                }
            }
            if (!best_op) {
                ++result.counters.rejected;
                break;
            }
            dag = dag.apply(*best_op);
            ++moves;
            ++result.counters.applied;
            const double exact = scorer.total(dag);
            if (exact > result.best_score) {
                result.best_score = exact;
                result.best_dag = dag;
            }
            result.trace.push_back({moves, result.best_score});
        }
        if (restart + 1 < cfg.max_restarts) ++result.counters.transfers;
    }
    return result;
}

SearchResult simulated_anneal(const Dataset& ds, ScoreKind kind, const SaConfig& cfg) {
    cfg.validate();
    const std::size_t n = ds.n_vars();
    if (n < 2) throw ContractViolation("structure search needs at least 2 variables");
    Scorer scorer(ds, kind);
    Rng rng(cfg.seed);

    Dag dag(n);
    double score = scorer.total(dag);
    SearchResult result;
    result.best_dag = dag;
    result.best_score = score;
    result.trace.push_back({0, score});
    const std::size_t every = std::max<std::size_t>(1, cfg.steps / 1000);
    double temperature = cfg.initial_temperature;

    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        const Operation op = random_applicable(dag, rng);
        const double d = scorer.delta(dag, op);
        const double u = rng.uniform();
        if (d >= 0.0 || u < std::exp(d / temperature)) {
            dag = dag.apply(op);
            score = scorer.total(dag);
            ++result.counters.applied;
            if (score > result.best_score) {
                result.best_score = score;
                result.best_dag = dag;
            }
        } else {
            ++result.counters.rejected;
        }
        temperature *= cfg.cooling_factor;
        if (step % every == 0 || step == cfg.steps) result.trace.push_back({step, result.best_score});
    }
    return result;
}

}  // namespace rlbayes
