#ifndef RLBAYES_TESTS_SUPPORT_HPP
#define RLBAYES_TESTS_SUPPORT_HPP

// Oracles and fixtures shared by the unit and acceptance tests. Everything
// here is written against plain edge lists and row scans so it does not lean
// on the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "rlbayes/dataset.hpp"
#include "rlbayes/graph.hpp"
#include "rlbayes/netio.hpp"
#include "rlbayes/rng.hpp"
#include "rlbayes/scoring.hpp"

namespace testsupport {

using rlbayes::Dataset;
using rlbayes::Edge;
using rlbayes::NodeId;

inline std::string network_path(const std::string& name) {
    return std::string(RLBAYES_DATA_DIR) + "/networks/" + name + ".bif";
}

// Breadth-first reachability over a raw edge list.
inline bool path_exists(std::size_t n, const std::vector<Edge>& edges, NodeId from, NodeId to) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> frontier{from};
    seen[from] = true;
    while (!frontier.empty()) {
        const NodeId u = frontier.back();
        frontier.pop_back();
        if (u == to) return true;
        for (const auto& [s, t] : edges) {
            if (s == u && !seen[t]) {
                seen[t] = true;
                frontier.push_back(t);
            }
        }
    }
    return false;
}

// Peels parentless nodes until none are left or a cycle blocks progress.
inline bool acyclic(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<bool> removed(n, false);
    for (std::size_t left = n; left > 0;) {
        bool progressed = false;
        for (NodeId v = 0; v < n; ++v) {
            if (removed[v]) continue;
            bool has_parent = false;
            for (const auto& [s, t] : edges) has_parent |= (t == v && !removed[s]);
            if (!has_parent) {
                removed[v] = true;
                progressed = true;
                --left;
            }
        }
        if (!progressed) return false;
    }
    return true;
}

// Every labelled DAG on n nodes as an edge list (543 for n = 4).
inline std::vector<std::vector<Edge>> enumerate_dags(std::size_t n) {
    std::vector<Edge> pairs;
    for (NodeId s = 0; s < n; ++s)
        for (NodeId t = 0; t < n; ++t)
            if (s != t) pairs.emplace_back(s, t);
    std::vector<std::vector<Edge>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (mask >> i & 1) edges.push_back(pairs[i]);
        if (acyclic(n, edges)) out.push_back(std::move(edges));
    }
    return out;
}

inline std::vector<std::size_t> parents_in(const std::vector<Edge>& edges, NodeId child) {
    std::vector<std::size_t> ps;
    for (const auto& [s, t] : edges)
        if (t == child) ps.push_back(s);
    std::sort(ps.begin(), ps.end());
    return ps;
}

// Row-wise log-likelihood: sum over rows of ln(N_ijk / N_ij) with counts
// keyed by the literal tuple of parent values.
inline double row_log_likelihood(const Dataset& ds, std::size_t child, const std::vector<std::size_t>& parents) {
    std::map<std::vector<int>, std::map<int, double>> joint;
    std::map<std::vector<int>, double> margin;
    auto config_of = [&](std::size_t row) {
        std::vector<int> c;
        for (std::size_t p : parents) c.push_back(ds.at(row, p));
        return c;
    };
    for (std::size_t row = 0; row < ds.n_rows(); ++row) {
        const auto c = config_of(row);
        joint[c][ds.at(row, child)] += 1.0;
        margin[c] += 1.0;
    }
    double ll = 0.0;
    for (std::size_t row = 0; row < ds.n_rows(); ++row) {
        const auto c = config_of(row);
        ll += std::log(joint[c][ds.at(row, child)] / margin[c]);
    }
    return ll;
}

inline double oracle_score(rlbayes::ScoreKind kind, const Dataset& ds, const std::vector<Edge>& edges) {
    double total = 0.0;
    for (NodeId v = 0; v < ds.n_vars(); ++v) {
        const auto ps = parents_in(edges, v);
        double k = static_cast<double>(ds.cardinality(v) - 1);
        for (std::size_t p : ps) k *= static_cast<double>(ds.cardinality(p));
        const double ll = row_log_likelihood(ds, v, ps);
        switch (kind) {
            case rlbayes::ScoreKind::LL: total += ll; break;
            case rlbayes::ScoreKind::AIC: total += ll - 2.0 * k; break;
            case rlbayes::ScoreKind::BIC: total += ll - std::log(static_cast<double>(ds.n_rows())) * k; break;
        }
    }
    return total;
}

// Random network: random node order, each forward pair linked with
// probability edge_prob, cardinalities in [2, max_card], Dirichlet(1) rows.
inline rlbayes::DiscreteNetwork random_network(std::size_t n, rlbayes::Rng& rng, double edge_prob = 0.5,
                                               std::size_t max_card = 3, std::size_t max_parents = 3) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<Edge> edges;
    for (std::size_t j = 1; j < n; ++j) {
        std::size_t added = 0;
        for (std::size_t i = 0; i < j && added < max_parents; ++i) {
            if (rng.uniform() < edge_prob) {
                edges.emplace_back(order[i], order[j]);
                ++added;
            }
        }
    }
    rlbayes::Schema schema;
    for (std::size_t v = 0; v < n; ++v)
        schema.push_back(rlbayes::integer_variable("X" + std::to_string(v), 2 + rng.below(max_card - 1)));
    const rlbayes::Dag dag = rlbayes::Dag::from_edges(n, edges);
    std::vector<rlbayes::Cpt> cpts;
    for (std::size_t v = 0; v < n; ++v) {
        rlbayes::Cpt cpt;
        cpt.child = v;
        cpt.parents = parents_in(edges, v);
        std::size_t q = 1;
        for (std::size_t p : cpt.parents) q *= schema[p].cardinality();
        for (std::size_t j = 0; j < q; ++j) {
            std::vector<double> row(schema[v].cardinality());
            double sum = 0.0;
            for (double& x : row) sum += (x = -std::log(1.0 - rng.uniform()));
            for (double& x : row) x /= sum;
            cpt.table.push_back(std::move(row));
        }
        cpts.push_back(std::move(cpt));
    }
    return rlbayes::DiscreteNetwork("random", schema, dag, cpts);
}

// A random DAG reached by a walk of applicable operations from the empty graph.
inline rlbayes::Dag random_dag(std::size_t n, rlbayes::Rng& rng, std::size_t steps) {
    rlbayes::Dag dag(n);
    const std::size_t n_ops = rlbayes::operation_count(n);
    for (std::size_t i = 0; i < steps; ++i) {
        const auto op = rlbayes::operation_from_id(static_cast<rlbayes::OperationId>(rng.below(n_ops)), n);
        if (dag.is_applicable(op)) dag = dag.apply(op);
    }
    return dag;
}

inline Dataset random_dataset(std::size_t n_vars, std::size_t n_rows, rlbayes::Rng& rng, std::size_t max_card = 3) {
    rlbayes::Schema schema;
    std::vector<std::vector<rlbayes::State>> cols(n_vars);
    for (std::size_t v = 0; v < n_vars; ++v) {
        const std::size_t r = 2 + rng.below(max_card - 1);
        schema.push_back(rlbayes::integer_variable("V" + std::to_string(v), r));
        for (std::size_t i = 0; i < n_rows; ++i) {
            // Weak dependence on the previous column keeps families non-trivial.
            rlbayes::State s = static_cast<rlbayes::State>(rng.below(r));
            if (v > 0 && rng.uniform() < 0.4) s = static_cast<rlbayes::State>(cols[v - 1][i] % r);
            cols[v].push_back(s);
        }
    }
    return Dataset(schema, cols);
}

}  // namespace testsupport

#endif  // RLBAYES_TESTS_SUPPORT_HPP
