#include "rlbayes/sampling.hpp"

#include <functional>
#include <queue>

namespace rlbayes {

std::vector<NodeId> topological_order(const Dag& dag) {
    const std::size_t n = dag.n_nodes();
    std::vector<std::size_t> indegree(n);
    for (NodeId v = 0; v < n; ++v) indegree[v] = dag.parents(v).size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (NodeId c : dag.children(u)) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (order.size() != n) throw InvariantViolation("topological sort found a cycle");
    return order;
}

namespace {

std::size_t parent_config(const DiscreteNetwork& net, const Cpt& cpt, const std::vector<State>& values) {
    std::size_t config = 0;
    for (std::size_t p : cpt.parents) config = config * net.cardinality(p) + values[p];
    return config;
}

}  // namespace

Dataset forward_sample(const DiscreteNetwork& net, std::size_t n_rows, Rng& rng) {
    if (n_rows == 0) throw ContractViolation("sample size must be at least 1");
    const std::size_t n = net.n_nodes();
    const auto order = topological_order(net.dag());
    std::vector<std::vector<State>> columns(n, std::vector<State>(n_rows));
    std::vector<State> values(n);
    for (std::size_t row = 0; row < n_rows; ++row) {
        for (NodeId v : order) {
            const Cpt& cpt = net.cpts()[v];
            const auto& dist = cpt.table[parent_config(net, cpt, values)];
            const double u = rng.uniform();
            double cumulative = 0;
            std::size_t state = dist.size() - 1;
            for (std::size_t k = 0; k < dist.size(); ++k) {
                cumulative += dist[k];
                if (u < cumulative) {
                    state = k;
                    break;
                }
            }
            // Rounding can leave the tail short of 1; never land on a zero-mass state.
            while (dist[state] == 0.0 && state > 0) --state;
            values[v] = static_cast<State>(state);
            columns[v][row] = values[v];
        }
    }
    return Dataset(net.variables(), std::move(columns));
}

std::vector<std::vector<double>> exact_joint_marginals(const DiscreteNetwork& net) {
    const std::size_t n = net.n_nodes();
    std::uint64_t total = 1;
    for (std::size_t v = 0; v < n; ++v) {
        total *= net.cardinality(v);
        if (total > kMaxJointStates) {
            throw ContractViolation("joint state space of " + net.name() + " exceeds 2^20 states");
        }
    }
    std::vector<std::vector<double>> marginals(n);
    for (std::size_t v = 0; v < n; ++v) marginals[v].assign(net.cardinality(v), 0.0);

    std::vector<State> values(n, 0);
    for (std::uint64_t joint = 0; joint < total; ++joint) {
        double p = 1.0;
        for (std::size_t v = 0; v < n && p > 0.0; ++v) {
            const Cpt& cpt = net.cpts()[v];
            p *= cpt.table[parent_config(net, cpt, values)][values[v]];
        }
        if (p > 0.0) {
            for (std::size_t v = 0; v < n; ++v) marginals[v][values[v]] += p;
        }
        // Odometer increment, last variable fastest.
        for (std::size_t v = n; v-- > 0;) {
            if (++values[v] < net.cardinality(v)) break;
            values[v] = 0;
        }
    }
    return marginals;
}

}  // namespace rlbayes
