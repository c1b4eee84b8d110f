#include "rlbayes/metrics.hpp"

namespace rlbayes {

namespace {

void check_sizes(const Dag& learned, const Dag& truth) {
    if (learned.n_nodes() != truth.n_nodes()) {
        throw ContractViolation("learned graph has " + std::to_string(learned.n_nodes()) + " nodes, truth has " +
                                std::to_string(truth.n_nodes()));
    }
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(const Dag& learned, const Dag& truth) {
    check_sizes(learned, truth);
    ConfusionCounts c;
    const std::size_t n = truth.n_nodes();
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool l = learned.has_edge(i, j);
            const bool t = truth.has_edge(i, j);
            if (l && t) ++c.tp;
            else if (l) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }
double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double auc(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) throw ContractViolation("AUC is undefined when the truth has no edges");
    if (c.tn + c.fp == 0) throw ContractViolation("AUC is undefined when the truth has no non-edges");
    return (ratio(c.tp, c.tp + c.fn) + ratio(c.tn, c.tn + c.fp)) / 2.0;
}

std::size_t shd(const Dag& learned, const Dag& truth) {
    check_sizes(learned, truth);
    std::size_t distance = 0;
    const std::size_t n = truth.n_nodes();
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (learned.has_edge(i, j) != truth.has_edge(i, j) || learned.has_edge(j, i) != truth.has_edge(j, i)) {
                ++distance;
            }
        }
    }
    return distance;
}

}  // namespace rlbayes
