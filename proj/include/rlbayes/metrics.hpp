#ifndef RLBAYES_METRICS_HPP
#define RLBAYES_METRICS_HPP

#include <cstddef>

#include "rlbayes/graph.hpp"

namespace rlbayes {

// Edge predictions over the n(n-1) ordered node pairs.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const Dag& learned, const Dag& truth);

double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

// Balanced accuracy (tpr + tnr) / 2 of the hard edge classifier. Throws
// ContractViolation when the truth has no edges or no non-edges.
double auc(const ConfusionCounts& c);

// Unordered pairs whose edge status differs; a reversed edge counts once.
std::size_t shd(const Dag& learned, const Dag& truth);

}  // namespace rlbayes

#endif  // RLBAYES_METRICS_HPP
