#ifndef RLBAYES_SAMPLING_HPP
#define RLBAYES_SAMPLING_HPP

#include <cstdint>
#include <vector>

#include "rlbayes/dataset.hpp"
#include "rlbayes/graph.hpp"
#include "rlbayes/netio.hpp"
#include "rlbayes/rng.hpp"

namespace rlbayes {

inline constexpr std::size_t kDefaultSampleSize = 2000;

// Kahn's algorithm with the smallest ready index first.
std::vector<NodeId> topological_order(const Dag& dag);

// Ancestral sampling: one uniform per variable per row, inverse CDF over the
// CPT row in state order.
Dataset forward_sample(const DiscreteNetwork& net, std::size_t n_rows, Rng& rng);

inline constexpr std::uint64_t kMaxJointStates = std::uint64_t{1} << 20;

// Per-variable marginals by enumerating the full joint distribution.
std::vector<std::vector<double>> exact_joint_marginals(const DiscreteNetwork& net);

}  // namespace rlbayes

#endif  // RLBAYES_SAMPLING_HPP
