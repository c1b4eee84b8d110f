#ifndef RLBAYES_BASELINES_HPP
#define RLBAYES_BASELINES_HPP

#include <cstddef>
#include <cstdint>

#include "rlbayes/dataset.hpp"
#include "rlbayes/scoring.hpp"
#include "rlbayes/search.hpp"

namespace rlbayes {

// Moves must improve the score by more than this to be taken; keeps the
// climb from cycling on floating-point noise between equivalent DAGs.
inline constexpr double kMinImprovement = 1e-9;

struct HcConfig {
    std::size_t max_restarts = 1;
    std::uint64_t seed = 0;
    // Random applicable operations applied to the incumbent before each restart.
    std::size_t perturbation = 0;  // 0 means n_vars

    void validate() const;
};

struct SaConfig {
    double initial_temperature = 10.0;
    double cooling_factor = 0.999;
    std::size_t steps = 100000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Steepest-ascent hill climbing from the empty DAG (ties: lowest operation id).
// Trace iterations count applied moves across all restarts.
SearchResult hill_climb(const Dataset& ds, ScoreKind kind, const HcConfig& cfg);

// Metropolis walk over uniformly drawn applicable operations with geometric
// cooling; returns the best DAG ever visited.
SearchResult simulated_anneal(const Dataset& ds, ScoreKind kind, const SaConfig& cfg);

}  // namespace rlbayes

#endif  // RLBAYES_BASELINES_HPP
