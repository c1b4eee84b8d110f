#ifndef RLBAYES_SCORING_HPP
#define RLBAYES_SCORING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "rlbayes/dataset.hpp"
#include "rlbayes/graph.hpp"

namespace rlbayes {

enum class ScoreKind { LL, AIC, BIC };

const char* to_string(ScoreKind kind);
std::optional<ScoreKind> parse_score_kind(const std::string& text);

// Free parameters of a family: (r_child - 1) * prod(parent cardinalities).
double family_parameter_count(const Dataset& ds, std::size_t child, std::span<const std::size_t> parents);

// Log-likelihood of the family under MLE parameters (0 ln 0 = 0), natural log.
double family_log_likelihood(const FamilyCounts& counts);

// LL minus the kind's penalty (0, 2k or ln(N) k). Uncached.
double local_score(ScoreKind kind, const Dataset& ds, std::size_t child, std::span<const std::size_t> parents);

// Sum of uncached local scores.
double total_score(ScoreKind kind, const Dataset& ds, const Dag& dag);

inline constexpr std::size_t kMaxScoredNodes = 128;

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t entries = 0;

    friend bool operator==(const CacheStats&, const CacheStats&) = default;
};

// (child, parent bitmask) -> local score; networks up to 128 nodes.
class LocalScoreCache {
public:
    using Mask = std::array<std::uint64_t, 2>;

    std::optional<double> find(std::size_t child, const Mask& parents);
    void store(std::size_t child, const Mask& parents, double value);
    CacheStats stats() const { return {hits_, misses_, table_.size()}; }
    void clear();

private:
    struct Key {
        std::uint64_t child;
        Mask parents;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    std::unordered_map<Key, double, KeyHash> table_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

inline CacheStats cache_stats(const LocalScoreCache& cache) { return cache.stats(); }

// Cached, decomposed scoring of DAGs against one dataset. Holds a reference
// to the dataset, which must outlive it. Not thread-safe.
class Scorer {
public:
    Scorer(const Dataset& ds, ScoreKind kind);

    const Dataset& dataset() const { return ds_; }
    ScoreKind kind() const { return kind_; }

    double local(std::size_t child, const LocalScoreCache::Mask& parents);
    double local(const Dag& dag, std::size_t child);
    double total(const Dag& dag);

    // total(apply(dag, op)) - total(dag) from the one or two touched families.
    // Throws OperationNotApplicable when op cannot be applied to dag.
    double delta(const Dag& dag, const Operation& op);

    const LocalScoreCache& cache() const { return cache_; }
    void clear_cache() { cache_.clear(); }

private:
    LocalScoreCache::Mask mask_of(const Dag& dag, std::size_t child) const;

    const Dataset& ds_;
    ScoreKind kind_;
    LocalScoreCache cache_;
};

inline double delta_score(Scorer& scorer, const Dag& dag, const Operation& op) { return scorer.delta(dag, op); }

}  // namespace rlbayes

#endif  // RLBAYES_SCORING_HPP
