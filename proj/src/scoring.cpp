#include "rlbayes/scoring.hpp"

#include <bit>
#include <cmath>
#include <vector>

namespace rlbayes {

const char* to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::LL: return "ll";
        case ScoreKind::AIC: return "aic";
        case ScoreKind::BIC: return "bic";
    }
    return "?";
}

std::optional<ScoreKind> parse_score_kind(const std::string& text) {
    if (text == "ll") return ScoreKind::LL;
    if (text == "aic") return ScoreKind::AIC;
    if (text == "bic") return ScoreKind::BIC;
    return std::nullopt;
}

double family_parameter_count(const Dataset& ds, std::size_t child, std::span<const std::size_t> parents) {
    double q = 1.0;
    for (std::size_t p : parents) q *= static_cast<double>(ds.cardinality(p));
    return static_cast<double>(ds.cardinality(child) - 1) * q;
}

double family_log_likelihood(const FamilyCounts& counts) {
    const std::size_t r = counts.child_cardinality;
    double ll = 0.0;
    for (std::size_t j = 0; j < counts.configs.size(); ++j) {
        const double n_ij = counts.margins[j];
        for (std::size_t k = 0; k < r; ++k) {
            const std::uint32_t n_ijk = counts.counts[j * r + k];
            if (n_ijk == 0) continue;
            ll += n_ijk * std::log(n_ijk / n_ij);
        }
    }
    return ll;
}

double local_score(ScoreKind kind, const Dataset& ds, std::size_t child, std::span<const std::size_t> parents) {
    const double ll = family_log_likelihood(count_family(ds, child, parents));
    const double k = family_parameter_count(ds, child, parents);
    switch (kind) {
        case ScoreKind::LL: return ll;
        case ScoreKind::AIC: return ll - 2.0 * k;
        case ScoreKind::BIC: return ll - std::log(static_cast<double>(ds.n_rows())) * k;
    }
    return ll;
}

double total_score(ScoreKind kind, const Dataset& ds, const Dag& dag) {
    if (dag.n_nodes() != ds.n_vars()) throw ContractViolation("dag and dataset disagree on the number of variables");
    double total = 0.0;
    for (std::size_t v = 0; v < dag.n_nodes(); ++v) {
        const auto parents = dag.parents(v);
        total += local_score(kind, ds, v, parents);
    }
    return total;
}

std::size_t LocalScoreCache::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = k.child * 0x9e3779b97f4a7c15ULL;
    h ^= k.parents[0] + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    h ^= k.parents[1] + 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

std::optional<double> LocalScoreCache::find(std::size_t child, const Mask& parents) {
    const auto it = table_.find(Key{child, parents});
    if (it == table_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void LocalScoreCache::store(std::size_t child, const Mask& parents, double value) {
    table_.insert_or_assign(Key{child, parents}, value);
}

void LocalScoreCache::clear() {
    table_.clear();
    hits_ = 0;
    misses_ = 0;
}

Scorer::Scorer(const Dataset& ds, ScoreKind kind) : ds_(ds), kind_(kind) {
    if (ds.n_vars() > kMaxScoredNodes) {
        throw ContractViolation("scoring supports at most 128 variables, got " + std::to_string(ds.n_vars()));
    }
    if (ds.n_rows() == 0) throw ContractViolation("cannot score an empty dataset");
}

LocalScoreCache::Mask Scorer::mask_of(const Dag& dag, std::size_t child) const {
    LocalScoreCache::Mask mask{0, 0};
    const auto words = dag.parent_words(child);
    for (std::size_t w = 0; w < words.size(); ++w) mask[w] = words[w];
    return mask;
}

double Scorer::local(std::size_t child, const LocalScoreCache::Mask& parents) {
    if (const auto hit = cache_.find(child, parents)) return *hit;
    std::vector<std::size_t> list;
    for (std::size_t w = 0; w < parents.size(); ++w) {
        std::uint64_t bits = parents[w];
        while (bits != 0) {
            list.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    const double value = local_score(kind_, ds_, child, list);
    cache_.store(child, parents, value);
    return value;
}

double Scorer::local(const Dag& dag, std::size_t child) { return local(child, mask_of(dag, child)); }

double Scorer::total(const Dag& dag) {
    if (dag.n_nodes() != ds_.n_vars()) throw ContractViolation("dag and dataset disagree on the number of variables");
    double total = 0.0;
    for (std::size_t v = 0; v < dag.n_nodes(); ++v) total += local(dag, v);
    return total;
}

namespace {

void set_bit(LocalScoreCache::Mask& m, std::size_t i) { m[i / 64] |= std::uint64_t{1} << (i % 64); }
void clear_bit(LocalScoreCache::Mask& m, std::size_t i) { m[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

}  // namespace

double Scorer::delta(const Dag& dag, const Operation& op) {
    using Reason = OperationNotApplicable::Reason;
    if (dag.n_nodes() != ds_.n_vars()) throw ContractViolation("dag and dataset disagree on the number of variables");
    if (!dag.is_applicable(op)) {
        Reason reason = Reason::Cycle;
        if (op.kind == OpKind::Add && dag.has_edge(op.source, op.target)) reason = Reason::EdgeExists;
        if (op.kind != OpKind::Add && !dag.has_edge(op.source, op.target)) reason = Reason::EdgeMissing;
        throw OperationNotApplicable(op, reason);
    }
    const std::size_t a = op.source;
    const std::size_t b = op.target;
    auto mask_b = mask_of(dag, b);
    const double before_b = local(b, mask_b);
    switch (op.kind) {
        case OpKind::Add:
            set_bit(mask_b, a);
            return local(b, mask_b) - before_b;
        case OpKind::Delete:
            clear_bit(mask_b, a);
            return local(b, mask_b) - before_b;
        case OpKind::Reverse: {
            auto mask_a = mask_of(dag, a);
            const double before_a = local(a, mask_a);
            clear_bit(mask_b, a);
            set_bit(mask_a, b);
            return (local(b, mask_b) - before_b) + (local(a, mask_a) - before_a);
        }
    }
    return 0.0;
}

}  // namespace rlbayes
