#ifndef RLBAYES_DATASET_HPP
#define RLBAYES_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rlbayes/graph.hpp"

namespace rlbayes {

using State = std::uint8_t;

inline constexpr std::size_t kMaxCardinality = 256;

// Largest parent-configuration space count_family accepts.
inline constexpr std::uint64_t kMaxParentConfigurations = std::uint64_t{1} << 26;

struct Variable {
    std::string name;
    std::vector<std::string> states;

    std::size_t cardinality() const { return states.size(); }
    friend bool operator==(const Variable&, const Variable&) = default;
};

using Schema = std::vector<Variable>;

// Default labels "0", "1", ... for a variable read without a schema.
Variable integer_variable(std::string name, std::size_t cardinality);

std::optional<std::size_t> find_variable(const Schema& schema, const std::string& name);

// Columnar categorical data. Every value is below its column's cardinality.
class Dataset {
public:
    Dataset() = default;
    Dataset(Schema schema, std::vector<std::vector<State>> columns);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_vars() const { return schema_.size(); }
    const Schema& schema() const { return schema_; }
    std::size_t cardinality(std::size_t var) const { return schema_[var].cardinality(); }
    std::span<const State> column(std::size_t var) const { return columns_[var]; }
    State at(std::size_t row, std::size_t var) const { return columns_[var][row]; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Schema schema_;
    std::vector<std::vector<State>> columns_;
    std::size_t n_rows_ = 0;
};

// Contingency counts of one family over the observed parent configurations.
// Configuration index is row-major in parent order (first parent slowest).
struct FamilyCounts {
    std::size_t child = 0;
    std::vector<std::size_t> parents;
    std::size_t child_cardinality = 0;
    std::uint64_t n_configurations = 1;    // product of parent cardinalities
    std::vector<std::uint64_t> configs;    // observed configuration indices, ascending
    std::vector<std::uint32_t> counts;     // configs.size() x child_cardinality, N_ijk
    std::vector<std::uint32_t> margins;    // N_ij per observed configuration

    // N_ijk for any configuration; 0 when unobserved.
    std::uint32_t count(std::uint64_t config, std::size_t state) const;
    std::uint32_t margin(std::uint64_t config) const;
};

FamilyCounts count_family(const Dataset& ds, std::size_t child, std::span<const std::size_t> parents);

// Header of variable names, then one row per observation. With a schema,
// cells are state labels (integers are accepted as indices when they are not
// labels); without one, cells must be non-negative integers.
Dataset read_csv(std::istream& in, const std::optional<Schema>& schema = std::nullopt);
Dataset read_csv_file(const std::string& path, const std::optional<Schema>& schema = std::nullopt);

// Writes state labels under the dataset's own schema.
void write_csv(std::ostream& out, const Dataset& ds);
void write_csv_file(const std::string& path, const Dataset& ds);

}  // namespace rlbayes

#endif  // RLBAYES_DATASET_HPP
