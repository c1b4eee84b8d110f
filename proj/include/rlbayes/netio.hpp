#ifndef RLBAYES_NETIO_HPP
#define RLBAYES_NETIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "rlbayes/dataset.hpp"
#include "rlbayes/graph.hpp"

namespace rlbayes {

// Conditional probability table. Parents are ascending variable indices;
// table[j] is the distribution of the child under parent configuration j,
// row-major in parent order (first parent slowest).
struct Cpt {
    std::size_t child = 0;
    std::vector<std::size_t> parents;
    std::vector<std::vector<double>> table;
};

class DiscreteNetwork {
public:
    DiscreteNetwork() = default;

    // Validates cardinalities, parent sets against the dag and every row.
    DiscreteNetwork(std::string name, Schema variables, Dag dag, std::vector<Cpt> cpts);

    const std::string& name() const { return name_; }
    const Schema& variables() const { return variables_; }
    const Dag& dag() const { return dag_; }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    std::size_t n_nodes() const { return variables_.size(); }
    std::size_t cardinality(std::size_t var) const { return variables_[var].cardinality(); }

    // Rows that were renormalized on parse, one message each.
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

private:
    std::string name_;
    Schema variables_;
    Dag dag_;
    std::vector<Cpt> cpts_;
    std::vector<std::string> warnings_;
};

// Row sums further than this from 1 are rejected; closer ones are renormalized.
inline constexpr double kRowSumTolerance = 1e-4;

DiscreteNetwork parse_bif(std::istream& in);
DiscreteNetwork parse_bif(const std::string& text);
DiscreteNetwork parse_bif_file(const std::string& path);

void write_bif(std::ostream& out, const DiscreteNetwork& net);
std::string write_bif(const DiscreteNetwork& net);

// edge_count / (n (n - 1)).
double density(const DiscreteNetwork& net);

}  // namespace rlbayes

#endif  // RLBAYES_NETIO_HPP
