#include "rlbayes/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rlbayes {

Variable integer_variable(std::string name, std::size_t cardinality) {
    Variable v{std::move(name), {}};
    for (std::size_t s = 0; s < cardinality; ++s) v.states.push_back(std::to_string(s));
    return v;
}

std::optional<std::size_t> find_variable(const Schema& schema, const std::string& name) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == name) return i;
    }
    return std::nullopt;
}

Dataset::Dataset(Schema schema, std::vector<std::vector<State>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (schema_.size() != columns_.size()) {
        throw DataError("dataset has " + std::to_string(columns_.size()) + " columns but schema has " +
                        std::to_string(schema_.size()) + " variables");
    }
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t v = 0; v < columns_.size(); ++v) {
        const auto card = schema_[v].cardinality();
        if (card == 0 || card > kMaxCardinality) {
            throw DataError("variable " + schema_[v].name + " has unsupported cardinality " + std::to_string(card));
        }
        if (columns_[v].size() != n_rows_) throw DataError("column " + schema_[v].name + " has a different length");
        for (State x : columns_[v]) {
            if (x >= card) {
                throw DataError("value " + std::to_string(x) + " out of range in column " + schema_[v].name);
            }
        }
    }
}

std::uint32_t FamilyCounts::count(std::uint64_t config, std::size_t state) const {
    const auto it = std::lower_bound(configs.begin(), configs.end(), config);
    if (it == configs.end() || *it != config) return 0;
    return counts[static_cast<std::size_t>(it - configs.begin()) * child_cardinality + state];
}

std::uint32_t FamilyCounts::margin(std::uint64_t config) const {
    const auto it = std::lower_bound(configs.begin(), configs.end(), config);
    if (it == configs.end() || *it != config) return 0;
    return margins[static_cast<std::size_t>(it - configs.begin())];
}

FamilyCounts count_family(const Dataset& ds, std::size_t child, std::span<const std::size_t> parents) {
    if (child >= ds.n_vars()) throw ContractViolation("child index out of range");
    FamilyCounts fc;
    fc.child = child;
    fc.parents.assign(parents.begin(), parents.end());
    fc.child_cardinality = ds.cardinality(child);

    for (std::size_t i = 0; i < parents.size(); ++i) {
        const std::size_t p = parents[i];
        if (p >= ds.n_vars()) throw ContractViolation("parent index out of range");
        if (p == child) throw ContractViolation("a variable cannot be its own parent");
        for (std::size_t j = 0; j < i; ++j) {
            if (parents[j] == p) throw ContractViolation("duplicate parent " + std::to_string(p));
        }
        fc.n_configurations *= ds.cardinality(p);
        if (fc.n_configurations > kMaxParentConfigurations) {
            throw ContractViolation("parent configuration space of " + ds.schema()[child].name +
                                    " exceeds the 2^26 guard");
        }
    }

    const std::size_t n = ds.n_rows();
    const std::size_t r = fc.child_cardinality;
    std::vector<std::uint64_t> config(n, 0);
    for (std::size_t p : parents) {
        const auto col = ds.column(p);
        const std::uint64_t card = ds.cardinality(p);
        for (std::size_t row = 0; row < n; ++row) config[row] = config[row] * card + col[row];
    }
    const auto child_col = ds.column(child);

    if (fc.n_configurations <= std::max<std::uint64_t>(4096, n)) {
        // Dense buckets, then compact the observed ones.
        const auto q = static_cast<std::size_t>(fc.n_configurations);
        std::vector<std::uint32_t> dense(q * r, 0);
        for (std::size_t row = 0; row < n; ++row) ++dense[config[row] * r + child_col[row]];
        for (std::size_t j = 0; j < q; ++j) {
            std::uint32_t m = 0;
            for (std::size_t k = 0; k < r; ++k) m += dense[j * r + k];
            if (m == 0) continue;
            fc.configs.push_back(j);
            fc.margins.push_back(m);
            fc.counts.insert(fc.counts.end(), dense.begin() + static_cast<std::ptrdiff_t>(j * r),
                             dense.begin() + static_cast<std::ptrdiff_t>((j + 1) * r));
        }
    } else {
        std::vector<std::uint64_t> keys(n);
        for (std::size_t row = 0; row < n; ++row) keys[row] = config[row] * r + child_col[row];
        std::sort(keys.begin(), keys.end());
        for (std::uint64_t key : keys) {
            const std::uint64_t j = key / r;
            const std::size_t k = static_cast<std::size_t>(key % r);
            if (fc.configs.empty() || fc.configs.back() != j) {
                fc.configs.push_back(j);
                fc.margins.push_back(0);
                fc.counts.resize(fc.counts.size() + r, 0);
            }
            ++fc.margins.back();
            ++fc.counts[fc.counts.size() - r + k];
        }
    }
    return fc;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::optional<std::size_t> parse_index(const std::string& s) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

std::string locate(std::size_t row, const std::string& column) {
    return "row " + std::to_string(row) + ", column " + column;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::optional<Schema>& schema) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);
    if (header.empty() || (header.size() == 1 && header[0].empty())) throw DataError("CSV header is empty");

    // Column c of the file feeds variable order[c] of the schema.
    std::vector<std::size_t> order(header.size());
    Schema out_schema;
    std::vector<std::unordered_map<std::string, State>> lookup;
    if (schema) {
        if (header.size() != schema->size()) {
            throw DataError("CSV has " + std::to_string(header.size()) + " columns, schema has " +
                            std::to_string(schema->size()));
        }
        out_schema = *schema;
        lookup.resize(out_schema.size());
        for (std::size_t v = 0; v < out_schema.size(); ++v) {
            if (out_schema[v].cardinality() > kMaxCardinality) {
                throw DataError("variable " + out_schema[v].name + " has too many states");
            }
            for (std::size_t s = 0; s < out_schema[v].states.size(); ++s) {
                lookup[v].emplace(out_schema[v].states[s], static_cast<State>(s));
            }
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            const auto idx = find_variable(out_schema, header[c]);
            if (!idx) throw DataError("CSV column " + header[c] + " is not in the schema");
            order[c] = *idx;
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            order[c] = c;
            out_schema.push_back(Variable{header[c], {}});
        }
    }

    std::vector<std::vector<State>> columns(header.size());
    std::vector<std::size_t> max_value(header.size(), 0);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw DataError("ragged CSV row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                            " cells, got " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::size_t v = order[c];
            std::size_t value = 0;
            if (schema) {
                const auto it = lookup[v].find(cells[c]);
                if (it != lookup[v].end()) {
                    value = it->second;
                } else {
                    const auto idx = parse_index(cells[c]);
                    if (!idx || *idx >= out_schema[v].cardinality()) {
                        throw DataError("unknown label '" + cells[c] + "' at " + locate(row, header[c]));
                    }
                    value = *idx;
                }
            } else {
                const auto idx = parse_index(cells[c]);
                if (!idx) throw DataError("expected a non-negative integer at " + locate(row, header[c]));
                if (*idx >= kMaxCardinality) throw DataError("value too large at " + locate(row, header[c]));
                value = *idx;
                max_value[v] = std::max(max_value[v], value);
            }
            columns[v].push_back(static_cast<State>(value));
        }
    }
    if (!schema) {
        for (std::size_t v = 0; v < out_schema.size(); ++v) {
            out_schema[v] = integer_variable(out_schema[v].name, row == 0 ? 1 : max_value[v] + 1);
        }
    }
    return Dataset(std::move(out_schema), std::move(columns));
}

Dataset read_csv_file(const std::string& path, const std::optional<Schema>& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return read_csv(in, schema);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    const auto& schema = ds.schema();
    for (std::size_t v = 0; v < schema.size(); ++v) out << (v ? "," : "") << schema[v].name;
    out << '\n';
    for (std::size_t row = 0; row < ds.n_rows(); ++row) {
        for (std::size_t v = 0; v < schema.size(); ++v) {
            out << (v ? "," : "") << schema[v].states[ds.at(row, v)];
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    write_csv(out, ds);
}

}  // namespace rlbayes
