#include "doctest.h"

#include <sstream>

#include "rlbayes/dataset.hpp"
#include "support.hpp"

using namespace rlbayes;

namespace {

Dataset from_text(const std::string& text, const std::optional<Schema>& schema = std::nullopt) {
    std::istringstream in(text);
    return read_csv(in, schema);
}

std::string to_text(const Dataset& ds) {
    std::ostringstream out;
    write_csv(out, ds);
    return out.str();
}

}  // namespace

TEST_CASE("integer CSV without a schema") {
    const Dataset ds = from_text("A,B\n0,1\n1,1\n0,0\n");
    CHECK(ds.n_rows() == 3);
    CHECK(ds.n_vars() == 2);
    CHECK(ds.at(0, 1) == 1);
    CHECK(ds.at(2, 0) == 0);
    CHECK(ds.schema()[0].name == "A");
    CHECK(ds.cardinality(0) == 2);
}

TEST_CASE("labels outside the schema name the row and column") {
    Schema schema = {Variable{"A", {"no", "maybe"}}, Variable{"B", {"no", "maybe"}}};
    try {
        (void)from_text("A,B\nno,no\nno,yes\n", schema);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("yes") != std::string::npos);
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("B") != std::string::npos);
    }
}

TEST_CASE("malformed CSV input") {
    CHECK_THROWS_AS(from_text(""), DataError);
    CHECK_THROWS_AS(from_text("A,B\n0,1\n1\n"), DataError);
    CHECK_THROWS_AS(from_text("A,B\n0,x\n"), DataError);
}

TEST_CASE("write then read is the identity") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset ds = testsupport::random_dataset(1 + rng.below(6), rng.below(50), rng);
        CHECK(from_text(to_text(ds), ds.schema()) == ds);
    }
    Schema labelled = {Variable{"smoke", {"yes", "no"}}, Variable{"lung", {"yes", "no", "unsure"}}};
    const Dataset ds(labelled, {{0, 1, 1}, {2, 0, 1}});
    CHECK(to_text(ds) == "smoke,lung\nyes,unsure\nno,yes\nno,no\n");
    CHECK(from_text(to_text(ds), labelled) == ds);
}

TEST_CASE("header-only and single-column output") {
    const Dataset empty({integer_variable("A", 2), integer_variable("B", 2)}, {{}, {}});
    CHECK(to_text(empty) == "A,B\n");
    const Dataset one({integer_variable("A", 3)}, {{2, 0}});
    CHECK(to_text(one) == "A\n2\n0\n");
}

TEST_CASE("family counts on a uniform table") {
    const Dataset ds({integer_variable("A", 2), integer_variable("B", 2)}, {{0, 0, 1, 1}, {0, 1, 0, 1}});
    const std::vector<std::size_t> parents = {0};
    const FamilyCounts fc = count_family(ds, 1, parents);
    for (std::uint64_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) CHECK(fc.count(j, k) == 1);
        CHECK(fc.margin(j) == 2);
    }
    const FamilyCounts root = count_family(ds, 0, {});
    CHECK(root.n_configurations == 1);
    CHECK(root.count(0, 0) == 2);
    CHECK(root.count(0, 1) == 2);
}

TEST_CASE("family counts match a brute-force row scan") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const Dataset ds = testsupport::random_dataset(6, 200, rng, 4);
        const std::size_t child = rng.below(6);
        std::vector<std::size_t> parents;
        for (std::size_t v = 0; v < 6; ++v)
            if (v != child && rng.uniform() < 0.5) parents.push_back(v);
        // Shuffle so the caller's parent order, not index order, drives the layout.
        for (std::size_t i = parents.size(); i > 1; --i) std::swap(parents[i - 1], parents[rng.below(i)]);
        const FamilyCounts fc = count_family(ds, child, parents);
        std::uint64_t q = 1;
        for (std::size_t p : parents) q *= ds.cardinality(p);
        CHECK(fc.n_configurations == q);
        for (std::uint64_t j = 0; j < q; ++j) {
            // Decode j with the first parent slowest.
            std::vector<std::size_t> value(parents.size());
            std::uint64_t rest = j;
            for (std::size_t i = parents.size(); i-- > 0;) {
                value[i] = rest % ds.cardinality(parents[i]);
                rest /= ds.cardinality(parents[i]);
            }
            std::uint32_t margin = 0;
            for (std::size_t k = 0; k < ds.cardinality(child); ++k) {
                std::uint32_t n = 0;
                for (std::size_t row = 0; row < ds.n_rows(); ++row) {
                    bool match = ds.at(row, child) == k;
                    for (std::size_t i = 0; i < parents.size() && match; ++i) match = ds.at(row, parents[i]) == value[i];
                    n += match;
                }
                CHECK(fc.count(j, k) == n);
                margin += n;
            }
            CHECK(fc.margin(j) == margin);
        }
    }
}

TEST_CASE("count_family guards") {
    std::vector<std::vector<State>> cols(8, std::vector<State>{0});
    Schema schema;
    for (int v = 0; v < 8; ++v) schema.push_back(integer_variable("V" + std::to_string(v), 256));
    const Dataset wide(schema, cols);
    const std::vector<std::size_t> too_many = {1, 2, 3, 4};
    CHECK_THROWS_AS(count_family(wide, 0, too_many), ContractViolation);
    const std::vector<std::size_t> self = {0};
    CHECK_THROWS_AS(count_family(wide, 0, self), ContractViolation);
    const std::vector<std::size_t> dup = {1, 1};
    CHECK_THROWS_AS(count_family(wide, 0, dup), ContractViolation);
    const std::vector<std::size_t> three = {1, 2, 3};
    CHECK(count_family(wide, 0, three).count(0, 0) == 1);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset({integer_variable("A", 2)}, {{0, 2}}), DataError);
    CHECK_THROWS_AS(Dataset({integer_variable("A", 2), integer_variable("B", 2)}, {{0}, {0, 1}}), DataError);
}
