#ifndef RLBAYES_CLI_HPP
#define RLBAYES_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rlbayes/dataset.hpp"
#include "rlbayes/error.hpp"
#include "rlbayes/metrics.hpp"
#include "rlbayes/netio.hpp"
#include "rlbayes/sampling.hpp"
#include "rlbayes/search.hpp"

namespace rlbayes::cli {

// Bad flags or flag values; exit status 1.
class UsageError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

// Schema sidecar written next to sampled CSVs.
void write_schema_file(const std::string& path, const std::string& network, const Schema& schema);
Schema read_schema_file(const std::string& path);

struct SampleOptions {
    std::string network;
    std::size_t n_rows = kDefaultSampleSize;
    std::uint64_t seed = 0;
    std::string out;
    // Defaults to out with ".csv" replaced by ".schema.json".
    std::string schema_out;
};

// Returns the schema sidecar path.
std::string cmd_sample(const SampleOptions& opts);

struct AlgorithmOptions {
    std::string algo = "rlbayes";  // rlbayes | hc | sa
    ScoreKind score = ScoreKind::BIC;
    std::size_t max_iter = 100000;
    std::size_t max_length = 500;
    double theta = 0.01;
    double epsilon = 0.5;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;           // hc
    double temperature = 10.0;          // sa
    double cooling = 0.999;             // sa
    std::optional<std::size_t> steps;   // sa; defaults to max_iter

    void validate() const;
};

struct RunOutcome {
    SearchResult result;
    double runtime_seconds = 0.0;
};

RunOutcome run_algorithm(const Dataset& ds, const AlgorithmOptions& opts);

struct Evaluation {
    ConfusionCounts counts;
    double f1 = 0.0;
    double auc = 0.0;
    std::size_t shd = 0;
};

// RunRecord JSON: config echo, learned edges by name, score, runtime, trace,
// and the metrics when the truth is known.
std::string run_record_json(const AlgorithmOptions& opts, const Dataset& ds, const RunOutcome& outcome,
                            const std::optional<Evaluation>& evaluation = std::nullopt);

struct LearnOptions {
    std::string data;
    std::string schema;  // optional
    std::string out;
    AlgorithmOptions algorithm;
};

void cmd_learn(const LearnOptions& opts);

// Edges "source -> target" of a run record resolved against a variable list.
Dag read_result_dag(const std::string& path, const Schema& variables);

Evaluation evaluate(const Dag& learned, const Dag& truth);
std::string evaluation_json(const Evaluation& ev);

struct EvalOptions {
    std::string result;
    std::string truth;
    std::string out;
};

Evaluation cmd_eval(const EvalOptions& opts);

struct BenchAlgorithm {
    std::string label;
    AlgorithmOptions options;
};

struct BenchSpec {
    std::string network;
    std::size_t sample_size = 2000;
    std::vector<BenchAlgorithm> algorithms;
    std::size_t repeats = 10;
    std::uint64_t base_seed = 0;
    std::string output;
    std::size_t jobs = 1;

    void validate() const;
};

// Relative paths inside the spec resolve against the spec file's directory.
BenchSpec read_bench_spec(const std::string& path);

struct BenchRun {
    std::string algorithm;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    Evaluation evaluation;
    double score = 0.0;
    double runtime_seconds = 0.0;
    std::string record_json;
};

struct SummaryRow {
    std::string algorithm;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
};

// Per-run records ordered by (algorithm, repeat) and the summary rows.
struct BenchReport {
    std::vector<BenchRun> runs;
    std::vector<SummaryRow> summary;
};

// Writes spec.output (summary CSV) and spec.output + ".runs.json".
BenchReport cmd_bench(const BenchSpec& spec);

// Sample mean and (n - 1) standard deviation; std is 0 for one value.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

struct SweepOptions {
    std::string network;
    std::string param = "max_length";  // max_length | theta | epsilon
    std::vector<double> values;
    std::size_t max_iter = 100000;
    std::size_t checkpoints = 100;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    std::size_t n_rows = 2000;
    std::size_t max_length = 500;
    double theta = 0.01;
    double epsilon = 0.5;
    std::string out;
    std::size_t jobs = 1;
};

struct SweepRow {
    double param_value = 0.0;
    std::size_t iteration = 0;
    double mean_auc = 0.0;
    double mean_best_score = 0.0;
};

// Per (value, repeat): the best-so-far AUC and score at every checkpoint.
struct SweepCurves {
    std::vector<SweepRow> rows;
    // [value][repeat][checkpoint]
    std::vector<std::vector<std::vector<double>>> auc;
    std::vector<std::vector<std::vector<double>>> best_score;
};

SweepCurves cmd_sweep(const SweepOptions& opts);

std::vector<double> parse_value_list(const std::string& text);

// Full command-line entry point; returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace rlbayes::cli

#endif  // RLBAYES_CLI_HPP
