#include "rlbayes/cli.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlbayes/baselines.hpp"

namespace rlbayes::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("failed writing " + path);
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(what + " is not valid JSON: " + e.what());
    }
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; rethrows the
// first failure after all workers stop.
template <typename Task>
void parallel_for(std::size_t jobs, std::size_t count, Task task) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void write_schema_file(const std::string& path, const std::string& network, const Schema& schema) {
    json vars = json::array();
    for (const auto& v : schema) vars.push_back({{"name", v.name}, {"states", v.states}});
    write_text(path, json{{"network", network}, {"variables", vars}}.dump(2) + "\n");
}

Schema read_schema_file(const std::string& path) {
    const json doc = parse_json(read_text(path), path);
    try {
        Schema schema;
        for (const auto& v : doc.at("variables")) {
            schema.push_back(Variable{v.at("name").get<std::string>(), v.at("states").get<std::vector<std::string>>()});
        }
        if (schema.empty()) throw DataError("schema " + path + " lists no variables");
        return schema;
    } catch (const json::exception& e) {
        throw DataError("malformed schema " + path + ": " + e.what());
    }
}

std::string cmd_sample(const SampleOptions& opts) {
    if (opts.n_rows == 0) throw UsageError("--n must be at least 1");
    if (opts.network.empty() || opts.out.empty()) throw UsageError("--network and --out are required");
    const DiscreteNetwork net = parse_bif_file(opts.network);
    Rng rng(opts.seed);
    const Dataset ds = forward_sample(net, opts.n_rows, rng);
    std::ostringstream csv;
    write_csv(csv, ds);
    write_text(opts.out, csv.str());

    std::string schema_path = opts.schema_out;
    if (schema_path.empty()) {
        fs::path p(opts.out);
        if (p.extension() == ".csv") p.replace_extension();
        schema_path = p.string() + ".schema.json";
    }
    write_schema_file(schema_path, net.name(), net.variables());
    return schema_path;
}

void AlgorithmOptions::validate() const {
    if (algo != "rlbayes" && algo != "hc" && algo != "sa") throw UsageError("unknown algorithm '" + algo + "'");
    try {
        if (algo == "rlbayes") {
            SearchConfig cfg;
            cfg.max_iter = max_iter;
            cfg.max_length = max_length;
            cfg.theta = theta;
            cfg.epsilon_explore = epsilon;
            cfg.validate();
        } else if (algo == "hc") {
            HcConfig{restarts, seed, 0}.validate();
        } else {
            SaConfig{temperature, cooling, steps.value_or(max_iter), seed}.validate();
        }
    } catch (const ContractViolation& e) {
        throw UsageError(e.what());
    }
}

RunOutcome run_algorithm(const Dataset& ds, const AlgorithmOptions& opts) {
    opts.validate();
    if (ds.n_vars() < 2) throw DataError("structure learning needs at least 2 variables");
    RunOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    if (opts.algo == "rlbayes") {
        SearchConfig cfg;
        cfg.max_iter = opts.max_iter;
        cfg.max_length = opts.max_length;
        cfg.theta = opts.theta;
        cfg.epsilon_explore = opts.epsilon;
        cfg.score_kind = opts.score;
        cfg.seed = opts.seed;
        outcome.result = run(ds, cfg);
    } else if (opts.algo == "hc") {
        outcome.result = hill_climb(ds, opts.score, HcConfig{opts.restarts, opts.seed, 0});
    } else {
        outcome.result =
            simulated_anneal(ds, opts.score, SaConfig{opts.temperature, opts.cooling, opts.steps.value_or(opts.max_iter), opts.seed});
    }
    outcome.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

namespace {

json config_json(const AlgorithmOptions& opts) {
    json cfg = {{"algo", opts.algo}, {"score", to_string(opts.score)}, {"seed", opts.seed}};
    if (opts.algo == "rlbayes") {
        cfg["max_iter"] = opts.max_iter;
        cfg["max_length"] = opts.max_length;
        cfg["theta"] = opts.theta;
        cfg["epsilon"] = opts.epsilon;
    } else if (opts.algo == "hc") {
        cfg["restarts"] = opts.restarts;
    } else {
        cfg["temperature"] = opts.temperature;
        cfg["cooling"] = opts.cooling;
        cfg["steps"] = opts.steps.value_or(opts.max_iter);
    }
    return cfg;
}

json evaluation_to_json(const Evaluation& ev) {
    return {{"f1", ev.f1},
            {"auc", ev.auc},
            {"shd", ev.shd},
            {"precision", precision(ev.counts)},
            {"recall", recall(ev.counts)},
            {"confusion", {{"tp", ev.counts.tp}, {"fp", ev.counts.fp}, {"fn", ev.counts.fn}, {"tn", ev.counts.tn}}}};
}

}  // namespace

std::string run_record_json(const AlgorithmOptions& opts, const Dataset& ds, const RunOutcome& outcome,
                            const std::optional<Evaluation>& evaluation) {
    const auto& schema = ds.schema();
    json edges = json::array();
    for (const auto& [s, t] : outcome.result.best_dag.edges()) edges.push_back(schema[s].name + " -> " + schema[t].name);
    json variables = json::array();
    for (const auto& v : schema) variables.push_back(v.name);
    json trace = json::array();
    for (const auto& p : outcome.result.trace) trace.push_back({p.iteration, p.best_score});
    const auto& c = outcome.result.counters;
    json record = {{"format", "rlbayes-run"},
                   {"config", config_json(opts)},
                   {"n_rows", ds.n_rows()},
                   {"variables", variables},
                   {"edges", edges},
                   {"score", outcome.result.best_score},
                   {"runtime_seconds", outcome.runtime_seconds},
                   {"trace", trace},
                   {"counters",
                    {{"applied", c.applied},
                     {"rejected", c.rejected},
                     {"evictions", c.evictions},
                     {"transfers", c.transfers},
                     {"all_masked", c.all_masked}}}};
    if (evaluation) record["metrics"] = evaluation_to_json(*evaluation);
    return record.dump(2) + "\n";
}

void cmd_learn(const LearnOptions& opts) {
    if (opts.data.empty() || opts.out.empty()) throw UsageError("--data and --out are required");
    opts.algorithm.validate();
    std::optional<Schema> schema;
    if (!opts.schema.empty()) schema = read_schema_file(opts.schema);
    const Dataset ds = read_csv_file(opts.data, schema);
    const RunOutcome outcome = run_algorithm(ds, opts.algorithm);
    write_text(opts.out, run_record_json(opts.algorithm, ds, outcome));
}

Dag read_result_dag(const std::string& path, const Schema& variables) {
    const json doc = parse_json(read_text(path), path);
    std::vector<Edge> edges;
    try {
        if (doc.contains("variables")) {
            const auto names = doc.at("variables").get<std::vector<std::string>>();
            if (names.size() != variables.size()) {
                throw DataError("result has " + std::to_string(names.size()) + " variables, truth has " +
                                std::to_string(variables.size()));
            }
        }
        for (const auto& e : doc.at("edges")) {
            const std::string line = e.get<std::string>();
            const auto arrow = line.find(" -> ");
            if (arrow == std::string::npos) throw DataError("malformed edge '" + line + "' in " + path);
            const auto s = find_variable(variables, line.substr(0, arrow));
            const auto t = find_variable(variables, line.substr(arrow + 4));
            if (!s || !t) throw DataError("edge '" + line + "' names a variable missing from the truth network");
            edges.emplace_back(*s, *t);
        }
    } catch (const json::exception& e) {
        throw DataError("malformed result " + path + ": " + e.what());
    }
    try {
        return Dag::from_edges(variables.size(), edges);
    } catch (const ContractViolation& e) {
        throw DataError(std::string("result graph is invalid: ") + e.what());
    }
}

Evaluation evaluate(const Dag& learned, const Dag& truth) {
    Evaluation ev;
    ev.counts = confusion(learned, truth);
    ev.f1 = f1(ev.counts);
    ev.auc = auc(ev.counts);
    ev.shd = shd(learned, truth);
    return ev;
}

std::string evaluation_json(const Evaluation& ev) { return evaluation_to_json(ev).dump(2) + "\n"; }

Evaluation cmd_eval(const EvalOptions& opts) {
    if (opts.result.empty() || opts.truth.empty() || opts.out.empty()) {
        throw UsageError("--result, --truth and --out are required");
    }
    const DiscreteNetwork truth = parse_bif_file(opts.truth);
    const Dag learned = read_result_dag(opts.result, truth.variables());
    Evaluation ev;
    try {
        ev = evaluate(learned, truth.dag());
    } catch (const ContractViolation& e) {
        throw DataError(e.what());
    }
    write_text(opts.out, evaluation_json(ev));
    return ev;
}

void BenchSpec::validate() const {
    if (repeats < 1) throw UsageError("bench repeats must be at least 1");
    if (algorithms.empty()) throw UsageError("bench needs at least one algorithm");
    if (sample_size < 1) throw UsageError("bench sample_size must be at least 1");
    if (network.empty() || output.empty()) throw UsageError("bench spec needs 'network' and 'output'");
    for (const auto& a : algorithms) a.options.validate();
}

BenchSpec read_bench_spec(const std::string& path) {
    const json doc = parse_json(read_text(path), path);
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
    BenchSpec spec;
    try {
        spec.network = resolve(doc.at("network").get<std::string>());
        spec.output = resolve(doc.at("output").get<std::string>());
        spec.sample_size = doc.value("sample_size", spec.sample_size);
        spec.repeats = doc.value("repeats", spec.repeats);
        spec.base_seed = doc.value("base_seed", spec.base_seed);
        spec.jobs = doc.value("jobs", spec.jobs);
        const std::string score = doc.value("score", std::string("bic"));
        const auto kind = parse_score_kind(score);
        if (!kind) throw UsageError("unknown score '" + score + "'");
        for (const auto& a : doc.at("algorithms")) {
            BenchAlgorithm algo;
            algo.options.algo = a.at("name").get<std::string>();
            algo.label = a.value("label", algo.options.algo);
            algo.options.score = *kind;
            algo.options.max_iter = a.value("max_iter", algo.options.max_iter);
            algo.options.max_length = a.value("max_length", algo.options.max_length);
            algo.options.theta = a.value("theta", algo.options.theta);
            algo.options.epsilon = a.value("epsilon", algo.options.epsilon);
            algo.options.restarts = a.value("restarts", algo.options.restarts);
            algo.options.temperature = a.value("temperature", algo.options.temperature);
            algo.options.cooling = a.value("cooling", algo.options.cooling);
            if (a.contains("steps")) algo.options.steps = a.at("steps").get<std::size_t>();
            spec.algorithms.push_back(std::move(algo));
        }
    } catch (const json::exception& e) {
        throw UsageError("malformed bench spec " + path + ": " + e.what());
    }
    spec.validate();
    return spec;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

BenchReport cmd_bench(const BenchSpec& spec) {
    spec.validate();
    const DiscreteNetwork net = parse_bif_file(spec.network);
    std::vector<Dataset> datasets;
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        Rng rng(spec.base_seed + r);
        datasets.push_back(forward_sample(net, spec.sample_size, rng));
    }

    BenchReport report;
    report.runs.resize(spec.algorithms.size() * spec.repeats);
    parallel_for(spec.jobs, report.runs.size(), [&](std::size_t index) {
        const std::size_t a = index / spec.repeats;
        const std::size_t r = index % spec.repeats;
        AlgorithmOptions opts = spec.algorithms[a].options;
        opts.seed = spec.base_seed + r;
        try {
            const RunOutcome outcome = run_algorithm(datasets[r], opts);
            BenchRun& run = report.runs[index];
            run.algorithm = spec.algorithms[a].label;
            run.repeat = r;
            run.seed = opts.seed;
            run.evaluation = evaluate(outcome.result.best_dag, net.dag());
            run.score = outcome.result.best_score;
            run.runtime_seconds = outcome.runtime_seconds;
            run.record_json = run_record_json(opts, datasets[r], outcome, run.evaluation);
        } catch (const Error& e) {
            throw Error("bench run " + spec.algorithms[a].label + " #" + std::to_string(r) + " failed: " + e.what());
        }
    });

    std::ostringstream csv;
    csv << "algorithm,metric,mean,std\n";
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
        const std::string& label = spec.algorithms[a].label;
        std::vector<double> f1s, aucs, shds, scores, times;
        for (std::size_t r = 0; r < spec.repeats; ++r) {
            const BenchRun& run = report.runs[a * spec.repeats + r];
            f1s.push_back(run.evaluation.f1);
            aucs.push_back(run.evaluation.auc);
            shds.push_back(static_cast<double>(run.evaluation.shd));
            scores.push_back(run.score);
            times.push_back(run.runtime_seconds);
        }
        const std::pair<const char*, const std::vector<double>*> metrics[] = {
            {"f1", &f1s}, {"auc", &aucs}, {"shd", &shds}, {"score", &scores}, {"runtime_seconds", &times}};
        for (const auto& [name, values] : metrics) {
            const auto [mean, std] = mean_and_std(*values);
            report.summary.push_back({label, name, mean, std});
            csv << label << ',' << name << ',' << format_number(mean) << ',' << format_number(std) << '\n';
        }
    }
    write_text(spec.output, csv.str());

    json runs = json::array();
    for (const auto& run : report.runs) {
        json record = json::parse(run.record_json);
        record["algorithm"] = run.algorithm;
        record["repeat"] = run.repeat;
        runs.push_back(std::move(record));
    }
    write_text(spec.output + ".runs.json", runs.dump(2) + "\n");
    return report;
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) throw UsageError("bad value '" + item + "' in list");
        values.push_back(v);
    }
    if (values.empty()) throw UsageError("empty value list");
    return values;
}

SweepCurves cmd_sweep(const SweepOptions& opts) {
    if (opts.param != "max_length" && opts.param != "theta" && opts.param != "epsilon") {
        throw UsageError("unsupported sweep parameter '" + opts.param + "'");
    }
    if (opts.values.empty()) throw UsageError("--values is required");
    if (opts.checkpoints < 1 || opts.checkpoints > opts.max_iter) {
        throw UsageError("--checkpoints must lie in [1, max_iter]");
    }
    if (opts.repeats < 1) throw UsageError("--repeats must be at least 1");
    if (opts.n_rows < 1) throw UsageError("--n must be at least 1");

    const DiscreteNetwork net = parse_bif_file(opts.network);
    std::vector<Dataset> datasets;
    for (std::size_t r = 0; r < opts.repeats; ++r) {
        Rng rng(opts.seed + r);
        datasets.push_back(forward_sample(net, opts.n_rows, rng));
    }

    const std::size_t every = opts.max_iter / opts.checkpoints;
    const std::size_t n_values = opts.values.size();
    SweepCurves curves;
    curves.auc.assign(n_values, std::vector<std::vector<double>>(opts.repeats));
    curves.best_score = curves.auc;

    std::vector<SearchConfig> configs(n_values);
    for (std::size_t v = 0; v < n_values; ++v) {
        SearchConfig& cfg = configs[v];
        cfg.max_iter = opts.max_iter;
        cfg.max_length = opts.max_length;
        cfg.theta = opts.theta;
        cfg.epsilon_explore = opts.epsilon;
        cfg.checkpoint_every = every;
        const double value = opts.values[v];
        if (opts.param == "max_length") {
            if (value < 2 || value != std::floor(value)) throw UsageError("max_length values must be integers >= 2");
            cfg.max_length = static_cast<std::size_t>(value);
        } else if (opts.param == "theta") {
            cfg.theta = value;
        } else {
            cfg.epsilon_explore = value;
        }
        try {
            cfg.validate();
        } catch (const ContractViolation& e) {
            throw UsageError(e.what());
        }
    }

    parallel_for(opts.jobs, n_values * opts.repeats, [&](std::size_t index) {
        const std::size_t v = index / opts.repeats;
        const std::size_t r = index % opts.repeats;
        SearchConfig cfg = configs[v];
        cfg.seed = opts.seed + r;
        auto& aucs = curves.auc[v][r];
        auto& scores = curves.best_score[v][r];
        SearchObserver observer;
        observer.on_checkpoint = [&](const TracePoint& point, const Dag& best) {
            if (point.iteration == 0 || point.iteration % every != 0 || point.iteration / every > opts.checkpoints) return;
            aucs.push_back(auc(confusion(best, net.dag())));
            scores.push_back(point.best_score);
        };
        run(datasets[r], cfg, observer);
    });

    std::ostringstream csv;
    csv << "param_value,iteration,mean_auc,mean_best_score\n";
    for (std::size_t v = 0; v < n_values; ++v) {
        for (std::size_t c = 0; c < opts.checkpoints; ++c) {
            std::vector<double> a, s;
            for (std::size_t r = 0; r < opts.repeats; ++r) {
                a.push_back(curves.auc[v][r][c]);
                s.push_back(curves.best_score[v][r][c]);
            }
            SweepRow row{opts.values[v], (c + 1) * every, mean_and_std(a).first, mean_and_std(s).first};
            curves.rows.push_back(row);
            csv << format_number(row.param_value) << ',' << row.iteration << ',' << format_number(row.mean_auc) << ','
                << format_number(row.mean_best_score) << '\n';
        }
    }
    if (!opts.out.empty()) write_text(opts.out, csv.str());
    return curves;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Bayesian network structure learning with a Q-table guided search"};
    app.require_subcommand(1);

    SampleOptions sample;
    auto* sample_cmd = app.add_subcommand("sample", "Forward-sample a dataset from a BIF network");
    sample_cmd->add_option("--network", sample.network, "BIF network file")->required();
    sample_cmd->add_option("--n", sample.n_rows, "Number of rows")->required();
    sample_cmd->add_option("--seed", sample.seed, "RNG seed");
    sample_cmd->add_option("--out", sample.out, "Output CSV")->required();
    sample_cmd->add_option("--schema-out", sample.schema_out, "Schema sidecar path");

    LearnOptions learn;
    std::string learn_score = "bic";
    std::size_t learn_steps = 0;
    auto* learn_cmd = app.add_subcommand("learn", "Learn a structure from a CSV dataset");
    learn_cmd->add_option("--data", learn.data, "Dataset CSV")->required();
    learn_cmd->add_option("--schema", learn.schema, "Schema JSON sidecar");
    learn_cmd->add_option("--algo", learn.algorithm.algo, "rlbayes | hc | sa");
    learn_cmd->add_option("--score", learn_score, "bic | aic | ll");
    learn_cmd->add_option("--max-iter", learn.algorithm.max_iter, "Iterations (rlbayes; default sa steps)");
    learn_cmd->add_option("--max-length", learn.algorithm.max_length, "Q-table capacity");
    learn_cmd->add_option("--theta", learn.algorithm.theta, "Transfer-to-best probability");
    learn_cmd->add_option("--epsilon", learn.algorithm.epsilon, "Exploration probability");
    learn_cmd->add_option("--seed", learn.algorithm.seed, "RNG seed");
    learn_cmd->add_option("--restarts", learn.algorithm.restarts, "Hill-climbing restarts");
    learn_cmd->add_option("--temperature", learn.algorithm.temperature, "Annealing start temperature");
    learn_cmd->add_option("--cooling", learn.algorithm.cooling, "Annealing cooling factor");
    learn_cmd->add_option("--steps", learn_steps, "Annealing steps");
    learn_cmd->add_option("--out", learn.out, "Result JSON")->required();

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a learned structure against the true network");
    eval_cmd->add_option("--result", eval.result, "Result JSON")->required();
    eval_cmd->add_option("--truth", eval.truth, "True BIF network")->required();
    eval_cmd->add_option("--out", eval.out, "Metrics JSON")->required();

    std::string bench_spec;
    std::size_t bench_jobs = 0;
    auto* bench_cmd = app.add_subcommand("bench", "Repeat algorithms over seeded datasets and summarize");
    bench_cmd->add_option("--spec", bench_spec, "Bench spec JSON")->required();
    bench_cmd->add_option("--jobs", bench_jobs, "Parallel runs (overrides the spec)");

    SweepOptions sweep;
    std::string sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Best-so-far AUC curves across a parameter");
    sweep_cmd->add_option("--network", sweep.network, "BIF network file")->required();
    sweep_cmd->add_option("--param", sweep.param, "max_length | theta | epsilon");
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep_cmd->add_option("--max-iter", sweep.max_iter, "Iterations per run");
    sweep_cmd->add_option("--checkpoints", sweep.checkpoints, "Curve points per run");
    sweep_cmd->add_option("--repeats", sweep.repeats, "Seeds per value");
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed");
    sweep_cmd->add_option("--n", sweep.n_rows, "Rows per dataset");
    sweep_cmd->add_option("--max-length", sweep.max_length, "Q-table capacity when not swept");
    sweep_cmd->add_option("--theta", sweep.theta, "Transfer probability when not swept");
    sweep_cmd->add_option("--epsilon", sweep.epsilon, "Exploration probability when not swept");
    sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel runs");
    sweep_cmd->add_option("--out", sweep.out, "Curve CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sample_cmd) {
            cmd_sample(sample);
        } else if (*learn_cmd) {
            const auto kind = parse_score_kind(learn_score);
            if (!kind) throw UsageError("unknown score '" + learn_score + "'");
            learn.algorithm.score = *kind;
            if (learn_steps > 0) learn.algorithm.steps = learn_steps;
            cmd_learn(learn);
        } else if (*eval_cmd) {
            const Evaluation ev = cmd_eval(eval);
            std::cout << "f1=" << ev.f1 << " auc=" << ev.auc << " shd=" << ev.shd << '\n';
        } else if (*bench_cmd) {
            BenchSpec spec = read_bench_spec(bench_spec);
            if (bench_jobs > 0) spec.jobs = bench_jobs;
            const BenchReport report = cmd_bench(spec);
            for (const auto& row : report.summary) {
                std::cout << row.algorithm << ' ' << row.metric << ' ' << row.mean << " +- " << row.std << '\n';
            }
        } else if (*sweep_cmd) {
            sweep.values = parse_value_list(sweep_values);
            cmd_sweep(sweep);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}

}  // namespace rlbayes::cli
