#include "sbstlab/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "sbstlab/errors.hpp"
#include "sbstlab/evaluation/evaluation.hpp"

namespace sbstlab::harness {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string cell_dir_name(double recall, double precision) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "r%03d_p%03d", static_cast<int>(std::lround(recall * 100)),
                  static_cast<int>(std::lround(precision * 100)));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << content;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json value_to_json(const minilang::Value& v) {
    if (v.type == minilang::Type::Bool) return v.raw != 0;
    return v.raw;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    ExperimentConfig c;
    c.corpus_dir = j.at("corpus").get<std::string>();
    if (j.contains("grid")) {
        c.grid.clear();
        for (const auto& cell : j["grid"])
            c.grid.emplace_back(cell.at("precision").get<double>(),
                                cell.at("recall").get<double>());
    }
    c.n_sims = j.value("n_sims", c.n_sims);
    c.n_runs = j.value("n_runs", c.n_runs);
    c.budget = j.value("budget", c.budget);
    c.master_seed = j.value("seed", c.master_seed);
    c.jobs = j.value("jobs", c.jobs);
    c.per_pair_measure = j.value("per_pair_measure", c.per_pair_measure);
    if (j.contains("search")) {
        const auto& s = j["search"];
        c.search.population = s.value("population", c.search.population);
        c.search.crossover_rate = s.value("crossover_rate", c.search.crossover_rate);
        c.search.entry_reassign_rate = s.value("entry_reassign_rate", c.search.entry_reassign_rate);
        c.search.gaussian_sigma = s.value("gaussian_sigma", c.search.gaussian_sigma);
        c.search.archive_cap = s.value("archive_cap", c.search.archive_cap);
        c.search.limits.max_steps = s.value("max_steps", c.search.limits.max_steps);
        c.search.limits.max_call_depth = s.value("max_call_depth", c.search.limits.max_call_depth);
    }
    if (c.n_sims < 1 || c.n_runs < 1 || c.grid.empty() || c.budget <= 0)
        throw Error(ErrorCode::ConfigError, "n_sims/n_runs >= 1, non-empty grid, budget > 0");
    return c;
}

std::string ExperimentConfig::fingerprint() const {
    std::string s = "v1;seed=" + std::to_string(master_seed) + ";budget=" + std::to_string(budget) +
                    ";sims=" + std::to_string(n_sims) + ";runs=" + std::to_string(n_runs) +
                    ";pop=" + std::to_string(search.population) +
                    ";xo=" + fmt_double(search.crossover_rate) +
                    ";er=" + fmt_double(search.entry_reassign_rate) +
                    ";sigma=" + fmt_double(search.gaussian_sigma) +
                    ";cap=" + std::to_string(search.archive_cap) +
                    ";steps=" + std::to_string(search.limits.max_steps) +
                    ";depth=" + std::to_string(search.limits.max_call_depth) + ";grid=";
    for (const auto& [p, r] : grid) s += fmt_double(p) + "x" + fmt_double(r) + ",";
    return hex64(fnv1a(s));
}

// --- bucket simulation ------------------------------------------------------

namespace {

/// Concatenated ground truth across the corpus (the per-project analog) and
/// the per-pair offsets into it.
struct Bucket {
    predictor::GroundTruth truth;
    std::vector<std::size_t> offset; // by pair index
};

Bucket make_bucket(const faults::Corpus& corpus) {
    Bucket b;
    for (const auto& pair : corpus.pairs) {
        b.offset.push_back(b.truth.labels.size());
        b.truth.labels.insert(b.truth.labels.end(), pair.ground_truth.begin(),
                              pair.ground_truth.end());
    }
    return b;
}

struct SimulatedCell {
    predictor::Classification classification; // over the whole bucket
    predictor::MeasuredRates realized;
    std::uint64_t seed = 0;
};

SimulatedCell simulate_cell(const Bucket& bucket, double recall, double precision,
                            std::uint64_t master_seed, int grid_index, int sim) {
    SimulatedCell cell;
    cell.seed = derive_seed(master_seed, "sim",
                            {static_cast<std::uint64_t>(grid_index), static_cast<std::uint64_t>(sim)});
    Rng rng(cell.seed);
    cell.classification = predictor::simulate(bucket.truth, recall, precision, rng);
    cell.realized = predictor::measure(bucket.truth, cell.classification.labels);
    return cell;
}

std::vector<std::uint8_t> slice_labels(const SimulatedCell& cell, const Bucket& bucket,
                                       std::size_t pair_index, std::size_t pair_fns) {
    const std::size_t off = bucket.offset[pair_index];
    return std::vector<std::uint8_t>(cell.classification.labels.begin() + static_cast<long>(off),
                                     cell.classification.labels.begin() +
                                         static_cast<long>(off + pair_fns));
}

} // namespace

std::vector<std::uint8_t> cell_classification(const faults::Corpus& corpus, std::size_t pair_index,
                                              double recall, double precision,
                                              std::uint64_t master_seed, int grid_index, int sim,
                                              predictor::MeasuredRates* bucket_rates) {
    const Bucket bucket = make_bucket(corpus);
    const SimulatedCell cell = simulate_cell(bucket, recall, precision, master_seed, grid_index, sim);
    if (bucket_rates) *bucket_rates = cell.realized;
    return slice_labels(cell, bucket, pair_index,
                        corpus.pairs[pair_index].fixed.functions.size());
}

// --- artifacts ---------------------------------------------------------------

void save_suite_json(const std::filesystem::path& path, const minilang::Program& program,
                     const search::SearchResult& result, const std::string& pair_id,
                     std::uint64_t seed, std::int64_t budget, const std::string& fingerprint) {
    json j;
    j["schema"] = 1;
    j["pair"] = pair_id;
    j["seed"] = seed;
    j["budget"] = budget;
    j["fingerprint"] = fingerprint;
    j["status"] = result.status == search::RunStatus::Skipped ? "skipped" : "completed";
    j["evaluations"] = result.stats.evaluations;
    j["iterations"] = result.stats.iterations;
    j["covered_targets"] = result.stats.covered_filtered;
    j["filtered_targets"] = result.stats.filtered_targets;
    json sizes = json::object();
    for (const auto& [target, n] : result.stats.archive_sizes)
        sizes[std::to_string(target)] = n;
    j["archive_sizes"] = sizes;
    json tests = json::array();
    for (const auto& t : result.suite) {
        json args = json::array();
        for (const auto& v : t.args) args.push_back(value_to_json(v));
        tests.push_back(
            {{"entry", program.functions[static_cast<std::size_t>(t.entry)].name},
             {"args", args}});
    }
    j["tests"] = tests;
    write_text(path, j.dump(2) + "\n");
}

std::vector<search::TestCase> load_suite_json(const std::filesystem::path& path,
                                              const minilang::Program& program,
                                              std::string* status, std::string* fingerprint) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    if (status) *status = j.value("status", "completed");
    if (fingerprint) *fingerprint = j.value("fingerprint", "");
    std::vector<search::TestCase> suite;
    for (const auto& t : j.at("tests")) {
        search::TestCase tc;
        const std::string entry_name = t.at("entry").get<std::string>();
        const minilang::Function* fn = program.find(entry_name);
        if (!fn)
            throw Error(ErrorCode::InvalidTest, "suite references unknown entry " + entry_name);
        tc.entry = fn->id;
        for (std::size_t i = 0; i < t.at("args").size(); ++i) {
            const auto& a = t.at("args")[i];
            if (a.is_boolean()) tc.args.push_back(minilang::Value::of_bool(a.get<bool>()));
            else tc.args.push_back(minilang::Value::of_int(a.get<std::int64_t>()));
        }
        suite.push_back(std::move(tc));
    }
    return suite;
}

namespace {

void save_prediction_json(const std::filesystem::path& path, const SimulatedCell& cell,
                          const faults::Corpus& corpus, const Bucket& bucket, double recall,
                          double precision) {
    json j;
    j["schema"] = 1;
    j["requested"] = {{"recall", recall}, {"precision", precision}};
    j["realized"] = {{"tp", cell.realized.tp},
                     {"fp", cell.realized.fp},
                     {"fn", cell.realized.fn},
                     {"recall", cell.realized.recall}};
    if (cell.realized.precision) j["realized"]["precision"] = *cell.realized.precision;
    j["seed"] = cell.seed;
    json pairs = json::array();
    for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
        const auto labels =
            slice_labels(cell, bucket, i, corpus.pairs[i].fixed.functions.size());
        pairs.push_back({{"pair", corpus.pairs[i].id}, {"labels", labels}});
    }
    j["pairs"] = pairs;
    write_text(path, j.dump(2) + "\n");
}

void save_verdict_json(const std::filesystem::path& path, const evaluation::SuiteVerdict& verdict,
                       const std::vector<search::TestCase>& suite,
                       const minilang::Program& program, const std::string& fingerprint) {
    json j;
    j["schema"] = 1;
    j["fingerprint"] = fingerprint;
    j["detected"] = verdict.detected;
    j["reason"] = verdict.reason;
    j["invalid_tests"] = verdict.invalid_tests;
    if (verdict.first_detecting >= 0) {
        j["first_detecting_test"] = verdict.first_detecting;
        const auto& t = suite[static_cast<std::size_t>(verdict.first_detecting)];
        json args = json::array();
        for (const auto& v : t.args) args.push_back(value_to_json(v));
        j["witness"] = {{"entry", program.functions[static_cast<std::size_t>(t.entry)].name},
                        {"args", args}};
    }
    j["per_test"] = verdict.per_test;
    write_text(path, j.dump(2) + "\n");
}

struct Task {
    int grid_index;
    int sim;
    int run;
    std::size_t pair_index;
};

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir, bool quiet) {
    const faults::Corpus corpus = faults::load_corpus(config.corpus_dir);
    if (corpus.pairs.empty()) throw Error(ErrorCode::CorpusInvalid, "corpus has no pairs");
    const Bucket bucket = make_bucket(corpus);
    const std::string config_fp =
        hex64(fnv1a(config.fingerprint() + ";corpus=" + std::to_string(corpus.master_seed) + "/" +
                    std::to_string(corpus.pairs.size())));

    std::filesystem::create_directories(out_dir);

    // Shared immutable per-pair structures.
    std::vector<cdg::ProgramCdg> pcs;
    pcs.reserve(corpus.pairs.size());
    for (const auto& pair : corpus.pairs) pcs.push_back(cdg::collect_targets(pair.buggy));

    // Simulations are cheap: do them up front, serially.
    std::vector<std::vector<SimulatedCell>> sims(config.grid.size());
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
        const auto [precision, recall] = config.grid[gi];
        for (int si = 0; si < config.n_sims; ++si) {
            sims[gi].push_back(simulate_cell(bucket, recall, precision, config.master_seed,
                                             static_cast<int>(gi), si));
            const auto dir = out_dir / "cells" / cell_dir_name(recall, precision) /
                             ("sim" + std::to_string(si));
            save_prediction_json(dir / "prediction.json", sims[gi].back(), corpus, bucket, recall,
                                 precision);
        }
    }

    std::vector<Task> tasks;
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi)
        for (int si = 0; si < config.n_sims; ++si)
            for (int ri = 0; ri < config.n_runs; ++ri)
                for (std::size_t pi = 0; pi < corpus.pairs.size(); ++pi)
                    tasks.push_back({static_cast<int>(gi), si, ri, pi});

    ExperimentResult result;
    result.rows.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> resumed{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& task = tasks[idx];
            try {
                const auto [precision, recall] = config.grid[static_cast<std::size_t>(task.grid_index)];
                const auto& pair = corpus.pairs[task.pair_index];
                const auto& pc = pcs[task.pair_index];
                const SimulatedCell& sim =
                    sims[static_cast<std::size_t>(task.grid_index)][static_cast<std::size_t>(task.sim)];
                const auto labels =
                    slice_labels(sim, bucket, task.pair_index, pair.fixed.functions.size());

                const std::uint64_t run_seed = derive_seed(
                    config.master_seed, "run",
                    {static_cast<std::uint64_t>(task.grid_index), static_cast<std::uint64_t>(task.sim),
                     static_cast<std::uint64_t>(task.run), static_cast<std::uint64_t>(task.pair_index)});

                const auto run_dir = out_dir / "cells" / cell_dir_name(recall, precision) /
                                     ("sim" + std::to_string(task.sim)) /
                                     ("run" + std::to_string(task.run)) / pair.id;
                const auto suite_path = run_dir / "suite.json";
                const auto verdict_path = run_dir / "verdict.json";

                std::vector<search::TestCase> suite;
                std::string status;
                bool reused = false;
                if (std::filesystem::exists(suite_path) && std::filesystem::exists(verdict_path)) {
                    std::string stored_fp;
                    try {
                        suite = load_suite_json(suite_path, pair.buggy, &status, &stored_fp);
                        reused = stored_fp == config_fp;
                    } catch (const Error&) {
                        reused = false;
                    }
                }

                search::SearchResult search_result;
                if (!reused) {
                    search_result = search::run_search(pair.buggy, pc, labels, config.budget,
                                                       run_seed, config.search);
                    save_suite_json(suite_path, pair.buggy, search_result, pair.id, run_seed,
                                    config.budget, config_fp);
                    suite = search_result.suite;
                    status = search_result.status == search::RunStatus::Skipped ? "skipped"
                                                                                : "completed";
                } else {
                    ++resumed;
                }

                evaluation::SuiteVerdict verdict = evaluation::suite_detects(
                    {pair.fixed, pair.buggy, pair.ground_truth, pair.sites}, suite,
                    config.search.limits);
                if (status == "skipped") verdict.reason = "skipped";
                save_verdict_json(verdict_path, verdict, suite, pair.buggy, config_fp);

                CellRow row;
                row.recall = recall;
                row.precision = precision;
                row.sim = task.sim;
                row.run = task.run;
                row.pair = pair.id;
                row.site_count = pair.site_count;
                row.status = status;
                row.detected = verdict.detected;
                if (!reused) {
                    row.evaluations = search_result.stats.evaluations;
                    row.covered = search_result.stats.covered_filtered;
                } else {
                    json j = json::parse(read_text(suite_path));
                    row.evaluations = j.value("evaluations", std::int64_t{0});
                    row.covered = j.value("covered_targets", 0);
                }
                if (config.per_pair_measure) {
                    predictor::GroundTruth pair_truth{pair.ground_truth};
                    const auto rates = predictor::measure(pair_truth, labels);
                    row.realized_recall = rates.recall;
                    row.realized_precision = rates.precision.value_or(-1.0);
                } else {
                    row.realized_recall = sim.realized.recall;
                    row.realized_precision = sim.realized.precision.value_or(-1.0);
                }
                result.rows[idx] = std::move(row);
            } catch (const std::exception& e) {
                failed = true;
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };

    const int width = std::max(1, config.jobs);
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < width; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }

    result.resumed = resumed.load();
    result.partial = failed.load();
    if (result.partial) {
        if (!quiet) std::fprintf(stderr, "experiment incomplete: %s\n", first_error.c_str());
        std::vector<CellRow> kept;
        for (auto& row : result.rows)
            if (!row.pair.empty()) kept.push_back(std::move(row));
        result.rows = std::move(kept);
        write_results_csv(out_dir / "results.csv", result.rows);
        return result;
    }

    // Aggregates: bugs found per (grid, sim, run), stratified by site count.
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
        const auto [precision, recall] = config.grid[gi];
        for (int si = 0; si < config.n_sims; ++si) {
            for (int ri = 0; ri < config.n_runs; ++ri) {
                AggregateRow agg;
                agg.recall = recall;
                agg.precision = precision;
                agg.sim = si;
                agg.run = ri;
                result.aggregates.push_back(agg);
            }
        }
    }
    const std::size_t runs_per_grid =
        static_cast<std::size_t>(config.n_sims) * static_cast<std::size_t>(config.n_runs);
    for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
        const Task& task = tasks[idx];
        const CellRow& row = result.rows[idx];
        if (!row.detected) continue;
        auto& agg = result.aggregates[static_cast<std::size_t>(task.grid_index) * runs_per_grid +
                                      static_cast<std::size_t>(task.sim) *
                                          static_cast<std::size_t>(config.n_runs) +
                                      static_cast<std::size_t>(task.run)];
        ++agg.bugs_found;
        if (row.site_count <= 1) ++agg.bugs_single;
        else ++agg.bugs_multi;
    }

    write_results_csv(out_dir / "results.csv", result.rows);
    write_aggregates_csv(out_dir / "aggregates.csv", result.aggregates);
    return result;
}

// --- CSV ----------------------------------------------------------------------

void write_results_csv(const std::filesystem::path& path, const std::vector<CellRow>& rows) {
    std::string out = "# schema=1 sbstlab results\n";
    out += "recall,precision,sim,run,pair,site_count,status,detected,evaluations,covered,"
           "realized_recall,realized_precision\n";
    for (const auto& r : rows) {
        out += fmt_double(r.recall) + "," + fmt_double(r.precision) + "," + std::to_string(r.sim) +
               "," + std::to_string(r.run) + "," + r.pair + "," + std::to_string(r.site_count) +
               "," + r.status + "," + (r.detected ? "1" : "0") + "," +
               std::to_string(r.evaluations) + "," + std::to_string(r.covered) + "," +
               fmt_double(r.realized_recall) + "," + fmt_double(r.realized_precision) + "\n";
    }
    write_text(path, out);
}

void write_aggregates_csv(const std::filesystem::path& path,
                          const std::vector<AggregateRow>& rows) {
    std::string out = "# schema=1 sbstlab aggregates\n";
    out += "recall,precision,sim,run,bugs_found,bugs_single,bugs_multi\n";
    for (const auto& r : rows) {
        out += fmt_double(r.recall) + "," + fmt_double(r.precision) + "," + std::to_string(r.sim) +
               "," + std::to_string(r.run) + "," + std::to_string(r.bugs_found) + "," +
               std::to_string(r.bugs_single) + "," + std::to_string(r.bugs_multi) + "\n";
    }
    write_text(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::size_t expected_cols) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IncompleteDataset, "missing " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true; // column header
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != expected_cols)
            throw Error(ErrorCode::IncompleteDataset,
                        path.string() + ": bad row '" + line + "'");
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

std::vector<CellRow> read_results_csv(const std::filesystem::path& path) {
    std::vector<CellRow> out;
    for (const auto& f : read_csv(path, 12)) {
        CellRow r;
        r.recall = std::stod(f[0]);
        r.precision = std::stod(f[1]);
        r.sim = std::stoi(f[2]);
        r.run = std::stoi(f[3]);
        r.pair = f[4];
        r.site_count = std::stoi(f[5]);
        r.status = f[6];
        r.detected = f[7] == "1";
        r.evaluations = std::stoll(f[8]);
        r.covered = std::stoi(f[9]);
        r.realized_recall = std::stod(f[10]);
        r.realized_precision = std::stod(f[11]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AggregateRow> read_aggregates_csv(const std::filesystem::path& path) {
    std::vector<AggregateRow> out;
    for (const auto& f : read_csv(path, 7)) {
        AggregateRow r;
        r.recall = std::stod(f[0]);
        r.precision = std::stod(f[1]);
        r.sim = std::stoi(f[2]);
        r.run = std::stoi(f[3]);
        r.bugs_found = std::stoi(f[4]);
        r.bugs_single = std::stoi(f[5]);
        r.bugs_multi = std::stoi(f[6]);
        out.push_back(r);
    }
    return out;
}

} // namespace sbstlab::harness
