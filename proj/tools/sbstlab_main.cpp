// sbstlab command line: corpus generation, predictor simulation, single
// search cells, full experiment sweeps, statistical analysis, and suite
// replay. Exit codes: 0 success, 2 usage, 3 data error, 4 partial results.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbstlab/errors.hpp"
#include "sbstlab/evaluation/evaluation.hpp"
#include "sbstlab/faults/corpus.hpp"
#include "sbstlab/harness/analyze.hpp"
#include "sbstlab/harness/experiment.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/minilang/printer.hpp"

using namespace sbstlab;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::pair<int, int>> parse_site_plan(const std::string& text, int n) {
    // "1xN" fills; "1x30,3x30" allocates exactly.
    std::vector<std::pair<int, int>> plan;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        const auto x = token.find('x');
        if (x == std::string::npos)
            throw Error(ErrorCode::ConfigError, "site plan entry '" + token + "' is not SxN");
        plan.emplace_back(std::stoi(token.substr(0, x)), std::stoi(token.substr(x + 1)));
    }
    if (plan.empty()) plan = {{1, n}};
    return plan;
}

faults::CorpusPair& find_pair(faults::Corpus& corpus, const std::string& id) {
    for (auto& pair : corpus.pairs)
        if (pair.id == id) return pair;
    throw Error(ErrorCode::CorpusInvalid, "no pair '" + id + "' in corpus");
}

int grid_index_of(const std::vector<std::pair<double, double>>& grid, double precision,
                  double recall) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i].first == precision && grid[i].second == recall) return static_cast<int>(i);
    throw Error(ErrorCode::ConfigError, "(precision, recall) not on the configured grid");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"defect-prediction-guided search-based test generation lab"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may appear after the subcommand

    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    // --- gen-corpus ---------------------------------------------------------
    auto* gen = app.add_subcommand("gen-corpus", "generate a corpus of buggy/fixed pairs");
    std::string gen_out = "corpus";
    int gen_n = 60;
    int fns_min = 3, fns_max = 6, depth_min = 1, depth_max = 3;
    std::string site_plan = "";
    int detect_samples = 10000;
    std::uint64_t gen_seed = 1;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--n", gen_n, "number of pairs");
    gen->add_option("--fns-min", fns_min);
    gen->add_option("--fns-max", fns_max);
    gen->add_option("--depth-min", depth_min);
    gen->add_option("--depth-max", depth_max);
    gen->add_option("--site-plan", site_plan, "e.g. 1x30,3x30 (default 1 site everywhere)");
    gen->add_option("--detect-samples", detect_samples);
    gen->add_option("--seed", gen_seed);

    // --- simulate-predictor ---------------------------------------------------
    auto* sim = app.add_subcommand("simulate-predictor", "one classification over a corpus bucket");
    std::string sim_corpus, sim_out = "prediction.json";
    double sim_recall = 1.0, sim_precision = 1.0;
    std::uint64_t sim_seed = 1;
    sim->add_option("--corpus", sim_corpus)->required();
    sim->add_option("--recall", sim_recall)->required();
    sim->add_option("--precision", sim_precision)->required();
    sim->add_option("--seed", sim_seed);
    sim->add_option("--out", sim_out);

    // --- run -------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "one (pair, recall, precision, sim, run) cell");
    std::string run_corpus, run_pair, run_out = "cell_out";
    double run_recall = 1.0, run_precision = 1.0;
    int run_sim = 0, run_run = 0, run_grid_index = -1;
    std::int64_t run_budget = 20000;
    std::uint64_t run_seed = 1;
    run->add_option("--corpus", run_corpus)->required();
    run->add_option("--pair", run_pair)->required();
    run->add_option("--recall", run_recall);
    run->add_option("--precision", run_precision);
    run->add_option("--sim", run_sim, "simulation repetition index");
    run->add_option("--run", run_run, "search repetition index");
    run->add_option("--grid-index", run_grid_index,
                    "grid position for seed derivation (default: position of "
                    "(precision, recall) on the standard 12-point grid)");
    run->add_option("--budget", run_budget);
    run->add_option("--seed", run_seed, "master seed (cell seeds derive from it)");
    run->add_option("--out", run_out);

    // --- experiment --------------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "full grid sweep from a config file");
    std::string exp_config, exp_out = "out";
    int exp_jobs = 0;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    exp->add_option("--config", exp_config)->required();
    exp->add_option("--out", exp_out);
    exp->add_option("--jobs", exp_jobs, "worker threads (overrides config)");
    exp->add_option("--seed", exp_seed, "master seed (overrides config)")
        ->each([&](const std::string&) { exp_seed_set = true; });

    // --- analyze -------------------------------------------------------------------
    auto* ana = app.add_subcommand("analyze", "statistics over experiment results");
    std::string ana_results, ana_out;
    ana->add_option("--results", ana_results)->required();
    ana->add_option("--out", ana_out, "report directory (default <results>/report)");

    // --- replay ---------------------------------------------------------------------
    auto* rep = app.add_subcommand("replay", "re-execute a stored suite against a pair");
    std::string rep_corpus, rep_pair, rep_suite;
    rep->add_option("--corpus", rep_corpus)->required();
    rep->add_option("--pair", rep_pair)->required();
    rep->add_option("--suite", rep_suite)->required();

    // --- inspect -------------------------------------------------------------------
    auto* ins = app.add_subcommand("inspect", "parse a program, list functions and targets");
    std::string ins_file;
    bool ins_dot = false;
    ins->add_option("program", ins_file, "a .mlp source file")->required();
    ins->add_flag("--dot", ins_dot, "dump control dependency graphs as DOT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            faults::GenParams params;
            params.n_programs = gen_n;
            params.fns_min = fns_min;
            params.fns_max = fns_max;
            params.depth_min = depth_min;
            params.depth_max = depth_max;
            params.detect_samples = detect_samples;
            params.master_seed = gen_seed;
            params.site_plan = parse_site_plan(site_plan, gen_n);
            const auto records = faults::gen_corpus(params);
            faults::save_corpus(gen_out, records, params);
            if (!quiet)
                std::printf("wrote %zu pairs to %s\n", records.size(), gen_out.c_str());
        } else if (sim->parsed()) {
            faults::Corpus corpus = faults::load_corpus(sim_corpus);
            predictor::GroundTruth truth;
            for (const auto& pair : corpus.pairs)
                truth.labels.insert(truth.labels.end(), pair.ground_truth.begin(),
                                    pair.ground_truth.end());
            Rng rng(sim_seed);
            const auto c = predictor::simulate(truth, sim_recall, sim_precision, rng);
            const auto rates = predictor::measure(truth, c.labels);
            nlohmann::json j;
            j["schema"] = 1;
            j["requested"] = {{"recall", sim_recall}, {"precision", sim_precision}};
            j["realized"] = {{"tp", rates.tp}, {"fp", rates.fp}, {"fn", rates.fn},
                             {"recall", rates.recall}};
            if (rates.precision) j["realized"]["precision"] = *rates.precision;
            j["seed"] = sim_seed;
            j["labels"] = c.labels;
            std::ofstream out(sim_out, std::ios::binary);
            out << j.dump(2) << "\n";
            if (!quiet) std::printf("wrote %s\n", sim_out.c_str());
        } else if (run->parsed()) {
            faults::Corpus corpus = faults::load_corpus(run_corpus);
            auto& pair = find_pair(corpus, run_pair);
            std::size_t pair_index = 0;
            for (std::size_t i = 0; i < corpus.pairs.size(); ++i)
                if (corpus.pairs[i].id == run_pair) pair_index = i;
            const int gi = run_grid_index >= 0
                               ? run_grid_index
                               : grid_index_of(predictor::config_grid(), run_precision, run_recall);
            const auto labels = harness::cell_classification(corpus, pair_index, run_recall,
                                                             run_precision, run_seed, gi, run_sim);
            const std::uint64_t search_seed = derive_seed(
                run_seed, "run",
                {static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(run_sim),
                 static_cast<std::uint64_t>(run_run), static_cast<std::uint64_t>(pair_index)});
            const auto pc = cdg::collect_targets(pair.buggy);
            const auto result =
                search::run_search(pair.buggy, pc, labels, run_budget, search_seed, {});
            std::filesystem::create_directories(run_out);
            harness::save_suite_json(std::filesystem::path(run_out) / "suite.json", pair.buggy,
                                     result, pair.id, search_seed, run_budget, "standalone");
            const auto verdict = evaluation::suite_detects(
                {pair.fixed, pair.buggy, pair.ground_truth, pair.sites}, result.suite);
            if (!quiet)
                std::printf("status=%s suite=%zu detected=%d\n",
                            result.status == search::RunStatus::Skipped ? "skipped" : "completed",
                            result.suite.size(), verdict.detected ? 1 : 0);
        } else if (exp->parsed()) {
            harness::ExperimentConfig config =
                harness::ExperimentConfig::from_json_file(exp_config);
            if (exp_jobs > 0) config.jobs = exp_jobs;
            if (exp_seed_set) config.master_seed = exp_seed;
            const auto result = harness::run_experiment(config, exp_out, quiet);
            if (!quiet)
                std::printf("rows=%zu aggregates=%zu resumed=%d%s\n", result.rows.size(),
                            result.aggregates.size(), result.resumed,
                            result.partial ? " (PARTIAL)" : "");
            if (result.partial) return 4;
        } else if (ana->parsed()) {
            const std::filesystem::path results_dir = ana_results;
            const std::filesystem::path report_dir =
                ana_out.empty() ? results_dir / "report" : std::filesystem::path(ana_out);
            harness::analyze(results_dir, report_dir);
            if (!quiet) std::printf("report written to %s\n", report_dir.string().c_str());
        } else if (rep->parsed()) {
            faults::Corpus corpus = faults::load_corpus(rep_corpus);
            auto& pair = find_pair(corpus, rep_pair);
            const auto suite = harness::load_suite_json(rep_suite, pair.buggy);
            const auto verdict = evaluation::suite_detects(
                {pair.fixed, pair.buggy, pair.ground_truth, pair.sites}, suite);
            std::printf("tests=%zu detected=%d first_detecting=%d invalid=%d\n", suite.size(),
                        verdict.detected ? 1 : 0, verdict.first_detecting, verdict.invalid_tests);
            for (std::size_t i = 0; i < verdict.per_test.size(); ++i)
                if (verdict.per_test[i]) std::printf("  test %zu detects\n", i);
        } else if (ins->parsed()) {
            const auto program = minilang::parse_program(read_file(ins_file), ins_file);
            const auto pc = cdg::collect_targets(program);
            std::printf("functions=%d targets=%zu\n", program.function_count(), pc.table.size());
            for (const auto& info : minilang::list_functions(program)) {
                std::printf("  [%d] %s/%d\n", info.id, info.name.c_str(), info.arity);
            }
            if (ins_dot)
                for (const auto& graph : pc.cdgs)
                    std::fputs(cdg::to_dot(graph, program).c_str(), stdout);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
