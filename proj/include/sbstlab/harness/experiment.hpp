#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbstlab/faults/corpus.hpp"
#include "sbstlab/predictor/predictor.hpp"
#include "sbstlab/search/search.hpp"

namespace sbstlab::harness {

struct ExperimentConfig {
    std::string corpus_dir;
    std::vector<std::pair<double, double>> grid = predictor::config_grid(); // (precision, recall)
    int n_sims = 5;
    int n_runs = 5;
    std::int64_t budget = 20000;
    std::uint64_t master_seed = 1;
    int jobs = 1;
    bool per_pair_measure = false; // realized rates per pair instead of per bucket
    search::SearchParams search;

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    std::string fingerprint() const; // hash of everything that defines the outputs
};

struct CellRow {
    double recall = 0.0;
    double precision = 0.0;
    int sim = 0;
    int run = 0;
    std::string pair;
    int site_count = 1;
    std::string status; // "completed" / "skipped"
    bool detected = false;
    std::int64_t evaluations = 0;
    int covered = 0;
    double realized_recall = -1.0;
    double realized_precision = -1.0;
};

struct AggregateRow {
    double recall = 0.0;
    double precision = 0.0;
    int sim = 0;
    int run = 0;
    int bugs_found = 0;
    int bugs_single = 0; // pairs with one buggy function
    int bugs_multi = 0;
};

struct ExperimentResult {
    std::vector<CellRow> rows;
    std::vector<AggregateRow> aggregates;
    bool partial = false;
    int resumed = 0; // cells loaded from existing artifacts
};

/// Full sweep: for every grid point, n_sims predictor simulations over the
/// corpus-wide ground truth, n_runs searches per simulation and pair,
/// differential verdicts, and per-(config, sim, run) aggregates. Artifacts
/// land under `out_dir`; completed cells found on disk are reused.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir, bool quiet = true);

/// Re-derives the classification slice one pair sees inside the bucket
/// simulation for a given cell; used by the `run` subcommand so a single
/// cell reproduces the sweep bit-for-bit.
std::vector<std::uint8_t> cell_classification(const faults::Corpus& corpus, std::size_t pair_index,
                                              double recall, double precision,
                                              std::uint64_t master_seed, int grid_index, int sim,
                                              predictor::MeasuredRates* bucket_rates = nullptr);

// --- artifact serialization (suite.json / prediction.json / verdict.json) --

void save_suite_json(const std::filesystem::path& path, const minilang::Program& program,
                     const search::SearchResult& result, const std::string& pair_id,
                     std::uint64_t seed, std::int64_t budget, const std::string& fingerprint);

std::vector<search::TestCase> load_suite_json(const std::filesystem::path& path,
                                              const minilang::Program& program,
                                              std::string* status = nullptr,
                                              std::string* fingerprint = nullptr);

void write_results_csv(const std::filesystem::path& path, const std::vector<CellRow>& rows);
void write_aggregates_csv(const std::filesystem::path& path,
                          const std::vector<AggregateRow>& rows);
std::vector<CellRow> read_results_csv(const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregates_csv(const std::filesystem::path& path);

} // namespace sbstlab::harness
