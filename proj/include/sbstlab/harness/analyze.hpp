#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbstlab/harness/experiment.hpp"
#include "sbstlab/stats/stats.hpp"

namespace sbstlab::harness {

struct ProfileRow {
    double recall = 0.0;
    double precision = 0.0;
    double mean_bugs = 0.0;
    double sd_bugs = 0.0;
    int n = 0;
    double skipped_fraction = 0.0; // over (pair, sim) slots
};

struct KsRow {
    double recall = 0.0;
    double precision = 0.0;
    std::optional<double> d;
    std::optional<double> p;
    std::string note; // "ok" or why the test was not applicable
};

struct StratumReport {
    std::optional<stats::WelchResult> welch;
    double epsilon_squared = -1.0;
    std::string note;
};

struct StatsReport {
    stats::AnovaTable anova;
    double eps2_recall = 0.0;
    double eps2_precision = 0.0;
    std::vector<KsRow> ks;
    std::optional<stats::BartlettResult> bartlett;
    std::string bartlett_note;
    StratumReport single_site;
    StratumReport multi_site;
    std::vector<stats::PairwiseRow> pairwise_recall;
    std::vector<ProfileRow> profile;
    // Adjacent-pair mean decreases along increasing recall, per precision.
    std::vector<std::pair<double, int>> monotone_violations;
};

/// Runs the full analysis over the datasets written by run_experiment and
/// emits report files (CSV + plain text) under `report_dir`.
StatsReport analyze(const std::filesystem::path& results_dir,
                    const std::filesystem::path& report_dir);

/// In-memory variant for callers that already hold the rows.
StatsReport analyze_rows(const std::vector<CellRow>& rows,
                         const std::vector<AggregateRow>& aggregates);

void write_report_files(const StatsReport& report, const std::filesystem::path& report_dir);

} // namespace sbstlab::harness
