#include "sbstlab/harness/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "sbstlab/errors.hpp"

namespace sbstlab::harness {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v, const char* spec = "%.6g") {
    return v ? fmt(*v, spec) : std::string("-");
}

std::vector<double> sorted_unique(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << content;
}

} // namespace

StatsReport analyze_rows(const std::vector<CellRow>& rows,
                         const std::vector<AggregateRow>& aggregates) {
    if (rows.empty() || aggregates.empty())
        throw Error(ErrorCode::IncompleteDataset, "no observations to analyze");

    StatsReport report;

    std::vector<double> recalls, precisions;
    for (const auto& a : aggregates) {
        recalls.push_back(a.recall);
        precisions.push_back(a.precision);
    }
    recalls = sorted_unique(recalls);
    precisions = sorted_unique(precisions);

    // Factorial sample of bugs-found counts.
    stats::FactorialSample sample;
    sample.recall_levels = recalls;
    sample.precision_levels = precisions;
    sample.cells.assign(recalls.size(), std::vector<std::vector<double>>(precisions.size()));
    for (const auto& a : aggregates) {
        const auto ri = static_cast<std::size_t>(
            std::find(recalls.begin(), recalls.end(), a.recall) - recalls.begin());
        const auto pi = static_cast<std::size_t>(
            std::find(precisions.begin(), precisions.end(), a.precision) - precisions.begin());
        sample.cells[ri][pi].push_back(static_cast<double>(a.bugs_found));
    }

    report.anova = stats::two_way_anova(sample);
    report.eps2_recall = stats::epsilon_squared(report.anova, stats::Effect::Recall);
    report.eps2_precision = stats::epsilon_squared(report.anova, stats::Effect::Precision);

    // Normality per cell; degenerate cells are reported, not fatal.
    for (std::size_t ri = 0; ri < recalls.size(); ++ri) {
        for (std::size_t pi = 0; pi < precisions.size(); ++pi) {
            KsRow row;
            row.recall = recalls[ri];
            row.precision = precisions[pi];
            try {
                const auto ks = stats::ks_normality(sample.cells[ri][pi]);
                row.d = ks.d;
                row.p = ks.p;
                row.note = "ok";
            } catch (const Error& e) {
                row.note = error_code_name(e.code());
            }
            report.ks.push_back(std::move(row));
        }
    }

    // Homogeneity across all cells.
    {
        std::vector<std::vector<double>> cells_flat;
        for (const auto& row_cells : sample.cells)
            for (const auto& cell : row_cells) cells_flat.push_back(cell);
        try {
            report.bartlett = stats::bartlett(cells_flat);
            report.bartlett_note = "ok";
        } catch (const Error& e) {
            report.bartlett_note = error_code_name(e.code());
        }
    }

    // Stratified Welch path over recall groups (precisions pooled).
    auto stratum = [&](bool single) {
        StratumReport out;
        std::vector<std::vector<double>> groups;
        for (double r : recalls) {
            std::vector<double> obs;
            for (const auto& a : aggregates)
                if (a.recall == r)
                    obs.push_back(static_cast<double>(single ? a.bugs_single : a.bugs_multi));
            groups.push_back(std::move(obs));
        }
        bool any = false;
        for (const auto& g : groups)
            for (double v : g)
                if (v > 0.0) any = true;
        if (!any) {
            out.note = "no detections in stratum";
            return out;
        }
        try {
            out.welch = stats::welch_anova(groups);
            out.epsilon_squared = stats::epsilon_squared_oneway(groups);
            out.note = "ok";
        } catch (const Error& e) {
            out.note = error_code_name(e.code());
            // The effect size is still defined whenever the decomposition is.
            try {
                out.epsilon_squared = stats::epsilon_squared_oneway(groups);
            } catch (const Error&) {
            }
        }
        return out;
    };
    report.single_site = stratum(true);
    report.multi_site = stratum(false);

    // Pairwise recall comparisons over total bugs found, precisions pooled.
    {
        std::vector<std::vector<double>> groups;
        std::vector<std::string> labels;
        for (double r : recalls) {
            std::vector<double> obs;
            for (const auto& a : aggregates)
                if (a.recall == r) obs.push_back(static_cast<double>(a.bugs_found));
            groups.push_back(std::move(obs));
            labels.push_back("recall=" + fmt(r, "%.2f"));
        }
        try {
            report.pairwise_recall = stats::pairwise_comparisons(groups, labels);
        } catch (const Error&) {
            // Constant groups at desk scale; the profile still reports means.
        }
    }

    // Profile rows + skipped fractions from the per-pair dataset.
    for (double p : precisions) {
        for (double r : recalls) {
            ProfileRow row;
            row.recall = r;
            row.precision = p;
            std::vector<double> obs;
            for (const auto& a : aggregates)
                if (a.recall == r && a.precision == p)
                    obs.push_back(static_cast<double>(a.bugs_found));
            row.n = static_cast<int>(obs.size());
            row.mean_bugs = stats::mean(obs);
            row.sd_bugs = obs.size() > 1 ? std::sqrt(stats::sample_variance(obs)) : 0.0;
            std::set<std::pair<std::string, int>> slots, skipped;
            for (const auto& c : rows) {
                if (c.recall != r || c.precision != p) continue;
                slots.insert({c.pair, c.sim});
                if (c.status == "skipped") skipped.insert({c.pair, c.sim});
            }
            row.skipped_fraction =
                slots.empty() ? 0.0
                              : static_cast<double>(skipped.size()) / static_cast<double>(slots.size());
            report.profile.push_back(row);
        }
    }

    // Monotone trend: adjacent mean decreases along increasing recall.
    for (double p : precisions) {
        int violations = 0;
        double prev = -1.0;
        bool first = true;
        for (double r : recalls) {
            for (const auto& row : report.profile) {
                if (row.precision != p || row.recall != r) continue;
                if (!first && row.mean_bugs < prev) ++violations;
                prev = row.mean_bugs;
                first = false;
            }
        }
        report.monotone_violations.emplace_back(p, violations);
    }

    return report;
}

StatsReport analyze(const std::filesystem::path& results_dir,
                    const std::filesystem::path& report_dir) {
    const auto rows = read_results_csv(results_dir / "results.csv");
    const auto aggregates = read_aggregates_csv(results_dir / "aggregates.csv");
    StatsReport report = analyze_rows(rows, aggregates);
    write_report_files(report, report_dir);
    return report;
}

void write_report_files(const StatsReport& report, const std::filesystem::path& report_dir) {
    // anova.csv
    {
        std::string out = "# schema=1 sbstlab anova\n";
        out += "effect,df,sum_sq,mean_sq,f,p\n";
        const auto line = [&](const char* name, const stats::EffectRow& row) {
            out += std::string(name) + "," + fmt(row.df) + "," + fmt(row.ss) + "," + fmt(row.ms) +
                   "," + opt_fmt(row.f) + "," + opt_fmt(row.p, "%.3e") + "\n";
        };
        line("recall", report.anova.recall);
        line("precision", report.anova.precision);
        line("recall:precision", report.anova.interaction);
        line("residual", report.anova.residual);
        write_text_file(report_dir / "anova.csv", out);
    }
    // effects.csv
    {
        std::string out = "# schema=1 sbstlab effect sizes\n";
        out += "effect,epsilon_squared\n";
        out += "recall," + fmt(report.eps2_recall) + "\n";
        out += "precision," + fmt(report.eps2_precision) + "\n";
        if (report.single_site.epsilon_squared >= 0.0)
            out += "recall_single_site," + fmt(report.single_site.epsilon_squared) + "\n";
        if (report.multi_site.epsilon_squared >= 0.0)
            out += "recall_multi_site," + fmt(report.multi_site.epsilon_squared) + "\n";
        write_text_file(report_dir / "effects.csv", out);
    }
    // checks.csv: KS per cell + Bartlett.
    {
        std::string out = "# schema=1 sbstlab assumption checks\n";
        out += "check,recall,precision,statistic,p,note\n";
        for (const auto& ks : report.ks)
            out += "ks_normality," + fmt(ks.recall) + "," + fmt(ks.precision) + "," +
                   opt_fmt(ks.d) + "," + opt_fmt(ks.p) + "," + ks.note + "\n";
        if (report.bartlett)
            out += "bartlett,-,-," + fmt(report.bartlett->statistic) + "," +
                   fmt(report.bartlett->p) + "," + report.bartlett_note + "\n";
        else
            out += "bartlett,-,-,-,-," + report.bartlett_note + "\n";
        write_text_file(report_dir / "checks.csv", out);
    }
    // welch.csv
    {
        std::string out = "# schema=1 sbstlab welch anova by stratum\n";
        out += "stratum,f,df_num,df_denom,p,epsilon_squared,note\n";
        const auto line = [&](const char* name, const StratumReport& s) {
            out += std::string(name) + ",";
            if (s.welch)
                out += fmt(s.welch->f) + "," + fmt(s.welch->df_num) + "," + fmt(s.welch->df_denom) +
                       "," + fmt(s.welch->p, "%.3e") + ",";
            else
                out += "-,-,-,-,";
            out += (s.epsilon_squared >= 0.0 ? fmt(s.epsilon_squared) : std::string("-")) + "," +
                   s.note + "\n";
        };
        line("single_site", report.single_site);
        line("multi_site", report.multi_site);
        write_text_file(report_dir / "welch.csv", out);
    }
    // pairwise.csv
    {
        std::string out = "# schema=1 sbstlab pairwise recall comparisons (welch t + cohen d)\n";
        out += "group_a,group_b,welch_t,df,p,cohens_d\n";
        for (const auto& row : report.pairwise_recall)
            out += row.a + "," + row.b + "," + fmt(row.welch_t) + "," + fmt(row.df) + "," +
                   fmt(row.p, "%.3e") + "," + fmt(row.cohens_d) + "\n";
        write_text_file(report_dir / "pairwise.csv", out);
    }
    // profile.csv: the mean-bugs-per-recall profile.
    {
        std::string out = "# schema=1 sbstlab profile\n";
        out += "recall,precision,mean_bugs,sd_bugs,n,skipped_fraction\n";
        for (const auto& row : report.profile)
            out += fmt(row.recall) + "," + fmt(row.precision) + "," + fmt(row.mean_bugs) + "," +
                   fmt(row.sd_bugs) + "," + std::to_string(row.n) + "," +
                   fmt(row.skipped_fraction) + "\n";
        write_text_file(report_dir / "profile.csv", out);
    }
    // report.txt: the human-readable summary.
    {
        std::string out;
        out += "Two-way ANOVA (bugs found ~ recall * precision)\n";
        out += "  effect             df        SS          MS          F        p\n";
        const auto line = [&](const char* name, const stats::EffectRow& row) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %-16s %6.0f %11.2f %11.2f %9s %9s\n", name, row.df,
                          row.ss, row.ms, opt_fmt(row.f, "%.2f").c_str(),
                          opt_fmt(row.p, "%.2e").c_str());
            out += buf;
        };
        line("recall", report.anova.recall);
        line("precision", report.anova.precision);
        line("recall:precision", report.anova.interaction);
        line("residual", report.anova.residual);
        out += "\nEffect sizes (epsilon squared)\n";
        out += "  recall:    " + fmt(report.eps2_recall, "%.4f") + "\n";
        out += "  precision: " + fmt(report.eps2_precision, "%.4f") + "\n";
        out += "\nWelch ANOVA by buggy-method count stratum\n";
        const auto welch_line = [&](const char* name, const StratumReport& s) {
            out += std::string("  ") + name + ": ";
            if (s.welch)
                out += "F=" + fmt(s.welch->f, "%.2f") + " df=(" + fmt(s.welch->df_num, "%.0f") +
                       ", " + fmt(s.welch->df_denom, "%.1f") + ") p=" + fmt(s.welch->p, "%.2e") +
                       " eps2=" + fmt(s.epsilon_squared, "%.3f");
            else
                out += s.note;
            out += "\n";
        };
        welch_line("single-site", report.single_site);
        welch_line("multi-site ", report.multi_site);
        out += "\nMean bugs found by (recall, precision)\n";
        for (const auto& row : report.profile) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "  recall %.2f precision %.2f: mean %.2f sd %.2f (n=%d, skipped %.1f%%)\n",
                          row.recall, row.precision, row.mean_bugs, row.sd_bugs, row.n,
                          row.skipped_fraction * 100.0);
            out += buf;
        }
        out += "\nAdjacent mean decreases along increasing recall\n";
        for (const auto& [p, v] : report.monotone_violations)
            out += "  precision " + fmt(p, "%.2f") + ": " + std::to_string(v) + "\n";
        write_text_file(report_dir / "report.txt", out);
    }
}

} // namespace sbstlab::harness
