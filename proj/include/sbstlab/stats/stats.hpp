#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbstlab/stats/special.hpp"

namespace sbstlab::stats {

/// Observations for a recall x precision factorial design; cells[a][b] is
/// the list of "bugs found" counts for recall level a, precision level b.
struct FactorialSample {
    std::vector<double> recall_levels;
    std::vector<double> precision_levels;
    std::vector<std::vector<std::vector<double>>> cells;
};

enum class Effect { Recall, Precision, Interaction };

struct EffectRow {
    double df = 0.0;
    double ss = 0.0;
    double ms = 0.0;
    std::optional<double> f;
    std::optional<double> p;
};

struct AnovaTable {
    EffectRow recall;
    EffectRow precision;
    EffectRow interaction;
    EffectRow residual;
    double ss_total = 0.0;

    /// Builds a table from sums of squares and degrees of freedom alone
    /// (F and p derived); used for cross-checking published tables.
    static AnovaTable from_sums(double ss_a, double df_a, double ss_b, double df_b, double ss_ab,
                                double df_ab, double ss_err, double df_err);
};

/// Classical balanced two-factor ANOVA with replication. Requires equal
/// cell sizes >= 2 (UnbalancedDesign otherwise). A design with zero total
/// variance yields empty F/p (DegenerateCell is reported as std::nullopt,
/// never thrown from here).
AnovaTable two_way_anova(const FactorialSample& sample);

/// Kelley's epsilon-squared: (SS_effect - df_effect * MS_error) / SS_total,
/// clamped at 0.
double epsilon_squared(const AnovaTable& table, Effect effect);

struct WelchResult {
    double f = 0.0;
    double df_num = 0.0;
    double df_denom = 0.0;
    double p = 1.0;
};

/// Welch's heteroscedastic one-way ANOVA. Each group needs >= 2
/// observations and nonzero variance (ZeroVarianceGroup).
WelchResult welch_anova(const std::vector<std::vector<double>>& groups);

/// One-way epsilon-squared from the classical decomposition; companion
/// effect size for the Welch path.
double epsilon_squared_oneway(const std::vector<std::vector<double>>& groups);

/// Pooled-variance standardized mean difference.
double cohens_d(const std::vector<double>& a, const std::vector<double>& b);

struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

/// One-sample Kolmogorov-Smirnov distance against Normal(mean, sd) fitted
/// from the data; p from the asymptotic Kolmogorov series. n >= 3 required;
/// DegenerateSample when sd == 0.
KsResult ks_normality(std::vector<double> observations);

struct BartlettResult {
    double statistic = 0.0;
    double df = 0.0;
    double p = 1.0;
};

BartlettResult bartlett(const std::vector<std::vector<double>>& groups);

struct PairwiseRow {
    std::string a;
    std::string b;
    double welch_t = 0.0;
    double df = 0.0;
    double p = 1.0;
    double cohens_d = 0.0;
};

/// All unordered group pairs in label order: Welch t statistic with
/// Welch-Satterthwaite df plus Cohen's d.
std::vector<PairwiseRow> pairwise_comparisons(const std::vector<std::vector<double>>& groups,
                                              const std::vector<std::string>& labels);

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

} // namespace sbstlab::stats
