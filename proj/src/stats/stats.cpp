#include "sbstlab/stats/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sbstlab/errors.hpp"

namespace sbstlab::stats {

double mean(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double sum = 0.0;
    for (double x : xs) sum += (x - m) * (x - m);
    return sum / (static_cast<double>(xs.size()) - 1.0);
}

AnovaTable AnovaTable::from_sums(double ss_a, double df_a, double ss_b, double df_b, double ss_ab,
                                 double df_ab, double ss_err, double df_err) {
    AnovaTable t;
    t.recall = {df_a, ss_a, ss_a / df_a, std::nullopt, std::nullopt};
    t.precision = {df_b, ss_b, ss_b / df_b, std::nullopt, std::nullopt};
    t.interaction = {df_ab, ss_ab, ss_ab / df_ab, std::nullopt, std::nullopt};
    t.residual = {df_err, ss_err, ss_err / df_err, std::nullopt, std::nullopt};
    t.ss_total = ss_a + ss_b + ss_ab + ss_err;
    if (t.residual.ms > 0.0) {
        for (EffectRow* row : {&t.recall, &t.precision, &t.interaction}) {
            row->f = row->ms / t.residual.ms;
            row->p = f_upper_tail(*row->f, row->df, t.residual.df);
        }
    }
    return t;
}

AnovaTable two_way_anova(const FactorialSample& sample) {
    const std::size_t a = sample.recall_levels.size();
    const std::size_t b = sample.precision_levels.size();
    if (a < 2 || b < 2 || sample.cells.size() != a)
        throw Error(ErrorCode::UnbalancedDesign, "need a full grid with >= 2 levels per factor");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a; ++i) {
        if (sample.cells[i].size() != b)
            throw Error(ErrorCode::UnbalancedDesign, "missing cells");
        for (std::size_t j = 0; j < b; ++j) {
            if (n == 0) n = sample.cells[i][j].size();
            if (sample.cells[i][j].size() != n)
                throw Error(ErrorCode::UnbalancedDesign, "unequal cell sizes");
        }
    }
    if (n < 2) throw Error(ErrorCode::UnbalancedDesign, "need >= 2 observations per cell");

    const double an = static_cast<double>(a);
    const double bn = static_cast<double>(b);
    const double nn = static_cast<double>(n);

    double grand = 0.0;
    std::vector<double> mean_a(a, 0.0), mean_b(b, 0.0);
    std::vector<std::vector<double>> mean_ab(a, std::vector<double>(b, 0.0));
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double m = mean(sample.cells[i][j]);
            mean_ab[i][j] = m;
            mean_a[i] += m / bn;
            mean_b[j] += m / an;
            grand += m / (an * bn);
        }

    double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_err = 0.0;
    for (std::size_t i = 0; i < a; ++i) ss_a += bn * nn * (mean_a[i] - grand) * (mean_a[i] - grand);
    for (std::size_t j = 0; j < b; ++j) ss_b += an * nn * (mean_b[j] - grand) * (mean_b[j] - grand);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double dev = mean_ab[i][j] - mean_a[i] - mean_b[j] + grand;
            ss_ab += nn * dev * dev;
            for (double y : sample.cells[i][j]) ss_err += (y - mean_ab[i][j]) * (y - mean_ab[i][j]);
        }

    AnovaTable t;
    t.recall = {an - 1.0, ss_a, ss_a / (an - 1.0), std::nullopt, std::nullopt};
    t.precision = {bn - 1.0, ss_b, ss_b / (bn - 1.0), std::nullopt, std::nullopt};
    t.interaction = {(an - 1.0) * (bn - 1.0), ss_ab, ss_ab / ((an - 1.0) * (bn - 1.0)),
                     std::nullopt, std::nullopt};
    const double df_err = an * bn * (nn - 1.0);
    t.residual = {df_err, ss_err, ss_err / df_err, std::nullopt, std::nullopt};
    t.ss_total = ss_a + ss_b + ss_ab + ss_err;

    // All-constant data has no variance to explain: report empty F/p.
    if (t.ss_total > 0.0 && t.residual.ms > 0.0) {
        for (EffectRow* row : {&t.recall, &t.precision, &t.interaction}) {
            row->f = row->ms / t.residual.ms;
            row->p = f_upper_tail(*row->f, row->df, t.residual.df);
        }
    }
    return t;
}

double epsilon_squared(const AnovaTable& table, Effect effect) {
    const EffectRow* row = nullptr;
    switch (effect) {
        case Effect::Recall: row = &table.recall; break;
        case Effect::Precision: row = &table.precision; break;
        case Effect::Interaction: row = &table.interaction; break;
    }
    if (table.ss_total <= 0.0) return 0.0;
    const double value = (row->ss - row->df * table.residual.ms) / table.ss_total;
    return value < 0.0 ? 0.0 : value;
}

namespace {

void require_groups(const std::vector<std::vector<double>>& groups, std::size_t min_groups) {
    if (groups.size() < min_groups)
        throw Error(ErrorCode::ZeroVarianceGroup,
                    "need >= " + std::to_string(min_groups) + " groups");
    for (const auto& g : groups)
        if (g.size() < 2)
            throw Error(ErrorCode::ZeroVarianceGroup, "each group needs >= 2 observations");
}

} // namespace

WelchResult welch_anova(const std::vector<std::vector<double>>& groups) {
    require_groups(groups, 2);
    const std::size_t k = groups.size();
    std::vector<double> w(k), m(k);
    double w_total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double var = sample_variance(groups[j]);
        if (var <= 0.0)
            throw Error(ErrorCode::ZeroVarianceGroup, "group " + std::to_string(j) +
                                                          " has zero variance");
        w[j] = static_cast<double>(groups[j].size()) / var;
        m[j] = mean(groups[j]);
        w_total += w[j];
    }
    double grand = 0.0;
    for (std::size_t j = 0; j < k; ++j) grand += w[j] * m[j] / w_total;

    const double kk = static_cast<double>(k);
    double numerator = 0.0;
    for (std::size_t j = 0; j < k; ++j) numerator += w[j] * (m[j] - grand) * (m[j] - grand);
    numerator /= kk - 1.0;

    double lambda = 0.0; // sum (1 - w_j/W)^2 / (n_j - 1)
    for (std::size_t j = 0; j < k; ++j) {
        const double frac = 1.0 - w[j] / w_total;
        lambda += frac * frac / (static_cast<double>(groups[j].size()) - 1.0);
    }

    WelchResult r;
    r.f = numerator / (1.0 + 2.0 * (kk - 2.0) / (kk * kk - 1.0) * lambda);
    r.df_num = kk - 1.0;
    r.df_denom = (kk * kk - 1.0) / (3.0 * lambda);
    r.p = f_upper_tail(r.f, r.df_num, r.df_denom);
    return r;
}

double epsilon_squared_oneway(const std::vector<std::vector<double>>& groups) {
    require_groups(groups, 2);
    double grand = 0.0;
    double total_n = 0.0;
    for (const auto& g : groups) {
        for (double x : g) grand += x;
        total_n += static_cast<double>(g.size());
    }
    grand /= total_n;
    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ss_within += (x - m) * (x - m);
    }
    const double ss_total = ss_between + ss_within;
    if (ss_total <= 0.0) return 0.0;
    const double df_b = static_cast<double>(groups.size()) - 1.0;
    const double ms_w = ss_within / (total_n - static_cast<double>(groups.size()));
    const double value = (ss_between - df_b * ms_w) / ss_total;
    return value < 0.0 ? 0.0 : value;
}

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw Error(ErrorCode::ZeroVarianceGroup, "empty observation list");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double pooled_num = 0.0;
    if (a.size() > 1) pooled_num += (na - 1.0) * sample_variance(a);
    if (b.size() > 1) pooled_num += (nb - 1.0) * sample_variance(b);
    const double pooled = std::sqrt(pooled_num / (na + nb - 2.0));
    if (pooled <= 0.0) {
        if (mean(a) == mean(b)) return 0.0;
        throw Error(ErrorCode::ZeroVarianceGroup, "pooled standard deviation is zero");
    }
    return (mean(a) - mean(b)) / pooled;
}

KsResult ks_normality(std::vector<double> observations) {
    if (observations.size() < 3)
        throw Error(ErrorCode::DegenerateSample, "KS normality needs n >= 3");
    const double n = static_cast<double>(observations.size());
    const double m = mean(observations);
    const double sd = std::sqrt(sample_variance(observations));
    if (sd <= 0.0) throw Error(ErrorCode::DegenerateSample, "sample has zero variance");
    std::sort(observations.begin(), observations.end());
    double d = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const double cdf = normal_cdf((observations[i] - m) / sd);
        const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        const double lo = cdf - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    KsResult r;
    r.d = d;
    const double sqrt_n = std::sqrt(n);
    r.p = kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    return r;
}

BartlettResult bartlett(const std::vector<std::vector<double>>& groups) {
    require_groups(groups, 2);
    const double k = static_cast<double>(groups.size());
    double total_n = 0.0;
    double pooled = 0.0;
    double log_sum = 0.0;
    double inv_sum = 0.0;
    for (const auto& g : groups) {
        const double n = static_cast<double>(g.size());
        const double var = sample_variance(g);
        if (var <= 0.0)
            throw Error(ErrorCode::ZeroVarianceGroup, "bartlett needs positive variances");
        total_n += n;
        pooled += (n - 1.0) * var;
        log_sum += (n - 1.0) * std::log(var);
        inv_sum += 1.0 / (n - 1.0);
    }
    const double df_pool = total_n - k;
    pooled /= df_pool;
    const double c = 1.0 + (inv_sum - 1.0 / df_pool) / (3.0 * (k - 1.0));
    BartlettResult r;
    r.statistic = (df_pool * std::log(pooled) - log_sum) / c;
    if (r.statistic < 0.0) r.statistic = 0.0;
    r.df = k - 1.0;
    r.p = chi2_upper_tail(r.statistic, r.df);
    return r;
}

std::vector<PairwiseRow> pairwise_comparisons(const std::vector<std::vector<double>>& groups,
                                              const std::vector<std::string>& labels) {
    require_groups(groups, 2);
    if (labels.size() != groups.size())
        throw Error(ErrorCode::LengthMismatch, "labels do not match groups");
    std::vector<PairwiseRow> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const double ni = static_cast<double>(groups[i].size());
            const double nj = static_cast<double>(groups[j].size());
            const double vi = sample_variance(groups[i]);
            const double vj = sample_variance(groups[j]);
            if (vi <= 0.0 && vj <= 0.0)
                throw Error(ErrorCode::ZeroVarianceGroup, "both groups constant");
            PairwiseRow row;
            row.a = labels[i];
            row.b = labels[j];
            const double se2 = vi / ni + vj / nj;
            row.welch_t = (mean(groups[i]) - mean(groups[j])) / std::sqrt(se2);
            row.df = se2 * se2 /
                     (vi * vi / (ni * ni * (ni - 1.0)) + vj * vj / (nj * nj * (nj - 1.0)));
            row.p = t_two_tail(row.welch_t, row.df);
            row.cohens_d = cohens_d(groups[i], groups[j]);
            out.push_back(std::move(row));
        }
    }
    return out;
}

} // namespace sbstlab::stats
