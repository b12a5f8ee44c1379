#include "sbstlab/predictor/predictor.hpp"

#include <cmath>

#include "sbstlab/errors.hpp"

namespace sbstlab::predictor {

int GroundTruth::buggy_count() const {
    int d = 0;
    for (auto m : labels) d += m != 0;
    return d;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

Classification simulate(const GroundTruth& truth, double recall, double precision, Rng& rng) {
    const int k = truth.size();
    const int d = truth.buggy_count();
    const int nd = k - d;
    if (d == 0) throw Error(ErrorCode::DegenerateTruth, "ground truth labels nothing buggy");
    if (recall < 0.0 || recall > 1.0 || precision <= 0.0 || precision > 1.0)
        throw Error(ErrorCode::ConfigError, "recall in [0,1] and precision in (0,1] required");

    const int tp = round_half_up(static_cast<double>(d) * recall);
    const int fp = round_half_up(static_cast<double>(tp) * (1.0 - precision) / precision);
    if (fp > nd)
        throw Error(ErrorCode::InsufficientNegatives,
                    "need " + std::to_string(fp) + " false positives but only " +
                        std::to_string(nd) + " non-buggy functions exist");

    std::vector<std::size_t> buggy, non_buggy;
    for (int i = 0; i < k; ++i)
        (truth.labels[static_cast<std::size_t>(i)] ? buggy : non_buggy)
            .push_back(static_cast<std::size_t>(i));

    Classification c;
    c.labels.assign(static_cast<std::size_t>(k), 0);
    c.requested_recall = recall;
    c.requested_precision = precision;
    for (std::size_t pick : rng.sample_without_replacement(buggy.size(), static_cast<std::size_t>(tp)))
        c.labels[buggy[pick]] = 1;
    for (std::size_t pick :
         rng.sample_without_replacement(non_buggy.size(), static_cast<std::size_t>(fp)))
        c.labels[non_buggy[pick]] = 1;
    c.tp = tp;
    c.fp = fp;
    c.fn = d - tp;
    return c;
}

MeasuredRates measure(const GroundTruth& truth, const std::vector<std::uint8_t>& labels) {
    if (labels.size() != truth.labels.size())
        throw Error(ErrorCode::LengthMismatch,
                    "classification length " + std::to_string(labels.size()) +
                        " != truth length " + std::to_string(truth.labels.size()));
    MeasuredRates m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = labels[i] != 0;
        const bool actual = truth.labels[i] != 0;
        if (predicted && actual) ++m.tp;
        else if (predicted && !actual) ++m.fp;
        else if (!predicted && actual) ++m.fn;
    }
    m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
    return m;
}

std::vector<std::pair<double, double>> config_grid() {
    std::vector<std::pair<double, double>> grid;
    for (double precision : {0.75, 1.0})
        for (double recall : {0.75, 0.80, 0.85, 0.90, 0.95, 1.0})
            grid.emplace_back(precision, recall);
    return grid;
}

} // namespace sbstlab::predictor
