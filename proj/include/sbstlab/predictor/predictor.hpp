#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sbstlab/rng.hpp"

namespace sbstlab::predictor {

/// Per-function buggy/non-buggy labels, 1 = buggy.
struct GroundTruth {
    std::vector<std::uint8_t> labels;

    int size() const { return static_cast<int>(labels.size()); }
    int buggy_count() const;
};

struct Classification {
    std::vector<std::uint8_t> labels;
    double requested_recall = 0.0;
    double requested_precision = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

/// round-half-up; tp/fp quotas are rounded this way so realized rates are
/// exactly reproducible.
int round_half_up(double x);

/// Draws a simulated prediction at the commanded (recall, precision):
/// tp = round(d*r) buggy indices and fp = round(tp*(1-p)/p) non-buggy
/// indices, chosen uniformly without replacement.
Classification simulate(const GroundTruth& truth, double recall, double precision, Rng& rng);

struct MeasuredRates {
    double recall = 0.0;
    std::optional<double> precision; // empty when nothing was flagged
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

MeasuredRates measure(const GroundTruth& truth, const std::vector<std::uint8_t>& labels);

/// The 12 studied configurations as (precision, recall) pairs:
/// {75%, 100%} x {75%, 80%, 85%, 90%, 95%, 100%}.
std::vector<std::pair<double, double>> config_grid();

} // namespace sbstlab::predictor
