#include <doctest.h>

#include <cmath>

#include "sbstlab/errors.hpp"
#include "sbstlab/predictor/predictor.hpp"

using namespace sbstlab;
using namespace sbstlab::predictor;

namespace {

GroundTruth make_truth(int k, int d) {
    GroundTruth t;
    t.labels.assign(static_cast<std::size_t>(k), 0);
    // Spread buggy labels over the vector so index choice matters.
    for (int i = 0; i < d; ++i) t.labels[static_cast<std::size_t>(i * k / d)] = 1;
    return t;
}

} // namespace

TEST_CASE("quota arithmetic: k=100 d=20 r=0.75 p=0.75") {
    Rng rng(1);
    const auto truth = make_truth(100, 20);
    const auto c = simulate(truth, 0.75, 0.75, rng);
    CHECK(c.tp == 15);
    CHECK(c.fp == 5);
    int flagged = 0;
    for (auto b : c.labels) flagged += b != 0;
    CHECK(flagged == 20);
    const auto rates = measure(truth, c.labels);
    CHECK(rates.tp == 15);
    CHECK(rates.fp == 5);
    CHECK(rates.recall == doctest::Approx(0.75));
    REQUIRE(rates.precision.has_value());
    CHECK(*rates.precision == doctest::Approx(0.75));
}

TEST_CASE("perfect predictor reproduces the truth exactly") {
    Rng rng(2);
    const auto truth = make_truth(50, 9);
    const auto c = simulate(truth, 1.0, 1.0, rng);
    CHECK(c.labels == truth.labels);
    CHECK(c.tp == 9);
    CHECK(c.fp == 0);
}

TEST_CASE("r=0.8 p=1.0 on d=10: exactly two buggy functions missed") {
    Rng rng(3);
    const auto truth = make_truth(40, 10);
    const auto c = simulate(truth, 0.8, 1.0, rng);
    CHECK(c.tp == 8);
    CHECK(c.fp == 0);
    int missed = 0;
    for (std::size_t i = 0; i < truth.labels.size(); ++i)
        if (truth.labels[i] && !c.labels[i]) ++missed;
    CHECK(missed == 2);
}

TEST_CASE("errors: degenerate truth and insufficient negatives") {
    Rng rng(4);
    GroundTruth none;
    none.labels.assign(10, 0);
    CHECK_THROWS_AS(simulate(none, 0.75, 0.75, rng), Error);

    GroundTruth mostly_buggy;
    mostly_buggy.labels.assign(10, 1);
    mostly_buggy.labels[0] = 0; // nd = 1
    // tp = 9*1 = 9, fp = 9*(1-0.5)/0.5 = 9 > 1
    CHECK_THROWS_AS(simulate(mostly_buggy, 1.0, 0.5, rng), Error);
    try {
        simulate(mostly_buggy, 1.0, 0.5, rng);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientNegatives);
    }
}

TEST_CASE("measure edge cases") {
    const auto truth = make_truth(10, 4);
    std::vector<std::uint8_t> nothing(10, 0);
    const auto rates = measure(truth, nothing);
    CHECK(rates.recall == 0.0);
    CHECK(!rates.precision.has_value());
    CHECK_THROWS_AS(measure(truth, std::vector<std::uint8_t>(9, 0)), Error);
}

TEST_CASE("round_half_up") {
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(2.49) == 2);
    CHECK(round_half_up(17.0) == 17);
    CHECK(round_half_up(0.5) == 1);
}

TEST_CASE("config grid is the 12 studied configurations") {
    const auto grid = config_grid();
    CHECK(grid.size() == 12);
    int with_085 = 0, with_1_1 = 0;
    for (const auto& [p, r] : grid) {
        CHECK(r >= 0.75);
        CHECK((p == 0.75 || p == 1.0));
        if (p == 0.75 && r == 0.85) ++with_085;
        if (p == 1.0 && r == 1.0) ++with_1_1;
    }
    CHECK(with_085 == 1);
    CHECK(with_1_1 == 1);
}

TEST_CASE("seed determinism and divergence") {
    const auto truth = make_truth(60, 12);
    Rng a(77), b(77), c(78);
    CHECK(simulate(truth, 0.8, 0.75, a).labels == simulate(truth, 0.8, 0.75, b).labels);
    // Different seed should (overwhelmingly) change the draw.
    Rng a2(77);
    CHECK(simulate(truth, 0.8, 0.75, a2).labels != simulate(truth, 0.8, 0.75, c).labels);
}

TEST_CASE("roundtrip within the rounding bound over the grid") {
    const auto truth = make_truth(200, 40);
    const double d = 40.0;
    int seed = 0;
    for (const auto& [p, r] : config_grid()) {
        for (int rep = 0; rep < 20; ++rep) {
            Rng rng(static_cast<std::uint64_t>(++seed));
            const auto c = simulate(truth, r, p, rng);
            const auto rates = measure(truth, c.labels);
            CHECK(std::abs(rates.recall - r) <= 0.5 / d + 1e-12);
            const double fp_exact = c.tp * (1.0 - p) / p;
            REQUIRE(rates.precision.has_value());
            const double lo = c.tp / (c.tp + fp_exact + 0.5);
            const double hi = c.tp / (c.tp + std::max(0.0, fp_exact - 0.5));
            CHECK(*rates.precision >= lo - 1e-12);
            CHECK(*rates.precision <= hi + 1e-12);
            // Integral quotas reproduce the request exactly.
            if (std::abs(d * r - std::round(d * r)) < 1e-9) {
                CHECK(rates.recall == doctest::Approx(r).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("selection is uniform over buggy indices") {
    const auto truth = make_truth(20, 8);
    const double r = 0.75; // tp = 6 of 8
    const int trials = 4000;
    std::vector<int> hits(20, 0);
    for (int t = 0; t < trials; ++t) {
        Rng rng(static_cast<std::uint64_t>(1000 + t));
        const auto c = simulate(truth, r, 1.0, rng);
        for (std::size_t i = 0; i < c.labels.size(); ++i)
            if (c.labels[i]) ++hits[i];
    }
    // Each buggy index selected with frequency 6/8 = 0.75 within 3 sigma.
    const double sigma = std::sqrt(0.75 * 0.25 / trials);
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        if (!truth.labels[i]) {
            CHECK(hits[i] == 0);
            continue;
        }
        const double freq = static_cast<double>(hits[i]) / trials;
        CHECK(std::abs(freq - 0.75) < 3.0 * sigma);
    }
}
