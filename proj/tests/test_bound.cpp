#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <random>

#include "oopa/bound.hpp"
#include "oopa/objective.hpp"
#include "oopa/reference.hpp"

using namespace oopa;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

GridSpec paper_grid() { return make_grid({0, 0}, {4, 4}, 21, 2); }

SampleSet random_samples(const GridSpec& spec, int count, std::mt19937& rng) {
    std::uniform_int_distribution<int> pick(0, spec.total_points() - 1);
    std::uniform_real_distribution<double> value(-50.0, 250.0);
    SampleSet samples;
    while (samples.size() < count) {
        samples.add(spec.coords(spec.unflat(pick(rng))), value(rng));
    }
    return samples;
}
}  // namespace

TEST_CASE("sample set keeps one entry per position, in acquisition order") {
    SampleSet s;
    CHECK(s.add({1.0, 2.0}, 3.0));
    CHECK_FALSE(s.add({1.0, 2.0}, 99.0));
    CHECK(s.add({1.0, 2.2}, 4.0));
    REQUIRE(s.size() == 2);
    CHECK(s[0].value == 3.0);
    CHECK(s[1].value == 4.0);
}

TEST_CASE("single sample produces one Lipschitz cone") {
    GridSpec spec = paper_grid();
    SampleSet s;
    s.add({2.0, 2.0}, 100.0);
    BoundField b = rebuild_bound(s, spec, 364.54);
    CHECK(b.values[spec.flat({10, 11})] == doctest::Approx(172.908).epsilon(1e-12));
    CHECK(b.values[spec.flat({10, 10})] == doctest::Approx(100.0));
}

TEST_CASE("two symmetric samples meet in the middle") {
    GridSpec spec = paper_grid();
    SampleSet s;
    s.add({0.0, 0.0}, 0.0);
    s.add({4.0, 4.0}, 0.0);
    BoundField b = rebuild_bound(s, spec, 1.0);
    CHECK(b.values[spec.flat({10, 10})] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("empty sample set gives the +inf sentinel") {
    GridSpec spec = paper_grid();
    BoundField b = make_empty_bound(spec, 1.0);
    for (double v : b.values) CHECK(v == kInf);
}

TEST_CASE("overlay composition reproduces the brute-force bound") {
    GridSpec spec = paper_grid();
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        SampleSet s = random_samples(spec, 1 + trial * 3, rng);
        BoundField incremental = make_empty_bound(spec, 200.0);
        for (int i = 0; i < s.size(); ++i) min_overlay_inplace(incremental, spec, s[i]);
        BoundField brute = ref::rebuild_bound(s, spec, 200.0);
        for (int f = 0; f < spec.total_points(); ++f) {
            CHECK(incremental.values[f] ==
                  doctest::Approx(brute.values[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("overlaying a known sample or an infinite value changes nothing") {
    GridSpec spec = paper_grid();
    std::mt19937 rng(23);
    SampleSet s = random_samples(spec, 12, rng);
    BoundField b = rebuild_bound(s, spec, 150.0);

    BoundField same = min_overlay(b, spec, s[3]);
    CHECK(same.values == b.values);

    BoundField neutral = min_overlay(b, spec, {{1.0, 1.0}, kInf});
    CHECK(neutral.values == b.values);
}

TEST_CASE("f_hat returns the nearest sample, earliest on ties") {
    SampleSet s;
    CHECK_THROWS_AS(f_hat(s, {0.0, 0.0}, 2), std::invalid_argument);

    s.add({2.0, 2.0}, 100.0);
    CHECK(f_hat(s, {3.0, 3.0}, 2) == 100.0);

    s.add({2.0, 2.2}, 212.5);
    CHECK(f_hat(s, {2.0, 2.2}, 2) == 212.5);  // sampled point: value taken directly

    // {2.0, 2.1} is equidistant from both samples; the earlier one wins.
    CHECK(f_hat(s, {2.0, 2.1}, 2) == 100.0);
}

TEST_CASE("nearest field agrees with per-point queries") {
    GridSpec spec = paper_grid();
    std::mt19937 rng(31);
    SampleSet s = random_samples(spec, 17, rng);
    NearestField field = build_nearest_field(s, spec);
    for (int f = 0; f < spec.total_points(); ++f) {
        CHECK(field.value[f] == f_hat(s, spec.coords(spec.unflat(f)), 2));
    }
}

TEST_CASE("two-point chain refinement matches the hand computation") {
    // Grid {0, 1}, one sample (0, 0), M = 1. Stepping right predicts
    // f_hat = 0 at both points, so B1 = (0, 1), B2 = (0, 0) and the
    // trapezoid of the difference is 0.5.
    GridSpec spec = make_grid({0.0, 0.0}, {1.0, 0.0}, 2, 1);
    ActionSet actions = ActionSet::canonical(1);
    SampleSet s;
    s.add({0.0, 0.0}, 0.0);
    BoundField b = rebuild_bound(s, spec, 1.0);

    auto result = refinement(s, b, spec, {0, 0}, actions[0]);
    REQUIRE(result.has_value());
    CHECK(result->b1.values[0] == 0.0);
    CHECK(result->b1.values[1] == 1.0);
    CHECK(result->b2.values[1] == 0.0);
    CHECK(result->volume == 0.5);

    // Stepping off the grid is inadmissible.
    CHECK_FALSE(refinement(s, b, spec, {0, 0}, actions[1]).has_value());
}

TEST_CASE("no refinement is predicted at an already sampled successor") {
    GridSpec spec = paper_grid();
    ActionSet actions = ActionSet::canonical(2);
    SampleSet s;
    s.add({2.0, 2.0}, 100.0);
    s.add({2.0, 2.2}, 120.0);
    BoundField b = rebuild_bound(s, spec, 364.54);
    auto result = refinement(s, b, spec, {10, 10}, actions[0]);  // up, into the sample
    REQUIRE(result.has_value());
    CHECK(result->volume == 0.0);
    CHECK(result->b1.values == result->b2.values);
}

TEST_CASE("actual refinement is the integral of the bound decrease") {
    GridSpec spec = paper_grid();
    std::mt19937 rng(41);
    SampleSet s = random_samples(spec, 9, rng);
    BoundField before = rebuild_bound(s, spec, 150.0);

    SUBCASE("re-sampling changes nothing") {
        BoundField after = min_overlay(before, spec, s[0]);
        CHECK(actual_refinement(before, after, spec) == 0.0);
    }
    SUBCASE("a fresh sample only lowers the bound") {
        BoundField after = min_overlay(before, spec, {{0.4, 3.8}, -20.0});
        CHECK(actual_refinement(before, after, spec) >= 0.0);
        for (int f = 0; f < spec.total_points(); ++f) {
            CHECK(after.values[f] <= before.values[f]);
        }
    }
    SUBCASE("mismatched grids are rejected") {
        GridSpec other = make_grid({0, 0}, {4, 4}, 11, 2);
        BoundField small = rebuild_bound(s, other, 150.0);
        CHECK_THROWS_AS(actual_refinement(before, small, spec), std::invalid_argument);
        BoundField wrong_m = before;
        wrong_m.lipschitz = 1.0;
        CHECK_THROWS_AS(actual_refinement(before, wrong_m, spec), std::invalid_argument);
    }
}

TEST_CASE("bound dominates the objective when M is honest") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    const double m = estimate_lipschitz(f, spec, 4);
    std::mt19937 rng(59);
    std::uniform_int_distribution<int> pick(0, spec.total_points() - 1);

    SampleSet s;
    BoundField b = make_empty_bound(spec, m);
    for (int i = 0; i < 25; ++i) {
        const Vec pos = spec.coords(spec.unflat(pick(rng)));
        if (s.add(pos, f.eval(pos))) min_overlay_inplace(b, spec, {pos, f.eval(pos)});
        for (int g = 0; g < spec.total_points(); ++g) {
            CHECK(b.values[g] >= f.eval(spec.coords(spec.unflat(g))) - 1e-9);
        }
    }
    // At sampled points the bound is tight.
    for (int i = 0; i < s.size(); ++i) {
        const int g = spec.flat(spec.snap(s[i].pos));
        CHECK(b.values[g] == doctest::Approx(s[i].value).epsilon(1e-12));
    }
}

TEST_CASE("prediction equals outcome when the surrogate is exact") {
    // A constant objective makes f_hat exact everywhere, so the predicted
    // refinement of any move must equal the realized one.
    GridSpec spec = paper_grid();
    ActionSet actions = ActionSet::canonical(2);
    const double c = 7.5;
    SampleSet s;
    s.add({2.0, 2.0}, c);
    s.add({1.0, 3.0}, c);
    BoundField b = rebuild_bound(s, spec, 10.0);

    auto predicted = refinement(s, b, spec, {10, 10}, actions[0]);
    REQUIRE(predicted.has_value());
    BoundField after = min_overlay(b, spec, {spec.coords({10, 11}), c});
    CHECK(predicted->volume == actual_refinement(b, after, spec));
    CHECK(predicted->volume > 0.0);
}
