#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "oopa/baselines.hpp"
#include "oopa/objective.hpp"
#include "oopa/reference.hpp"
#include "oopa/simulator.hpp"

using namespace oopa;

namespace {
GridSpec paper_grid() { return make_grid({0, 0}, {4, 4}, 21, 2); }
}

TEST_CASE("metrics track the best sample, closest approach and smallest gap") {
    GroundTruth truth{{2.0, 2.2}, 150.0, 1.0};
    Metrics m;
    metrics_update(m, {2.0, 2.0}, 100.0, truth, 2);
    CHECK(m.f_best == 100.0);
    CHECK(m.dist_to_opt == doctest::Approx(0.2));
    CHECK(m.value_gap == doctest::Approx(50.0));

    // Sampling exactly at x* zeroes the distance and closes the gap.
    metrics_update(m, {2.0, 2.2}, 150.0, truth, 2);
    CHECK(m.dist_to_opt == 0.0);
    CHECK(m.value_gap == doctest::Approx(0.0));

    // A duplicate sample changes nothing.
    Metrics before = m;
    metrics_update(m, {2.0, 2.2}, 150.0, truth, 2);
    CHECK(m.f_best == before.f_best);
    CHECK(m.dist_to_opt == before.dist_to_opt);
    CHECK(m.value_gap == before.value_gap);
}

TEST_CASE("a one-step run gathers two samples and logs one row") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();
    OopaPlanner planner(spec, ActionSet::canonical(2), 1);
    RunResult r = run(planner, f, spec, {10, 10}, 1, truth.lipschitz, truth);

    CHECK(r.steps_taken == 1);
    CHECK(r.samples_gathered == 2);               // n + 1 including the start
    REQUIRE(r.log.steps.size() == 1);
    CHECK(r.log.steps[0].cumulative_distance == 0.0);   // distance before the single action
    CHECK(r.log.final_cumulative_distance == doctest::Approx(0.2));
}

TEST_CASE("every planner samples once per step") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();

    int events = 0;
    RunOptions options;
    options.observer = [&](const StepEvent&) { ++events; };

    CdooPlanner cdoo;
    RunResult r = run(cdoo, f, spec, {10, 10}, 12, truth.lipschitz, truth, options);
    CHECK(events == 12);
    CHECK(r.samples_gathered == 13);   // no revisits on the corner route

    // Cumulative distance advances one grid step per move.
    for (const StepRecord& rec : r.log.steps) {
        CHECK(rec.cumulative_distance == doctest::Approx(0.2 * rec.k).epsilon(1e-12));
    }
}

TEST_CASE("revisited points cost a step but add no sample") {
    // Two-point 1-D world: any planner must bounce between the endpoints.
    GridSpec spec = make_grid({0.0, 0.0}, {0.2, 0.0}, 2, 1);
    RbfObjective f({{{1.0, 0.0}, 5.0, {0.1, 0.0}}}, 1);
    GroundTruth truth{{0.1, 0.0}, 5.0, 100.0};
    OopaPlanner planner(spec, ActionSet::canonical(1), 1);
    RunResult r = run(planner, f, spec, {0, 0}, 6, 100.0, truth);
    CHECK(r.steps_taken == 6);
    CHECK(r.samples_gathered == 2);    // only two distinct positions exist
    // Re-sampled steps realize zero refinement.
    for (size_t i = 1; i < r.log.steps.size(); ++i) {
        CHECK(r.log.steps[i].actual_refinement == 0.0);
    }
}

TEST_CASE("identical configurations give bit-identical logs") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();

    auto once = [&] {
        OopaPlanner planner(spec, ActionSet::canonical(2), 2);
        return run(planner, f, spec, {10, 10}, 30, truth.lipschitz, truth);
    };
    RunResult a = once();
    RunResult b = once();
    REQUIRE(a.log.steps.size() == b.log.steps.size());
    for (size_t i = 0; i < a.log.steps.size(); ++i) {
        CHECK(a.log.steps[i].position == b.log.steps[i].position);
        CHECK(a.log.steps[i].action == b.log.steps[i].action);
        CHECK(a.log.steps[i].sample == b.log.steps[i].sample);
        CHECK(a.log.steps[i].predicted_refinement == b.log.steps[i].predicted_refinement);
        CHECK(a.log.steps[i].actual_refinement == b.log.steps[i].actual_refinement);
        CHECK(a.log.steps[i].metrics.f_best == b.log.steps[i].metrics.f_best);
    }
    const bool same_distance =
        (std::isnan(a.distance_to_optimum) && std::isnan(b.distance_to_optimum)) ||
        a.distance_to_optimum == b.distance_to_optimum;
    CHECK(same_distance);
}

TEST_CASE("actual refinements telescope into the total bound decrease") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();
    OopaPlanner planner(spec, ActionSet::canonical(2), 3);
    RunResult r = run(planner, f, spec, {10, 10}, 40, truth.lipschitz, truth);

    double total = 0.0;
    for (const StepRecord& rec : r.log.steps) total += rec.actual_refinement;

    // Replay the sample sequence to rebuild the first and last bounds.
    SampleSet first, full;
    first.add(spec.coords(r.log.steps[0].position), r.log.steps[0].sample);
    for (const StepRecord& rec : r.log.steps) {
        full.add(spec.coords(rec.position), rec.sample);
    }
    full.add(spec.coords(r.log.final_position), r.log.final_sample);

    BoundField b_first = ref::rebuild_bound(first, spec, truth.lipschitz);
    BoundField b_last = ref::rebuild_bound(full, spec, truth.lipschitz);
    CHECK(total == doctest::Approx(actual_refinement(b_first, b_last, spec)).epsilon(1e-9));
}

TEST_CASE("convergence distance is taken at the first sample within delta") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    // Place x* on the start so the distance is zero.
    GroundTruth at_start{{2.0, 2.0}, f.eval({2.0, 2.0}), 364.54};
    OopaPlanner planner(spec, ActionSet::canonical(2), 1);
    RunResult r = run(planner, f, spec, {10, 10}, 2, 364.54, at_start);
    CHECK(r.found_optimum);
    CHECK(r.distance_to_optimum == 0.0);
}

TEST_CASE("an underestimated constant raises the domination flag") {
    // f(right endpoint) = 100 but the cone from the left sample only reaches
    // value ~1.7 with M' = 1, so the first move must expose the violation.
    GridSpec spec = make_grid({0.0, 0.0}, {1.0, 0.0}, 2, 1);
    RbfObjective f({{{0.45, 0.0}, 100.0, {1.0, 0.0}}}, 1);
    GroundTruth truth{{1.0, 0.0}, 100.0, 1.0};
    OopaPlanner planner(spec, ActionSet::canonical(1), 1);
    RunResult r = run(planner, f, spec, {0, 0}, 1, 1.0, truth);
    CHECK(r.domination_violated);

    // With an honest constant the same run is clean.
    OopaPlanner planner2(spec, ActionSet::canonical(1), 1);
    RunResult ok = run(planner2, f, spec, {0, 0}, 1, 400.0, truth);
    CHECK_FALSE(ok.domination_violated);
}

TEST_CASE("planner-declared convergence ends the run early") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();
    GradientAscentPlanner planner(4);
    RunResult r = run(planner, f, spec, spec.snap({0.75, 1.5}), 250, truth.lipschitz, truth);
    CHECK(r.planner_stopped);
    CHECK(r.steps_taken < 250);
    CHECK(r.distance_at_stop == doctest::Approx(r.log.final_cumulative_distance));
}

TEST_CASE("run rejects incoherent setups") {
    GridSpec spec = paper_grid();
    RbfObjective f = paper_3rbf();
    GroundTruth truth = paper_3rbf_truth();
    OopaPlanner planner(spec, ActionSet::canonical(2), 1);
    CHECK_THROWS_AS(run(planner, f, spec, {30, 2}, 5, 364.54, truth), std::invalid_argument);
    CHECK_THROWS_AS(run(planner, f, spec, {1, 1}, 0, 364.54, truth), std::invalid_argument);
    CHECK_THROWS_AS(run(planner, f, spec, {1, 1}, 5, 0.0, truth), std::invalid_argument);
}
