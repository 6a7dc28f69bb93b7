#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "oopa/bound.hpp"
#include "oopa/objective.hpp"
#include "oopa/planner.hpp"

namespace oopa {

/// Running metrics over the samples gathered so far: the best value sampled
/// (f_best), the closest approach to x* (dist_to_opt) and the smallest
/// optimality gap f* - f (value_gap).
struct Metrics {
    double f_best = -std::numeric_limits<double>::infinity();
    double dist_to_opt = std::numeric_limits<double>::infinity();
    double value_gap = std::numeric_limits<double>::infinity();
};

void metrics_update(Metrics& m, const Vec& pos, double value, const GroundTruth& truth, int dim);

/// One trajectory step: the state at the start of the step, the decision, and
/// the refinement realized by executing it (known once the new sample is in).
struct StepRecord {
    int k = 0;
    GridPos position{};
    double sample = 0.0;
    int action = -1;
    double predicted_refinement = 0.0;
    double actual_refinement = 0.0;
    double cumulative_distance = 0.0;   // distance traveled to reach `position`
    Metrics metrics;                    // over samples up to and including `position`
    double plan_seconds = 0.0;          // wall clock, not exported to CSV
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    GridPos final_position{};
    double final_sample = 0.0;
    double final_cumulative_distance = 0.0;
    Metrics final_metrics;
    double mean_plan_seconds = 0.0;
};

struct RunResult {
    bool found_optimum = false;   // some sample within delta of x*
    double distance_to_optimum = std::numeric_limits<double>::quiet_NaN();
    bool planner_stopped = false;  // planner declared convergence before the budget
    double distance_at_stop = std::numeric_limits<double>::quiet_NaN();
    bool domination_violated = false;  // f exceeded B at a fresh sample (M too small)
    int steps_taken = 0;
    int samples_gathered = 0;   // distinct positions in the sample set
    TrajectoryLog log;
};

/// Observer payload emitted after each executed step.
struct StepEvent {
    int k = 0;
    GridPos position_before{};
    GridPos position_after{};
    double predicted_refinement = 0.0;
    double actual_refinement = 0.0;
    const SampleSet& samples;
    const BoundField& bound;   // after the new sample
};

struct RunOptions {
    double delta = 0.2;   // convergence accuracy, one grid step in the reference setup
    std::function<void(const StepEvent&)> observer;
};

/// Runs the sample -> plan -> act -> measure loop for n steps (or until the
/// planner declares convergence). The initial position is sampled before any
/// planning, and the position reached by the final action is sampled as well,
/// so a full run gathers n+1 samples. Deterministic given its inputs.
RunResult run(Planner& planner, const Objective& objective, const GridSpec& spec,
              const GridPos& start, int n_steps, double lipschitz, const GroundTruth& truth,
              const RunOptions& options = {});

}  // namespace oopa
