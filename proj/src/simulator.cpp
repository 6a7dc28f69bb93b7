#include "oopa/simulator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace oopa {

namespace {
constexpr double kDominationSlack = 1e-9;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

void metrics_update(Metrics& m, const Vec& pos, double value, const GroundTruth& truth, int dim) {
    m.f_best = std::max(m.f_best, value);
    m.dist_to_opt = std::min(m.dist_to_opt, distance(truth.x_star, pos, dim));
    m.value_gap = std::min(m.value_gap, truth.f_star - value);
}

RunResult run(Planner& planner, const Objective& objective, const GridSpec& spec,
              const GridPos& start, int n_steps, double lipschitz, const GroundTruth& truth,
              const RunOptions& options) {
    if (!spec.contains(start)) throw std::invalid_argument("start position is off the grid");
    if (n_steps < 1) throw std::invalid_argument("a run needs at least one step");
    if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");

    const ActionSet actions = ActionSet::canonical(spec.dim);

    RunResult result;
    SampleSet samples;
    BoundField bound = make_empty_bound(spec, lipschitz);
    Metrics metrics;

    GridPos position = start;
    GridPos previous = start;
    bool has_previous = false;
    double cumulative = 0.0;
    double current_sample = objective.eval(spec.coords(position));

    samples.add(spec.coords(position), current_sample);
    min_overlay_inplace(bound, spec, {spec.coords(position), current_sample});
    metrics_update(metrics, spec.coords(position), current_sample, truth, spec.dim);
    if (metrics.dist_to_opt <= options.delta) {
        result.found_optimum = true;
        result.distance_to_optimum = 0.0;
    }

    double total_plan_seconds = 0.0;
    result.log.steps.reserve(n_steps);

    for (int k = 0; k < n_steps; ++k) {
        StepContext ctx{spec, actions, samples, bound, position, previous, has_previous};
        const auto t0 = std::chrono::steady_clock::now();
        const Decision decision = planner.plan(ctx);
        const double plan_seconds = seconds_since(t0);
        total_plan_seconds += plan_seconds;

        if (decision.stop()) {
            result.planner_stopped = true;
            result.distance_at_stop = cumulative;
            break;
        }

        const Action& action = actions[decision.action];
        auto next = step_dynamics(spec, position, action);
        if (!next) throw std::logic_error("planner chose an inadmissible action");

        StepRecord rec;
        rec.k = k;
        rec.position = position;
        rec.sample = current_sample;
        rec.action = decision.action;
        rec.predicted_refinement = decision.predicted_refinement;
        rec.cumulative_distance = cumulative;
        rec.metrics = metrics;
        rec.plan_seconds = plan_seconds;

        cumulative += std::abs(action.delta[action.axis]) * spec.step(action.axis);
        const Vec next_pos = spec.coords(*next);
        const double next_sample = objective.eval(next_pos);

        if (next_sample > bound.values[spec.flat(*next)] + kDominationSlack &&
            !samples.contains(next_pos)) {
            result.domination_violated = true;
        }

        const BoundField before = bound;
        if (samples.add(next_pos, next_sample)) {
            min_overlay_inplace(bound, spec, {next_pos, next_sample});
        }
        rec.actual_refinement = actual_refinement(before, bound, spec);
        result.log.steps.push_back(rec);

        metrics_update(metrics, next_pos, next_sample, truth, spec.dim);
        if (!result.found_optimum && distance(truth.x_star, next_pos, spec.dim) <= options.delta) {
            result.found_optimum = true;
            result.distance_to_optimum = cumulative;
        }

        if (options.observer) {
            StepEvent event{k, position, *next, rec.predicted_refinement,
                            rec.actual_refinement, samples, bound};
            options.observer(event);
        }

        previous = position;
        has_previous = true;
        position = *next;
        current_sample = next_sample;
    }

    result.steps_taken = static_cast<int>(result.log.steps.size());
    result.samples_gathered = samples.size();
    result.log.final_position = position;
    result.log.final_sample = current_sample;
    result.log.final_cumulative_distance = cumulative;
    result.log.final_metrics = metrics;
    result.log.mean_plan_seconds =
        result.steps_taken > 0 ? total_plan_seconds / result.steps_taken : 0.0;
    return result;
}

}  // namespace oopa
