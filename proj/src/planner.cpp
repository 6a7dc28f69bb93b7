#include "oopa/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oopa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QTable make_qtable(const GridSpec& spec, const ActionSet& actions) {
    QTable q;
    q.n_actions = actions.size();
    q.q.assign(static_cast<size_t>(spec.total_points()) * actions.size(), 0.0);
    q.sweeps_done = 0;
    return q;
}

std::vector<int> successor_table(const GridSpec& spec, const ActionSet& actions) {
    const int total = spec.total_points();
    const int n_act = actions.size();
    std::vector<int> succ(static_cast<size_t>(total) * n_act, -1);
    for (int f = 0; f < total; ++f) {
        const GridPos x = spec.unflat(f);
        for (int a = 0; a < n_act; ++a) {
            auto next = step_dynamics(spec, x, actions[a]);
            if (next) succ[static_cast<size_t>(f) * n_act + a] = spec.flat(*next);
        }
    }
    return succ;
}

DistanceTable::DistanceTable(const GridSpec& spec, int cache_cap)
    : total_(spec.total_points()), dim_(spec.dim) {
    coords_.resize(total_);
    for (int f = 0; f < total_; ++f) coords_[f] = spec.coords(spec.unflat(f));
    if (total_ <= cache_cap) {
        matrix_.resize(static_cast<size_t>(total_) * total_);
#pragma omp parallel for schedule(static)
        for (int a = 0; a < total_; ++a) {
            for (int b = 0; b < total_; ++b) {
                matrix_[static_cast<size_t>(a) * total_ + b] =
                    std::sqrt(squared_distance(coords_[a], coords_[b], dim_));
            }
        }
    }
}

PlannerWorkspace::PlannerWorkspace(const GridSpec& spec, const ActionSet& actions)
    : successors(successor_table(spec, actions)),
      weights(trapezoid_weights(spec)),
      distances(spec) {}

RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions,
                               const PlannerWorkspace& ws) {
    if (samples.empty()) throw std::invalid_argument("reward field needs a nonempty sample set");
    const int total = spec.total_points();
    const int n_act = actions.size();
    const double m = bound.lipschitz;

    RewardField out;
    out.n_actions = n_act;
    out.rho.assign(static_cast<size_t>(total) * n_act, 0.0);
    out.refinement.assign(static_cast<size_t>(total) * n_act, 0.0);
    out.built_at_samples = samples.size();

    const NearestField nearest = build_nearest_field(samples, spec);
    const std::vector<double>& b = bound.values;
    const std::vector<double>& w = ws.weights;

#pragma omp parallel for schedule(static)
    for (int f = 0; f < total; ++f) {
        const double fx = nearest.value[f];
        const double weight = 0.5 * (fx + b[f]);
        for (int a = 0; a < n_act; ++a) {
            const int fn = ws.successors[static_cast<size_t>(f) * n_act + a];
            if (fn < 0) continue;

            // Prediction at the successor over S + virtual sample at x; the
            // virtual entry loses equidistant ties to real samples.
            const double virt_d2 =
                squared_distance(ws.distances.coords(f), ws.distances.coords(fn), spec.dim);
            const double fnext = (nearest.dist2[fn] <= virt_d2) ? nearest.value[fn] : fx;

            // Integral of B1 - B2 without materializing either field:
            //   B1(y) = min(B(y), fx + M*d(y,x)),  B2(y) = min(B1(y), cone(y)).
            double acc = 0.0;
            for (int y = 0; y < total; ++y) {
                const double b1 = std::min(b[y], fx + m * ws.distances(y, f));
                const double diff = b1 - (fnext + m * ws.distances(y, fn));
                if (diff > 0.0) acc += w[y] * diff;
            }
            out.refinement[static_cast<size_t>(f) * n_act + a] = acc;
            out.rho[static_cast<size_t>(f) * n_act + a] = weight * acc;
        }
    }
    return out;
}

RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions) {
    PlannerWorkspace ws(spec, actions);
    return build_reward_field(samples, bound, spec, actions, ws);
}

void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions, const std::vector<int>& successors) {
    const int total = spec.total_points();
    const int n_act = actions.size();
    if (static_cast<int>(q.q.size()) != total * n_act ||
        q.q.size() != reward.rho.size()) {
        throw std::invalid_argument("Q table and reward field shapes disagree");
    }
    std::vector<double> next(q.q.size());
#pragma omp parallel for schedule(static)
    for (int f = 0; f < total; ++f) {
        for (int a = 0; a < n_act; ++a) {
            const size_t idx = static_cast<size_t>(f) * n_act + a;
            const int fn = successors[idx];
            if (fn < 0) {
                next[idx] = q.q[idx];
                continue;
            }
            double best = -kInf;
            for (int a2 = 0; a2 < n_act; ++a2) {
                const size_t nidx = static_cast<size_t>(fn) * n_act + a2;
                if (successors[nidx] < 0) continue;
                if (q.q[nidx] > best) best = q.q[nidx];
            }
            if (best == -kInf) best = 0.0;  // unreachable for n_grid >= 2
            next[idx] = reward.rho[idx] + best;
        }
    }
    q.q.swap(next);
    q.sweeps_done += 1;
}

void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions) {
    vi_sweep(q, reward, spec, actions, successor_table(spec, actions));
}

int greedy_action(const QTable& q, const GridSpec& spec, const ActionSet& actions,
                  const std::vector<int>& successors, const GridPos& x) {
    const int f = spec.flat(x);
    const int n_act = actions.size();
    int best_action = -1;
    double best = -kInf;
    for (int a = 0; a < n_act; ++a) {
        const size_t idx = static_cast<size_t>(f) * n_act + a;
        if (successors[idx] < 0) continue;
        if (q.q[idx] > best) {
            best = q.q[idx];
            best_action = a;
        }
    }
    return best_action;
}

int plan_step(const SampleSet& samples, const BoundField& bound, QTable& q,
              const GridSpec& spec, const ActionSet& actions, const PlannerWorkspace& ws,
              const GridPos& x, int sweeps, PlanDiagnostics* diag) {
    if (sweeps < 1) throw std::invalid_argument("at least one VI sweep is required");
    const RewardField reward = build_reward_field(samples, bound, spec, actions, ws);
    for (int i = 0; i < sweeps; ++i) vi_sweep(q, reward, spec, actions, ws.successors);
    const int a = greedy_action(q, spec, actions, ws.successors, x);
    if (diag) {
        const size_t idx = static_cast<size_t>(spec.flat(x)) * actions.size() + a;
        diag->predicted_refinement = reward.refinement[idx];
        diag->chosen_q = q.q[idx];
    }
    return a;
}

int plan_step(const SampleSet& samples, QTable& q, const GridSpec& spec,
              const ActionSet& actions, const GridPos& x, double lipschitz, int sweeps,
              PlanDiagnostics* diag) {
    PlannerWorkspace ws(spec, actions);
    const BoundField bound = rebuild_bound(samples, spec, lipschitz);
    return plan_step(samples, bound, q, spec, actions, ws, x, sweeps, diag);
}

OopaPlanner::OopaPlanner(const GridSpec& spec, const ActionSet& actions, int sweeps)
    : q_(make_qtable(spec, actions)), sweeps_(sweeps), ws_(spec, actions) {
    if (sweeps_ < 1) throw std::invalid_argument("at least one VI sweep is required");
}

Decision OopaPlanner::plan(const StepContext& ctx) {
    const RewardField reward =
        build_reward_field(ctx.samples, ctx.bound, ctx.spec, ctx.actions, ws_);
    for (int i = 0; i < sweeps_; ++i) vi_sweep(q_, reward, ctx.spec, ctx.actions, ws_.successors);
    const int a = greedy_action(q_, ctx.spec, ctx.actions, ws_.successors, ctx.position);
    Decision d;
    d.action = a;
    d.predicted_refinement =
        reward.refinement[static_cast<size_t>(ctx.spec.flat(ctx.position)) * ctx.actions.size() + a];
    last_reward_ = reward;
    return d;
}

}  // namespace oopa
