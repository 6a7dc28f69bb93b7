#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "oopa/bound.hpp"
#include "oopa/grid.hpp"

namespace oopa {

/// Reward rho(x,u) = (f_hat(x) + B(x)) / 2 * r(x,u) and the raw predicted
/// refinement volume r(x,u), laid out [flat_state * n_actions + action].
struct RewardField {
    int n_actions = 0;
    std::vector<double> rho;
    std::vector<double> refinement;
    int built_at_samples = 0;
};

/// Action values laid out like RewardField. Initialized to zero at trajectory
/// start and carried across steps (warm start); entries of inadmissible
/// actions are never read or selected.
struct QTable {
    int n_actions = 0;
    std::vector<double> q;
    int sweeps_done = 0;
};

QTable make_qtable(const GridSpec& spec, const ActionSet& actions);

/// Successor flat index per (state, action); -1 when the move leaves the grid.
std::vector<int> successor_table(const GridSpec& spec, const ActionSet& actions);

/// Pairwise grid point distances, cached as a dense matrix on grids small
/// enough to afford G^2 doubles and computed on the fly otherwise. Both paths
/// evaluate the same expression, so results are identical.
class DistanceTable {
public:
    explicit DistanceTable(const GridSpec& spec, int cache_cap = 4096);

    double operator()(int a, int b) const {
        if (!matrix_.empty()) return matrix_[static_cast<size_t>(a) * total_ + b];
        return std::sqrt(squared_distance(coords_[a], coords_[b], dim_));
    }

    const Vec& coords(int f) const { return coords_[f]; }
    bool cached() const { return !matrix_.empty(); }

private:
    int total_ = 0;
    int dim_ = 0;
    std::vector<Vec> coords_;
    std::vector<double> matrix_;
};

/// Precomputed per-grid constants shared by the planning kernels.
struct PlannerWorkspace {
    PlannerWorkspace(const GridSpec& spec, const ActionSet& actions);

    std::vector<int> successors;
    std::vector<double> weights;   // trapezoid quadrature weights
    DistanceTable distances;
};

/// Builds rho and r for every grid state and admissible action. Equivalent to
/// composing refinement() and f_hat() per pair, fused into one pass per pair
/// so no intermediate bound fields are materialized. Parallel over states.
RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions,
                               const PlannerWorkspace& ws);
RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions);

/// One synchronous (Jacobi) value-iteration sweep:
///   Q+(x,u) = rho(x,u) + max over admissible u' of Q(g(x,u), u')
/// computed entirely from the pre-sweep table, so iteration order is
/// irrelevant. Parallel over states.
void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions, const std::vector<int>& successors);
void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions);

/// Greedy admissible action at x; ties resolve to the first maximizer in
/// canonical action order.
int greedy_action(const QTable& q, const GridSpec& spec, const ActionSet& actions,
                  const std::vector<int>& successors, const GridPos& x);

struct PlanDiagnostics {
    double predicted_refinement = 0.0;
    double chosen_q = 0.0;
};

/// One planning step: build rho once from the current samples and bound,
/// apply the given number of VI sweeps to the warm-started table, and return
/// the greedy action at x. The reward is frozen across the sweeps (the sample
/// set does not change inside a step, so recomputing it would be a no-op).
int plan_step(const SampleSet& samples, const BoundField& bound, QTable& q,
              const GridSpec& spec, const ActionSet& actions, const PlannerWorkspace& ws,
              const GridPos& x, int sweeps, PlanDiagnostics* diag = nullptr);

/// Convenience overload that rebuilds the bound from the samples.
int plan_step(const SampleSet& samples, QTable& q, const GridSpec& spec,
              const ActionSet& actions, const GridPos& x, double lipschitz, int sweeps,
              PlanDiagnostics* diag = nullptr);

/// Per-step decision of any planning method. action < 0 signals that the
/// method declares convergence and stops the trajectory.
struct Decision {
    int action = -1;
    double predicted_refinement = 0.0;
    bool stop() const { return action < 0; }
};

struct StepContext {
    const GridSpec& spec;
    const ActionSet& actions;
    const SampleSet& samples;
    const BoundField& bound;
    GridPos position{};
    GridPos previous{};
    bool has_previous = false;
};

class Planner {
public:
    virtual ~Planner() = default;
    virtual Decision plan(const StepContext& ctx) = 0;
    virtual std::string_view name() const = 0;
};

/// Path-aware optimistic optimization: plans each move by value iteration
/// over predicted bound-refinement rewards, warm-starting the Q-table across
/// trajectory steps.
class OopaPlanner : public Planner {
public:
    OopaPlanner(const GridSpec& spec, const ActionSet& actions, int sweeps);

    Decision plan(const StepContext& ctx) override;
    std::string_view name() const override { return "oopa"; }

    const QTable& qtable() const { return q_; }
    const RewardField& last_reward() const { return last_reward_; }
    int sweeps() const { return sweeps_; }

private:
    QTable q_;
    int sweeps_;
    PlannerWorkspace ws_;
    RewardField last_reward_;
};

}  // namespace oopa
