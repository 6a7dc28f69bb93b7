#pragma once

#include <optional>

#include "oopa/planner.hpp"

namespace oopa {

/// Classical DOO baseline: commits to travel to the current argmax of the
/// saw-tooth bound (axis-ordered Manhattan route) and retargets only once
/// that point is reached. Samples are still taken at every grid step along
/// the way.
class CdooPlanner : public Planner {
public:
    Decision plan(const StepContext& ctx) override;
    std::string_view name() const override { return "cdoo"; }

    std::optional<int> target_flat() const { return target_; }

private:
    std::optional<int> target_;
};

/// Least-squares plane fit over the n_neighbors samples nearest to x;
/// returns the plane gradient, or nothing when the neighbors are affinely
/// dependent (degenerate fit) or there are too few samples.
std::optional<Vec> llr_gradient(const SampleSet& samples, const Vec& x, int n_neighbors, int dim);

/// Gradient ascent via local linear regression: follows the fitted plane's
/// gradient one grid step at a time. Declares convergence on position
/// oscillation or when the gradient norm drops below tolerance. Until the
/// first fit succeeds the planner walks a short axis-alternating bootstrap
/// pattern so the regression gets affinely independent support; afterwards a
/// degenerate fit keeps the previous heading.
class GradientAscentPlanner : public Planner {
public:
    explicit GradientAscentPlanner(int n_neighbors = 4, double gradient_tol = 1e-6);

    Decision plan(const StepContext& ctx) override;
    std::string_view name() const override { return "gradient"; }

private:
    int n_neighbors_;
    double gradient_tol_;
    Vec heading_{};        // last successful gradient
    bool had_fit_ = false;
    bool last_move_followed_gradient_ = false;
    int calls_ = 0;
};

}  // namespace oopa
