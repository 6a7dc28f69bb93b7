#pragma once

#include <vector>

#include "oopa/grid.hpp"

namespace oopa {

/// Black-box function sampled by the robot. Evaluation must be pure and
/// deterministic; concurrent calls are safe.
struct Objective {
    virtual ~Objective() = default;
    virtual double eval(const Vec& x) const = 0;
};

struct RbfComponent {
    Vec width{};     // b_i, strictly positive per axis
    double height = 0.0;  // h_i
    Vec center{};    // c_i
};

/// Sum of anisotropic Gaussian bumps:
///   f(x) = sum_i h_i * exp(-sum_d ((x_d - c_id) / b_id)^2)
class RbfObjective : public Objective {
public:
    RbfObjective(std::vector<RbfComponent> components, int dim);

    double eval(const Vec& x) const override;
    Vec gradient(const Vec& x) const;

    int dim() const { return dim_; }
    const std::vector<RbfComponent>& components() const { return components_; }

private:
    std::vector<RbfComponent> components_;
    int dim_;
};

/// Known optimum used by the benchmark metrics.
struct GroundTruth {
    Vec x_star{};
    double f_star = 0.0;
    double lipschitz = 0.0;   // reference constant M for the setup
};

/// Reference 3-bump objective on [0,4]^2 with global maximum 255 at [2.75, 3.5].
RbfObjective paper_3rbf();
GroundTruth paper_3rbf_truth();

/// Lipschitz constant estimate: the largest analytic gradient norm seen on
/// grids refined by every factor 1..refinement (nested candidate sets keep the
/// estimate monotone in the refinement factor).
double estimate_lipschitz(const RbfObjective& objective, const GridSpec& spec, int refinement);

}  // namespace oopa
