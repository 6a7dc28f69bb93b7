#pragma once

#include <optional>
#include <vector>

#include "oopa/grid.hpp"

namespace oopa {

struct Sample {
    Vec pos{};
    double value = 0.0;
};

/// Samples in acquisition order, one entry per distinct position.
/// Re-adding a visited position is ignored (the bound is idempotent in
/// repeated samples), so size() never exceeds the number of distinct visits.
class SampleSet {
public:
    /// Returns false (and leaves the set unchanged) when pos is already present.
    bool add(const Vec& pos, double value);
    bool contains(const Vec& pos) const;

    bool empty() const { return samples_.empty(); }
    int size() const { return static_cast<int>(samples_.size()); }
    const Sample& operator[](int i) const { return samples_[i]; }
    const std::vector<Sample>& items() const { return samples_; }

private:
    std::vector<Sample> samples_;
};

/// Saw-tooth upper bound B evaluated at every grid point:
///   B(x) = min over samples of [f(x_s) + M * ||x - x_s||]
/// +inf sentinel everywhere while the sample set is empty.
struct BoundField {
    double lipschitz = 0.0;        // M
    std::vector<double> values;    // indexed by flat grid index
    int source_samples = 0;        // staleness stamp
};

BoundField make_empty_bound(const GridSpec& spec, double lipschitz);

/// Exact construction from scratch, O(|grid| * |S|). Also serves as the
/// oracle that the incremental overlay path is tested against.
BoundField rebuild_bound(const SampleSet& samples, const GridSpec& spec, double lipschitz);

/// Pointwise min of the field with one extra sample cone. Composing overlays
/// over S in any order reproduces rebuild_bound.
BoundField min_overlay(const BoundField& base, const GridSpec& spec, const Sample& extra);
void min_overlay_inplace(BoundField& field, const GridSpec& spec, const Sample& extra);

/// Nearest-sample function prediction. Exact stored value when x itself was
/// sampled; equidistant ties resolve to the earliest-acquired sample.
/// Throws std::invalid_argument on an empty sample set.
double f_hat(const SampleSet& samples, const Vec& x, int dim);

/// Nearest-sample value and squared distance per grid point; the vectorized
/// form of f_hat used by the planner kernels (identical tie-breaking).
struct NearestField {
    std::vector<double> value;
    std::vector<double> dist2;
    int source_samples = 0;
};
NearestField build_nearest_field(const SampleSet& samples, const GridSpec& spec);

/// Iterated 1-D trapezoid over the uniform grid (weights from
/// trapezoid_weights).
double integrate_trapezoid(const std::vector<double>& values, const GridSpec& spec);

/// Predicted bound refinement for taking action u in state x:
///   B1 = overlay of (x, f_hat(x)); B2 = overlay of (x_next, f_hat over S1);
///   volume = trapezoidal integral of B1 - B2 (>= 0).
/// Empty when the action leaves the grid.
struct RefinementResult {
    double volume = 0.0;
    BoundField b1;
    BoundField b2;
};
std::optional<RefinementResult> refinement(const SampleSet& samples, const BoundField& bound,
                                           const GridSpec& spec, const GridPos& x,
                                           const Action& u);

/// Integral of the bound decrease between two snapshots of the same grid.
/// Throws std::invalid_argument when grids or Lipschitz constants differ.
double actual_refinement(const BoundField& before, const BoundField& after, const GridSpec& spec);

}  // namespace oopa
