#include "oopa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oopa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int argmax_bound(const BoundField& bound, int skip_flat) {
    int best = -1;
    double best_value = -kInf;
    for (int f = 0; f < static_cast<int>(bound.values.size()); ++f) {
        if (f == skip_flat) continue;
        if (bound.values[f] > best_value) {
            best_value = bound.values[f];
            best = f;
        }
    }
    return best;
}
}  // namespace

Decision CdooPlanner::plan(const StepContext& ctx) {
    const int here = ctx.spec.flat(ctx.position);
    if (!target_ || *target_ == here) {
        // Retarget from the current bound; ties go to the first grid point in
        // row-major order. The current position is excluded so the robot
        // always keeps moving.
        int t = argmax_bound(ctx.bound, -1);
        if (t == here) t = argmax_bound(ctx.bound, here);
        target_ = t;
    }

    const GridPos target = ctx.spec.unflat(*target_);
    // Manhattan route in axis order: close the axis-0 distance first, then
    // axis 1. Axis-ordered legs walk whole fresh rows and columns, which
    // refines the bound noticeably faster than staircase routes of the same
    // length.
    int axis = 0;
    while (axis < ctx.spec.dim - 1 && target[axis] == ctx.position[axis]) ++axis;
    const int dir = target[axis] > ctx.position[axis] ? +1 : -1;
    Decision d;
    d.action = ctx.actions.find(axis, dir);
    return d;
}

std::optional<Vec> llr_gradient(const SampleSet& samples, const Vec& x, int n_neighbors, int dim) {
    const int unknowns = dim + 1;
    if (n_neighbors < unknowns || samples.size() < n_neighbors) return std::nullopt;

    // n_neighbors nearest samples; equidistant ties go to the earlier one.
    std::vector<std::pair<double, int>> order(samples.size());
    for (int s = 0; s < samples.size(); ++s) {
        order[s] = {squared_distance(samples[s].pos, x, dim), s};
    }
    std::sort(order.begin(), order.end());

    // Center the coordinates, then solve the (dim+1)x(dim+1) normal equations
    // for value = a . pos + c with Gaussian elimination.
    Vec mean{};
    for (int k = 0; k < n_neighbors; ++k) {
        const Sample& s = samples[order[k].second];
        for (int d = 0; d < dim; ++d) mean[d] += s.pos[d];
    }
    for (int d = 0; d < dim; ++d) mean[d] /= n_neighbors;

    double ata[kMaxDim + 1][kMaxDim + 1] = {};
    double atb[kMaxDim + 1] = {};
    for (int k = 0; k < n_neighbors; ++k) {
        const Sample& s = samples[order[k].second];
        double row[kMaxDim + 1];
        for (int d = 0; d < dim; ++d) row[d] = s.pos[d] - mean[d];
        row[dim] = 1.0;
        for (int i = 0; i < unknowns; ++i) {
            for (int j = 0; j < unknowns; ++j) ata[i][j] += row[i] * row[j];
            atb[i] += row[i] * s.value;
        }
    }

    double scale = 0.0;
    for (int i = 0; i < unknowns; ++i) {
        for (int j = 0; j < unknowns; ++j) scale = std::max(scale, std::abs(ata[i][j]));
    }
    const double pivot_tol = 1e-9 * scale;

    for (int col = 0; col < unknowns; ++col) {
        int pivot = col;
        for (int r = col + 1; r < unknowns; ++r) {
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        }
        if (std::abs(ata[pivot][col]) <= pivot_tol) return std::nullopt;  // degenerate fit
        if (pivot != col) {
            for (int j = 0; j < unknowns; ++j) std::swap(ata[col][j], ata[pivot][j]);
            std::swap(atb[col], atb[pivot]);
        }
        for (int r = 0; r < unknowns; ++r) {
            if (r == col) continue;
            const double factor = ata[r][col] / ata[col][col];
            for (int j = col; j < unknowns; ++j) ata[r][j] -= factor * ata[col][j];
            atb[r] -= factor * atb[col];
        }
    }

    Vec gradient{};
    for (int d = 0; d < dim; ++d) gradient[d] = atb[d] / ata[d][d];
    return gradient;
}

GradientAscentPlanner::GradientAscentPlanner(int n_neighbors, double gradient_tol)
    : n_neighbors_(n_neighbors), gradient_tol_(gradient_tol) {
    if (n_neighbors_ < 3) throw std::invalid_argument("LLR needs at least 3 neighbors");
}

Decision GradientAscentPlanner::plan(const StepContext& ctx) {
    const Vec here = ctx.spec.coords(ctx.position);
    const int call = calls_++;

    // Expand the neighborhood until the fit has full rank; degenerate subsets
    // are unavoidable while the early samples are collinear.
    std::optional<Vec> gradient;
    for (int nn = n_neighbors_; nn <= ctx.samples.size(); ++nn) {
        gradient = llr_gradient(ctx.samples, here, nn, ctx.spec.dim);
        if (gradient) break;
    }
    if (gradient) {
        double norm2 = 0.0;
        for (int d = 0; d < ctx.spec.dim; ++d) norm2 += (*gradient)[d] * (*gradient)[d];
        if (std::sqrt(norm2) < gradient_tol_) return Decision{};  // flat plane: converged
        heading_ = *gradient;
        had_fit_ = true;
    }

    int best_action = -1;
    bool gradient_move = false;
    if (!had_fit_) {
        // Bootstrap walk: alternate the preferred axis each step so the first
        // few samples are not collinear, and never step back onto the previous
        // position. A straight march would stay degenerate until a wall.
        std::vector<int> preference;
        if (ctx.spec.dim == 1) {
            preference = {0, 1};
        } else {
            preference = (call % 2 == 0) ? std::vector<int>{0, 3, 1, 2}
                                         : std::vector<int>{3, 0, 2, 1};
        }
        for (int a : preference) {
            auto next = step_dynamics(ctx.spec, ctx.position, ctx.actions[a]);
            if (!next) continue;
            if (ctx.has_previous && *next == ctx.previous) continue;
            best_action = a;
            break;
        }
    } else {
        // Admissible action best aligned with the heading; ties go to
        // canonical action order.
        double best_dot = -kInf;
        for (int a = 0; a < ctx.actions.size(); ++a) {
            const Action& act = ctx.actions[a];
            if (!step_dynamics(ctx.spec, ctx.position, act)) continue;
            const double dot = heading_[act.axis] * act.dir * ctx.spec.step(act.axis);
            if (dot > best_dot) {
                best_dot = dot;
                best_action = a;
            }
        }
        gradient_move = true;
    }

    // Oscillation between two gradient-driven moves signals a maximum between
    // the grid points. Undoing the last bootstrap step is not convergence.
    if (gradient_move && last_move_followed_gradient_ && best_action >= 0 &&
        ctx.has_previous) {
        const GridPos next = *step_dynamics(ctx.spec, ctx.position, ctx.actions[best_action]);
        if (next == ctx.previous) return Decision{};
    }
    last_move_followed_gradient_ = gradient_move;
    Decision d;
    d.action = best_action;
    return d;
}

}  // namespace oopa
