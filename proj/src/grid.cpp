#include "oopa/grid.hpp"

#include <stdexcept>

namespace oopa {

GridSpec make_grid(const Vec& lower, const Vec& upper, int points_per_axis, int dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw std::invalid_argument("grid dimension must be 1 or " + std::to_string(kMaxDim));
    }
    if (points_per_axis < 2) {
        throw std::invalid_argument("grid needs at least 2 points per axis");
    }
    for (int d = 0; d < dim; ++d) {
        if (!(upper[d] > lower[d])) {
            throw std::invalid_argument("grid upper corner must exceed lower corner on every axis");
        }
    }
    GridSpec spec;
    spec.dim = dim;
    spec.lower = lower;
    spec.upper = upper;
    spec.points_per_axis = points_per_axis;
    return spec;
}

ActionSet ActionSet::canonical(int dim) {
    ActionSet set;
    if (dim == 1) {
        set.actions_.push_back({{+1, 0}, "right", 0, +1});
        set.actions_.push_back({{-1, 0}, "left", 0, -1});
    } else {
        set.actions_.push_back({{0, +1}, "up", 1, +1});
        set.actions_.push_back({{0, -1}, "down", 1, -1});
        set.actions_.push_back({{-1, 0}, "left", 0, -1});
        set.actions_.push_back({{+1, 0}, "right", 0, +1});
    }
    return set;
}

int ActionSet::find(int axis, int dir) const {
    for (int i = 0; i < size(); ++i) {
        if (actions_[i].axis == axis && actions_[i].dir == dir) return i;
    }
    return -1;
}

std::optional<GridPos> step_dynamics(const GridSpec& spec, const GridPos& x, const Action& u) {
    GridPos next{};
    for (int d = 0; d < spec.dim; ++d) next[d] = x[d] + u.delta[d];
    if (!spec.contains(next)) return std::nullopt;
    return next;
}

std::vector<GridPos> enumerate_grid(const GridSpec& spec) {
    const int total = spec.total_points();
    std::vector<GridPos> points;
    points.reserve(total);
    for (int f = 0; f < total; ++f) points.push_back(spec.unflat(f));
    return points;
}

std::vector<double> trapezoid_weights(const GridSpec& spec) {
    const int total = spec.total_points();
    std::vector<double> w(total);
    for (int f = 0; f < total; ++f) {
        GridPos p = spec.unflat(f);
        double weight = 1.0;
        for (int d = 0; d < spec.dim; ++d) {
            double axis_w = spec.step(d);
            if (p[d] == 0 || p[d] == spec.points_per_axis - 1) axis_w *= 0.5;
            weight *= axis_w;
        }
        w[f] = weight;
    }
    return w;
}

}  // namespace oopa
