#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace oopa {

// The library supports 1-D and 2-D operating spaces; experiments use 2-D.
inline constexpr int kMaxDim = 2;

// Physical position in meters. Axes beyond the active dimension stay zero.
using Vec = std::array<double, kMaxDim>;
// Grid index per axis, each in [0, n_grid-1].
using IVec = std::array<int, kMaxDim>;
using GridPos = IVec;

inline double squared_distance(const Vec& a, const Vec& b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

inline double distance(const Vec& a, const Vec& b, int dim) {
    return std::sqrt(squared_distance(a, b, dim));
}

/// Uniform rectangular grid with n_grid equidistant points per axis.
struct GridSpec {
    int dim = 2;               // p
    Vec lower{};
    Vec upper{};
    int points_per_axis = 2;   // n_grid

    double step(int axis) const {
        return (upper[axis] - lower[axis]) / static_cast<double>(points_per_axis - 1);
    }

    int total_points() const {
        int n = 1;
        for (int d = 0; d < dim; ++d) n *= points_per_axis;
        return n;
    }

    bool contains(const GridPos& p) const {
        for (int d = 0; d < dim; ++d) {
            if (p[d] < 0 || p[d] >= points_per_axis) return false;
        }
        return true;
    }

    // Row-major with axis 0 fastest; fixes tie-breaking in every argmax scan.
    int flat(const GridPos& p) const {
        int f = 0;
        for (int d = dim - 1; d >= 0; --d) f = f * points_per_axis + p[d];
        return f;
    }

    GridPos unflat(int f) const {
        GridPos p{};
        for (int d = 0; d < dim; ++d) {
            p[d] = f % points_per_axis;
            f /= points_per_axis;
        }
        return p;
    }

    // Positions are always derived from indices; never accumulated.
    Vec coords(const GridPos& p) const {
        Vec x{};
        for (int d = 0; d < dim; ++d) x[d] = lower[d] + p[d] * step(d);
        return x;
    }

    GridPos snap(const Vec& x) const {
        GridPos p{};
        for (int d = 0; d < dim; ++d) {
            int i = static_cast<int>(std::lround((x[d] - lower[d]) / step(d)));
            if (i < 0) i = 0;
            if (i >= points_per_axis) i = points_per_axis - 1;
            p[d] = i;
        }
        return p;
    }
};

/// Validates bounds and resolution; throws std::invalid_argument on bad input.
GridSpec make_grid(const Vec& lower, const Vec& upper, int points_per_axis, int dim);

/// Unit grid displacement along one axis.
struct Action {
    IVec delta{};
    std::string name;
    int axis = 0;
    int dir = 0;   // +1 or -1
};

/// Discrete action set U. Canonical order for p=2 is up, down, left, right
/// (up increases axis 1); for p=1 it is right, left.
class ActionSet {
public:
    static ActionSet canonical(int dim);

    int size() const { return static_cast<int>(actions_.size()); }
    const Action& operator[](int i) const { return actions_[i]; }
    const std::vector<Action>& actions() const { return actions_; }

    // Index of the action stepping dir (+1/-1) along axis; -1 if absent.
    int find(int axis, int dir) const;

private:
    std::vector<Action> actions_;
};

/// Integrator dynamics x+u restricted to the grid; empty when the move
/// would leave X (the action is then inadmissible).
std::optional<GridPos> step_dynamics(const GridSpec& spec, const GridPos& x, const Action& u);

/// All grid points in row-major order (axis 0 fastest), length n_grid^p.
std::vector<GridPos> enumerate_grid(const GridSpec& spec);

/// Trapezoidal quadrature weight per grid point: product over axes of the
/// 1-D trapezoid weight (step/2 at the two boundary indices, step inside).
std::vector<double> trapezoid_weights(const GridSpec& spec);

}  // namespace oopa
