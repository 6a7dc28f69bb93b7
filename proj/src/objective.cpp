#include "oopa/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace oopa {

RbfObjective::RbfObjective(std::vector<RbfComponent> components, int dim)
    : components_(std::move(components)), dim_(dim) {
    if (dim_ < 1 || dim_ > kMaxDim) {
        throw std::invalid_argument("objective dimension must be 1 or " + std::to_string(kMaxDim));
    }
    for (const auto& c : components_) {
        for (int d = 0; d < dim_; ++d) {
            if (!(c.width[d] > 0.0)) {
                throw std::invalid_argument("RBF widths must be strictly positive");
            }
        }
    }
}

double RbfObjective::eval(const Vec& x) const {
    double sum = 0.0;
    for (const auto& c : components_) {
        double e = 0.0;
        for (int d = 0; d < dim_; ++d) {
            double u = (x[d] - c.center[d]) / c.width[d];
            e += u * u;
        }
        sum += c.height * std::exp(-e);
    }
    return sum;
}

Vec RbfObjective::gradient(const Vec& x) const {
    Vec g{};
    for (const auto& c : components_) {
        double e = 0.0;
        for (int d = 0; d < dim_; ++d) {
            double u = (x[d] - c.center[d]) / c.width[d];
            e += u * u;
        }
        double v = c.height * std::exp(-e);
        for (int d = 0; d < dim_; ++d) {
            g[d] += v * (-2.0 * (x[d] - c.center[d]) / (c.width[d] * c.width[d]));
        }
    }
    return g;
}

RbfObjective paper_3rbf() {
    std::vector<RbfComponent> comps = {
        {{1.3, 1.3}, 148.75, {0.75, 1.5}},
        {{0.6, 0.6}, 255.0, {2.75, 3.5}},
        {{1.0, 1.0}, 212.5, {3.25, 0.75}},
    };
    return RbfObjective(std::move(comps), 2);
}

GroundTruth paper_3rbf_truth() {
    return GroundTruth{{2.75, 3.5}, 255.0, 364.54};
}

double estimate_lipschitz(const RbfObjective& objective, const GridSpec& spec, int refinement) {
    if (refinement < 1) throw std::invalid_argument("refinement factor must be >= 1");
    double best = 0.0;
    for (int factor = 1; factor <= refinement; ++factor) {
        GridSpec fine = spec;
        fine.points_per_axis = (spec.points_per_axis - 1) * factor + 1;
        const int total = fine.total_points();
        for (int f = 0; f < total; ++f) {
            Vec g = objective.gradient(fine.coords(fine.unflat(f)));
            double norm2 = 0.0;
            for (int d = 0; d < fine.dim; ++d) norm2 += g[d] * g[d];
            double norm = std::sqrt(norm2);
            if (norm > best) best = norm;
        }
    }
    return best;
}

}  // namespace oopa
