#include "oopa/bound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oopa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool SampleSet::add(const Vec& pos, double value) {
    if (contains(pos)) return false;
    samples_.push_back({pos, value});
    return true;
}

bool SampleSet::contains(const Vec& pos) const {
    for (const auto& s : samples_) {
        if (s.pos == pos) return true;
    }
    return false;
}

BoundField make_empty_bound(const GridSpec& spec, double lipschitz) {
    BoundField field;
    field.lipschitz = lipschitz;
    field.values.assign(spec.total_points(), kInf);
    field.source_samples = 0;
    return field;
}

BoundField rebuild_bound(const SampleSet& samples, const GridSpec& spec, double lipschitz) {
    if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");
    BoundField field = make_empty_bound(spec, lipschitz);
    const int total = spec.total_points();
    const int n_samples = samples.size();
#pragma omp parallel for schedule(static)
    for (int f = 0; f < total; ++f) {
        const Vec x = spec.coords(spec.unflat(f));
        double best = kInf;
        for (int s = 0; s < n_samples; ++s) {
            double cone = samples[s].value +
                          lipschitz * std::sqrt(squared_distance(x, samples[s].pos, spec.dim));
            if (cone < best) best = cone;
        }
        field.values[f] = best;
    }
    field.source_samples = n_samples;
    return field;
}

void min_overlay_inplace(BoundField& field, const GridSpec& spec, const Sample& extra) {
    const int total = spec.total_points();
    const double m = field.lipschitz;
#pragma omp parallel for schedule(static)
    for (int f = 0; f < total; ++f) {
        double cone = extra.value + m * std::sqrt(squared_distance(spec.coords(spec.unflat(f)),
                                                                   extra.pos, spec.dim));
        if (cone < field.values[f]) field.values[f] = cone;
    }
    field.source_samples += 1;
}

BoundField min_overlay(const BoundField& base, const GridSpec& spec, const Sample& extra) {
    BoundField out = base;
    min_overlay_inplace(out, spec, extra);
    return out;
}

double f_hat(const SampleSet& samples, const Vec& x, int dim) {
    if (samples.empty()) throw std::invalid_argument("f_hat needs at least one sample");
    double best_d2 = kInf;
    double best_value = 0.0;
    for (int s = 0; s < samples.size(); ++s) {
        double d2 = squared_distance(samples[s].pos, x, dim);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_value = samples[s].value;
        }
    }
    return best_value;
}

NearestField build_nearest_field(const SampleSet& samples, const GridSpec& spec) {
    const int total = spec.total_points();
    NearestField out;
    out.value.assign(total, 0.0);
    out.dist2.assign(total, kInf);
    out.source_samples = samples.size();
    const int n_samples = samples.size();
#pragma omp parallel for schedule(static)
    for (int f = 0; f < total; ++f) {
        const Vec x = spec.coords(spec.unflat(f));
        double best_d2 = kInf;
        double best_value = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            double d2 = squared_distance(samples[s].pos, x, spec.dim);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_value = samples[s].value;
            }
        }
        out.dist2[f] = best_d2;
        out.value[f] = best_value;
    }
    return out;
}

double integrate_trapezoid(const std::vector<double>& values, const GridSpec& spec) {
    if (static_cast<int>(values.size()) != spec.total_points()) {
        throw std::invalid_argument("integrand size does not match the grid");
    }
    const std::vector<double> w = trapezoid_weights(spec);
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i];
    return acc;
}

std::optional<RefinementResult> refinement(const SampleSet& samples, const BoundField& bound,
                                           const GridSpec& spec, const GridPos& x,
                                           const Action& u) {
    if (samples.empty()) throw std::invalid_argument("refinement needs a nonempty sample set");
    auto next = step_dynamics(spec, x, u);
    if (!next) return std::nullopt;

    const Vec x_pos = spec.coords(x);
    const Vec next_pos = spec.coords(*next);

    const double fx = f_hat(samples, x_pos, spec.dim);

    RefinementResult out;
    out.b1 = min_overlay(bound, spec, {x_pos, fx});

    // f_hat(x_next) over S1 = S plus the virtual sample at x. The virtual
    // entry is appended last, so existing samples win equidistant ties.
    double best_d2 = kInf;
    double fnext = 0.0;
    for (int s = 0; s < samples.size(); ++s) {
        double d2 = squared_distance(samples[s].pos, next_pos, spec.dim);
        if (d2 < best_d2) {
            best_d2 = d2;
            fnext = samples[s].value;
        }
    }
    if (squared_distance(x_pos, next_pos, spec.dim) < best_d2) fnext = fx;

    out.b2 = min_overlay(out.b1, spec, {next_pos, fnext});

    std::vector<double> diff(out.b1.values.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = out.b1.values[i] - out.b2.values[i];
    out.volume = integrate_trapezoid(diff, spec);
    return out;
}

double actual_refinement(const BoundField& before, const BoundField& after, const GridSpec& spec) {
    if (before.values.size() != after.values.size() ||
        static_cast<int>(before.values.size()) != spec.total_points()) {
        throw std::invalid_argument("bound fields live on different grids");
    }
    if (before.lipschitz != after.lipschitz) {
        throw std::invalid_argument("bound fields use different Lipschitz constants");
    }
    std::vector<double> diff(before.values.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = before.values[i] - after.values[i];
    return integrate_trapezoid(diff, spec);
}

}  // namespace oopa
