#include "oopa/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oopa::ref {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BoundField rebuild_bound(const SampleSet& samples, const GridSpec& spec, double lipschitz) {
    if (!(lipschitz > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");
    BoundField field = make_empty_bound(spec, lipschitz);
    const int total = spec.total_points();
    for (int f = 0; f < total; ++f) {
        const Vec x = spec.coords(spec.unflat(f));
        double best = kInf;
        for (int s = 0; s < samples.size(); ++s) {
            double cone = samples[s].value +
                          lipschitz * std::sqrt(squared_distance(x, samples[s].pos, spec.dim));
            if (cone < best) best = cone;
        }
        field.values[f] = best;
    }
    field.source_samples = samples.size();
    return field;
}

RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions) {
    if (samples.empty()) throw std::invalid_argument("reward field needs a nonempty sample set");
    const int total = spec.total_points();
    const int n_act = actions.size();

    RewardField out;
    out.n_actions = n_act;
    out.rho.assign(static_cast<size_t>(total) * n_act, 0.0);
    out.refinement.assign(static_cast<size_t>(total) * n_act, 0.0);
    out.built_at_samples = samples.size();

    for (int f = 0; f < total; ++f) {
        const GridPos x = spec.unflat(f);
        const double fx = f_hat(samples, spec.coords(x), spec.dim);
        const double weight = 0.5 * (fx + bound.values[f]);
        for (int a = 0; a < n_act; ++a) {
            auto result = refinement(samples, bound, spec, x, actions[a]);
            if (!result) continue;
            out.refinement[static_cast<size_t>(f) * n_act + a] = result->volume;
            out.rho[static_cast<size_t>(f) * n_act + a] = weight * result->volume;
        }
    }
    return out;
}

void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions) {
    const int total = spec.total_points();
    const int n_act = actions.size();
    const std::vector<int> succ = successor_table(spec, actions);
    std::vector<double> next(q.q.size());
    for (int f = 0; f < total; ++f) {
        for (int a = 0; a < n_act; ++a) {
            const size_t idx = static_cast<size_t>(f) * n_act + a;
            const int fn = succ[idx];
            if (fn < 0) {
                next[idx] = q.q[idx];
                continue;
            }
            double best = -kInf;
            for (int a2 = 0; a2 < n_act; ++a2) {
                const size_t nidx = static_cast<size_t>(fn) * n_act + a2;
                if (succ[nidx] < 0) continue;
                if (q.q[nidx] > best) best = q.q[nidx];
            }
            if (best == -kInf) best = 0.0;
            next[idx] = reward.rho[idx] + best;
        }
    }
    q.q.swap(next);
    q.sweeps_done += 1;
}

}  // namespace oopa::ref
