// Compares the production planning kernels (fused, OpenMP-parallel) against
// the serial reference implementations on the standard objective at several
// grid sizes.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oopa/objective.hpp"
#include "oopa/reference.hpp"

using namespace oopa;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

SampleSet random_samples(const GridSpec& spec, const RbfObjective& objective, int count,
                         unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(0, spec.total_points() - 1);
    SampleSet samples;
    while (samples.size() < count) {
        const Vec pos = spec.coords(spec.unflat(dist(rng)));
        samples.add(pos, objective.eval(pos));
    }
    return samples;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled (serial build)\n");
#endif
    const RbfObjective objective = paper_3rbf();
    const double m = paper_3rbf_truth().lipschitz;

    std::printf("%-8s %-22s %12s %12s %8s\n", "grid", "kernel", "reference [s]", "kernel [s]",
                "speedup");
    for (int n : {21, 31, 41}) {
        const GridSpec spec = make_grid({0.0, 0.0}, {4.0, 4.0}, n, 2);
        const ActionSet actions = ActionSet::canonical(2);
        const SampleSet samples = random_samples(spec, objective, 40, 7u);
        const BoundField bound = rebuild_bound(samples, spec, m);
        const PlannerWorkspace ws(spec, actions);

        double serial = time_best_of(3, [&] { (void)ref::rebuild_bound(samples, spec, m); });
        double parallel = time_best_of(3, [&] { (void)rebuild_bound(samples, spec, m); });
        std::printf("%-8d %-22s %12.6f %12.6f %7.2fx\n", n, "rebuild_bound", serial, parallel,
                    serial / parallel);

        serial = time_best_of(1, [&] {
            (void)ref::build_reward_field(samples, bound, spec, actions);
        });
        parallel = time_best_of(1, [&] {
            (void)build_reward_field(samples, bound, spec, actions, ws);
        });
        std::printf("%-8d %-22s %12.6f %12.6f %7.2fx\n", n, "build_reward_field", serial,
                    parallel, serial / parallel);

        const RewardField reward = build_reward_field(samples, bound, spec, actions, ws);
        QTable q_serial = make_qtable(spec, actions);
        QTable q_parallel = make_qtable(spec, actions);
        serial = time_best_of(3, [&] {
            for (int i = 0; i < 50; ++i) ref::vi_sweep(q_serial, reward, spec, actions);
        });
        parallel = time_best_of(3, [&] {
            for (int i = 0; i < 50; ++i) vi_sweep(q_parallel, reward, spec, actions, ws.successors);
        });
        std::printf("%-8d %-22s %12.6f %12.6f %7.2fx\n", n, "vi_sweep x50", serial, parallel,
                    serial / parallel);
    }
    return 0;
}
