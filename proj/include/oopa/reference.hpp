#pragma once

#include "oopa/bound.hpp"
#include "oopa/planner.hpp"

namespace oopa::ref {

/// Serial counterparts of the OpenMP kernels. They follow the operation
/// definitions literally (per-pair bound overlays, explicit integrands) and
/// are kept as test oracles and as the baseline for the kernel benchmark.

BoundField rebuild_bound(const SampleSet& samples, const GridSpec& spec, double lipschitz);

/// Literal composition: f_hat + refinement() per (state, action) pair.
RewardField build_reward_field(const SampleSet& samples, const BoundField& bound,
                               const GridSpec& spec, const ActionSet& actions);

void vi_sweep(QTable& q, const RewardField& reward, const GridSpec& spec,
              const ActionSet& actions);

}  // namespace oopa::ref
