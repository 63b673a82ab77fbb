#pragma once

#include <cstdint>
#include <optional>

#include "cmdp/function_class.hpp"
#include "cmdp/rng.hpp"
#include "cmdp/types.hpp"

namespace cmdp {

enum class EnvKind { doubly_stochastic, lower_bound, random_realizable };

struct GenSpec {
    EnvKind kind = EnvKind::doubly_stochastic;
    /// States per inner layer.
    std::size_t M = 2;
    std::size_t H = 3;
    std::size_t n_actions = 2;
    std::size_t n_contexts = 1;
    std::size_t size_F = 1;
    std::size_t size_Fp = 1;
    std::uint64_t seed = 0;
    /// Entrywise lower bound on first-step transitions; 1/(2M) when unset.
    std::optional<double> p_min_target;
    /// Minimal sup-norm (rewards) or max-row L1 (dynamics) gap between members.
    double reward_gap = 0.1;
    /// All contexts share one kernel (needed by rm_ucid).
    bool shared_dynamics = false;

    bool operator==(const GenSpec&) const = default;
};

/// A generated or loaded instance with optional classes. Truth indices are
/// harness-side and never handed to a learner.
struct EnvBundle {
    LayeredCMDP cmdp;
    std::optional<RewardFunctionClass> reward_class;
    std::optional<std::size_t> reward_truth;
    std::optional<DynamicsClass> dynamics_class;
    std::optional<std::size_t> dynamics_truth;
};

/// Layers S_0 = {0}, M states in each of layers 1..H-1, S_H = {M(H-1)+1}.
LayerPartition grid_partition(std::size_t M, std::size_t H);

/// First-step rows bounded below entrywise by p_min_target, doubly
/// stochastic M x M blocks between inner layers (convex combinations of
/// min(M!, 20) random permutations), uniform random mean rewards.
LayeredCMDP gen_doubly_stochastic(const GenSpec& spec, Rng& rng);

/// Uniform first transition, identity transitions between inner layers,
/// context-independent. Rewards are a per-state contextual bandit: each
/// member of the returned class picks a best arm per (c, s) with mean
/// 0.5 + gap/2 and 0.5 - gap/2 elsewhere. The instance realizes member
/// reward_truth of the bundle.
EnvBundle gen_lower_bound_instance(const GenSpec& spec, Rng& rng);

/// Doubly-stochastic instance plus a reward class and a dynamics class
/// that contain the truth at a random index. Throws std::runtime_error when
/// 1000 rejection-sampling attempts fail to place a decoy.
EnvBundle gen_random_realizable(const GenSpec& spec, Rng& rng);

/// Dispatch on spec.kind using Rng(spec.seed).
EnvBundle generate(const GenSpec& spec);

}  // namespace cmdp
