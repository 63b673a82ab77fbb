#pragma once

#include <memory>
#include <span>
#include <vector>

#include "cmdp/types.hpp"

namespace cmdp {

struct RewardSample {
    ContextIndex context = 0;
    State state = 0;
    Action action = 0;
    double reward = 0.0;
};

struct TransitionSample {
    ContextIndex context = 0;
    State state = 0;
    Action action = 0;
    State next_state = 0;
};

/// Regression data contributed by trajectories: H reward samples and H
/// transition samples per episode.
struct SampleBatch {
    std::vector<RewardSample> rewards;
    std::vector<TransitionSample> transitions;

    static SampleBatch from_trajectory(const Trajectory& traj);
};

/// Finite class of reward functions f(c, s, a) in [0,1], each a dense table,
/// with a running sum of squared errors per member. Member tables are shared
/// between copies; only the accumulators are per instance.
class RewardFunctionClass {
public:
    RewardFunctionClass() = default;
    /// Each table is indexed ((c * n_states) + s) * n_actions + a.
    RewardFunctionClass(std::size_t n_contexts, std::size_t n_states, std::size_t n_actions,
                        std::vector<std::vector<double>> members);

    std::size_t size() const { return members_->size(); }
    std::size_t n_contexts() const { return n_contexts_; }
    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double operator()(std::size_t member, ContextIndex c, State s, Action a) const {
        return (*members_)[member][index(c, s, a)];
    }
    std::span<const double> table(std::size_t member) const { return (*members_).at(member); }
    TabularRewards member_rewards(std::size_t member, ContextIndex c) const;

    std::span<const double> sse() const { return sse_; }
    double sse(std::size_t member) const { return sse_.at(member); }

    void update(const SampleBatch& batch);
    std::size_t fit() const;

private:
    std::size_t index(ContextIndex c, State s, Action a) const { return (c * n_states_ + s) * n_actions_ + a; }

    std::size_t n_contexts_ = 0;
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::shared_ptr<const std::vector<std::vector<double>>> members_ =
        std::make_shared<const std::vector<std::vector<double>>>();
    std::vector<double> sse_;
};

/// Finite class of context-dependent transition kernels P(s' | s, a, c).
/// Members must be row-normalized and layer-respecting.
class DynamicsClass {
public:
    DynamicsClass() = default;
    /// Each table is indexed (((c * n_states) + s) * n_actions + a) * n_states + s'.
    /// Throws std::invalid_argument if a member violates the simplex or layering.
    DynamicsClass(LayerPartition partition, std::size_t n_contexts, std::size_t n_actions,
                  std::vector<std::vector<double>> members);

    std::size_t size() const { return members_->size(); }
    std::size_t n_contexts() const { return n_contexts_; }
    std::size_t n_states() const { return partition_.n_states(); }
    std::size_t n_actions() const { return n_actions_; }
    const LayerPartition& partition() const { return partition_; }

    double operator()(std::size_t member, ContextIndex c, State s, Action a, State next) const {
        return (*members_)[member][index(c, s, a) + next];
    }
    std::span<const double> table(std::size_t member) const { return (*members_).at(member); }
    TabularDynamics member_dynamics(std::size_t member, ContextIndex c) const;

    std::span<const double> sse() const { return sse_; }
    double sse(std::size_t member) const { return sse_.at(member); }

    void update(const SampleBatch& batch);
    std::size_t fit() const;

private:
    std::size_t index(ContextIndex c, State s, Action a) const {
        return ((c * n_states() + s) * n_actions_ + a) * n_states();
    }

    LayerPartition partition_;
    std::size_t n_contexts_ = 0;
    std::size_t n_actions_ = 0;
    std::shared_ptr<const std::vector<std::vector<double>>> members_ =
        std::make_shared<const std::vector<std::vector<double>>>();
    std::vector<double> sse_;
};

/// sse[f] += sum (f(c,s,a) - r)^2. Rewards must be 0 or 1.
void lsr_update_rewards(RewardFunctionClass& cls, const SampleBatch& batch);
/// argmin of sse, lowest index on ties; index 0 on an empty history.
std::size_t lsr_fit_rewards(const RewardFunctionClass& cls);

/// sse[P] += sum over s' in the successor layer of (P(s'|s,a,c) - 1[s' = next])^2.
void lsr_update_dynamics(DynamicsClass& cls, const SampleBatch& batch);
std::size_t lsr_fit_dynamics(const DynamicsClass& cls);

/// Mixes every member with the uniform distribution over the successor layer:
/// (1 - rho) P + rho / |S_{h+1}|. rho must lie in (0, 0.5). Accumulators reset.
DynamicsClass mix_with_uniform(const DynamicsClass& cls, double rho);

/// Builds a reward class table from per-context mean rewards.
std::vector<double> reward_table_from(const std::vector<TabularRewards>& per_context);
/// Builds a dynamics class table from per-context kernels.
std::vector<double> dynamics_table_from(const std::vector<std::shared_ptr<const TabularDynamics>>& per_context);

}  // namespace cmdp
