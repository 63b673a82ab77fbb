#pragma once

#include <string>
#include <vector>

#include "cmdp/rng.hpp"
#include "cmdp/types.hpp"

namespace cmdp {

/// Structural tolerance for probability sums.
inline constexpr double kProbabilityTolerance = 1e-12;
/// Tolerance for comparing values computed along different routes.
inline constexpr double kValueTolerance = 1e-10;

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks dimensions, row sums, layer support, reward range and the context
/// distribution. Never throws on a malformed instance; reports instead.
ValidationReport validate_cmdp(const LayeredCMDP& cmdp);

/// Same checks for a single kernel against a partition.
ValidationReport validate_dynamics(const TabularDynamics& dyn, const LayerPartition& partition);

OccupancyTable compute_occupancy(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                                 const LayerPartition& partition);

struct PlanResult {
    DeterministicPolicy policy;
    double value = 0.0;
    /// V_h(s) for every state; the final state has value 0.
    std::vector<double> state_values;
};

/// Backward induction. Ties go to the lowest action index. Rewards may exceed
/// 1 (optimistic models); NaN and -inf are rejected with std::invalid_argument.
PlanResult plan(const TabularDynamics& dyn, const StateActionTable& rew, const LayerPartition& partition);

/// Sum over layers of q_h(s, a) * rew(s, a).
double value_of_policy(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                       const StateActionTable& rew, const LayerPartition& partition);

/// Rolls out one episode. Transitions and Bernoulli rewards may use separate
/// streams; the single-rng overload uses one stream for both.
Trajectory sample_trajectory(const LayeredCMDP& cmdp, ContextIndex context, const DeterministicPolicy& policy,
                             Rng& transition_rng, Rng& reward_rng);
Trajectory sample_trajectory(const LayeredCMDP& cmdp, ContextIndex context, const DeterministicPolicy& policy,
                             Rng& rng);

/// min over policies of q_h(s | pi, P) for every state of one kernel,
/// computed by a backward reach-probability DP per target state.
std::vector<double> min_reach_table(const TabularDynamics& dyn, const LayerPartition& partition);

/// Minimum over contexts, layers and states of min_reach_table.
double min_reach_probability(const LayeredCMDP& cmdp);

/// E_c[ V^{pi(c)} ] under the true context distribution. Harness-side only.
double exact_expected_value(const LayeredCMDP& cmdp, const std::vector<DeterministicPolicy>& policy_per_context);

}  // namespace cmdp
