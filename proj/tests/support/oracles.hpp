#pragma once

// Test-side reference implementations. These deliberately avoid the
// library's occupancy, planning and optimistic-planning code paths.

#include <functional>
#include <vector>

#include "cmdp/rng.hpp"
#include "cmdp/types.hpp"

namespace oracle {

using namespace cmdp;

struct Shape {
    std::size_t max_states = 12;
    std::size_t max_actions = 3;
    std::size_t max_H = 4;
    std::size_t n_contexts = 1;
    /// Largest allowed inner layer.
    std::size_t max_layer = 4;
    /// Probability that an entry of a transition row is zeroed.
    double sparsity = 0.3;
};

/// Random validated layered CMDP with random layer sizes, sparse rows and
/// uniform mean rewards. Context distribution is random.
LayeredCMDP random_cmdp(Rng& rng, const Shape& shape);

/// One state per layer, every action leads to the next layer.
LayeredCMDP chain_cmdp(std::size_t H, std::size_t n_actions, double reward);

/// V^pi(s) for every state by the backward recursion V(s) = r + P V.
std::vector<double> policy_state_values(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                                        const StateActionTable& rew, const LayerPartition& partition);
double policy_value(const DeterministicPolicy& policy, const TabularDynamics& dyn, const StateActionTable& rew,
                    const LayerPartition& partition);

/// Probability of visiting each state, by pushing mass forward state by state.
std::vector<double> state_visit_probability(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                                            const LayerPartition& partition);

/// Calls fn for every deterministic policy (actions on the final state fixed to 0).
void for_each_policy(const LayerPartition& partition, std::size_t n_actions,
                     const std::function<void(const DeterministicPolicy&)>& fn);

double brute_force_optimal_value(const TabularDynamics& dyn, const StateActionTable& rew,
                                 const LayerPartition& partition, std::size_t n_actions);

/// Per-state minimum over all deterministic policies of the visit probability.
std::vector<double> brute_force_min_reach(const TabularDynamics& dyn, const LayerPartition& partition,
                                          std::size_t n_actions);

/// Optimal value when every (s, a) may move to any successor: the whole simplex.
double teleport_value(const StateActionTable& rew, const LayerPartition& partition, std::size_t n_actions);

/// Optimistic value over L1 balls for instances whose layers have at most two
/// states: a grid of the given step over each row's scalar parameter (plus
/// both endpoints), composed with enumeration of deterministic policies.
/// Empty base rows are read as uniform.
double foa_grid_value(const StateActionTable& r_hat, const TabularDynamics& p_bar, const StateActionTable& xi,
                      const LayerPartition& partition, std::size_t n_actions, double step = 1e-3);

struct MonteCarlo {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean episode return over n sampled trajectories.
MonteCarlo monte_carlo_return(const LayeredCMDP& cmdp, ContextIndex context, const DeterministicPolicy& policy,
                              std::size_t n, std::uint64_t seed);

}  // namespace oracle
