#pragma once

#include <span>
#include <vector>

#include "cmdp/types.hpp"

namespace cmdp {

/// Optimistic model for one context: rewards, the maximizing kernel inside
/// the L1 confidence set, and a deterministic policy optimal for both.
struct OptimisticModel {
    StateActionTable r_hat;
    TabularDynamics p_hat;
    DeterministicPolicy policy;
    double value = 0.0;
    std::vector<double> state_values;
};

/// max over p with ||p - base||_1 <= radius of sum_i p_i values_i.
///
/// Moves min(radius / 2, 1 - base[best]) onto the highest-value entry, then
/// removes the surplus from the lowest-value entries in ascending order.
/// Ties favour the lowest index for both the receiving and the donating
/// side. An all-zero base is treated as uniform.
std::vector<double> l1_ball_maximizer(std::span<const double> base, std::span<const double> values, double radius);

/// Joint maximization over deterministic policies and kernels P with
/// ||P(.|s,a) - P_bar(.|s,a)||_1 <= xi(s,a) for every (s,a), by optimistic
/// backward induction. P_bar rows with no mass are treated as uniform over
/// the successor layer. Throws std::invalid_argument on negative or NaN xi
/// and NaN rewards.
OptimisticModel foa_optimistic_plan(const StateActionTable& r_hat, const TabularDynamics& p_bar,
                                    const StateActionTable& xi, const LayerPartition& partition);

}  // namespace cmdp
