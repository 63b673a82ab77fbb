#include "cmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cmdp {

namespace {

std::string at(State s, Action a) {
    std::ostringstream out;
    out << "(" << s << "," << a << ")";
    return out.str();
}

void require_dimensions(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                        const LayerPartition& partition) {
    if (dyn.n_states() != partition.n_states())
        throw std::invalid_argument("dynamics and partition disagree on the number of states");
    if (policy.n_states() != partition.n_states())
        throw std::invalid_argument("policy and partition disagree on the number of states");
    for (State s = 0; s < policy.n_states(); ++s) {
        if (!partition.is_final(s) && policy(s) >= dyn.n_actions())
            throw std::invalid_argument("policy action out of range at state " + std::to_string(s));
    }
}

void require_rewards(const StateActionTable& rew, const TabularDynamics& dyn, const LayerPartition& partition) {
    if (rew.n_states() != dyn.n_states() || rew.n_actions() != dyn.n_actions())
        throw std::invalid_argument("reward table dimensions do not match dynamics");
    for (State s = 0; s < rew.n_states(); ++s) {
        if (partition.is_final(s)) continue;
        for (Action a = 0; a < rew.n_actions(); ++a) {
            const double r = rew(s, a);
            if (std::isnan(r) || r == -std::numeric_limits<double>::infinity())
                throw std::invalid_argument("reward at " + at(s, a) + " is NaN or -inf");
        }
    }
}

}  // namespace

ValidationReport validate_dynamics(const TabularDynamics& dyn, const LayerPartition& partition) {
    ValidationReport report;
    if (dyn.n_states() != partition.n_states()) {
        report.violations.push_back("dynamics has " + std::to_string(dyn.n_states()) +
                                    " states, partition has " + std::to_string(partition.n_states()));
        return report;
    }
    for (State s = 0; s < dyn.n_states(); ++s) {
        if (partition.is_final(s)) continue;
        const std::size_t h = partition.layer_of(s);
        for (Action a = 0; a < dyn.n_actions(); ++a) {
            double sum = 0.0;
            bool negative = false;
            bool off_layer = false;
            for (State next = 0; next < dyn.n_states(); ++next) {
                const double p = dyn(s, a, next);
                if (!(p >= 0.0)) negative = true;
                if (p != 0.0 && partition.layer_of(next) != h + 1) off_layer = true;
                sum += p;
            }
            if (negative) report.violations.push_back("negative or NaN probability at " + at(s, a));
            if (off_layer) report.violations.push_back("non-consecutive layer support at " + at(s, a));
            if (std::abs(sum - 1.0) > kProbabilityTolerance)
                report.violations.push_back("row sum != 1 at " + at(s, a));
        }
    }
    return report;
}

ValidationReport validate_cmdp(const LayeredCMDP& cmdp) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    if (cmdp.n_actions == 0) fail("n_actions must be positive");
    if (cmdp.partition.n_states() != cmdp.n_states) {
        fail("partition covers " + std::to_string(cmdp.partition.n_states()) + " states, expected " +
             std::to_string(cmdp.n_states));
        return report;
    }
    const std::size_t n_ctx = cmdp.context_ids.size();
    if (n_ctx == 0) fail("no contexts");
    if (cmdp.context_dist.size() != n_ctx) fail("context_dist length differs from number of contexts");
    if (cmdp.dynamics.size() != n_ctx) fail("dynamics count differs from number of contexts");
    if (cmdp.rewards.size() != n_ctx) fail("rewards count differs from number of contexts");
    if (!report.ok()) return report;

    double dist_sum = 0.0;
    for (double p : cmdp.context_dist) {
        if (!(p >= 0.0)) fail("negative context probability");
        dist_sum += p;
    }
    if (std::abs(dist_sum - 1.0) > kProbabilityTolerance) fail("context_dist does not sum to 1");

    for (ContextIndex c = 0; c < n_ctx; ++c) {
        const std::string prefix = "context " + std::to_string(cmdp.context_ids[c]) + ": ";
        if (!cmdp.dynamics[c]) {
            fail(prefix + "missing dynamics");
            continue;
        }
        const auto& dyn = *cmdp.dynamics[c];
        if (dyn.n_actions() != cmdp.n_actions) {
            fail(prefix + "dynamics action count mismatch");
            continue;
        }
        for (auto& v : validate_dynamics(dyn, cmdp.partition).violations) fail(prefix + v);

        const auto& rew = cmdp.rewards[c];
        if (rew.n_states() != cmdp.n_states || rew.n_actions() != cmdp.n_actions) {
            fail(prefix + "reward table dimension mismatch");
            continue;
        }
        for (State s = 0; s < cmdp.n_states; ++s) {
            for (Action a = 0; a < cmdp.n_actions; ++a) {
                const double r = rew(s, a);
                if (!(r >= 0.0 && r <= 1.0)) fail(prefix + "reward outside [0,1] at " + at(s, a));
                if (cmdp.partition.is_final(s) && r != 0.0) fail(prefix + "final state reward must be 0");
            }
        }
    }
    return report;
}

OccupancyTable compute_occupancy(const DeterministicPolicy& policy, const TabularDynamics& dyn,
                                 const LayerPartition& partition) {
    require_dimensions(policy, dyn, partition);
    OccupancyTable occ{StateActionTable(dyn.n_states(), dyn.n_actions()), std::vector<double>(dyn.n_states(), 0.0)};
    occ.q_state[partition.start()] = 1.0;
    for (std::size_t h = 0; h < partition.horizon(); ++h) {
        for (State s : partition.layer(h)) {
            const double mass = occ.q_state[s];
            const Action a = policy(s);
            occ.q(s, a) = mass;
            if (mass == 0.0) continue;
            for (State next : partition.layer(h + 1)) occ.q_state[next] += mass * dyn(s, a, next);
        }
    }
    return occ;
}

PlanResult plan(const TabularDynamics& dyn, const StateActionTable& rew, const LayerPartition& partition) {
    if (dyn.n_states() != partition.n_states())
        throw std::invalid_argument("dynamics and partition disagree on the number of states");
    require_rewards(rew, dyn, partition);

    PlanResult out;
    out.policy = DeterministicPolicy::constant(dyn.n_states(), 0);
    out.state_values.assign(dyn.n_states(), 0.0);
    auto& v = out.state_values;

    for (std::size_t h = partition.horizon(); h-- > 0;) {
        const auto next_layer = partition.layer(h + 1);
        for (State s : partition.layer(h)) {
            double best = -std::numeric_limits<double>::infinity();
            Action best_action = 0;
            for (Action a = 0; a < dyn.n_actions(); ++a) {
                double q = rew(s, a);
                for (State next : next_layer) {
                    const double p = dyn(s, a, next);
                    if (p != 0.0) q += p * v[next];
                }
                if (a == 0 || q > best) {
                    best = q;
                    best_action = a;
                }
            }
            v[s] = best;
            out.policy.action_of[s] = best_action;
        }
    }
    out.value = v[partition.start()];
    return out;
}

double value_of_policy(const DeterministicPolicy& policy, const TabularDynamics& dyn, const StateActionTable& rew,
                       const LayerPartition& partition) {
    require_rewards(rew, dyn, partition);
    const OccupancyTable occ = compute_occupancy(policy, dyn, partition);
    double value = 0.0;
    for (State s = 0; s < dyn.n_states(); ++s) {
        if (partition.is_final(s)) continue;
        const double mass = occ.q(s, policy(s));
        if (mass != 0.0) value += mass * rew(s, policy(s));
    }
    return value;
}

Trajectory sample_trajectory(const LayeredCMDP& cmdp, ContextIndex context, const DeterministicPolicy& policy,
                             Rng& transition_rng, Rng& reward_rng) {
    if (context >= cmdp.n_contexts()) throw std::out_of_range("unknown context index " + std::to_string(context));
    const auto& dyn = cmdp.dynamics_of(context);
    const auto& rew = cmdp.rewards_of(context);
    const auto& partition = cmdp.partition;
    if (policy.n_states() != cmdp.n_states) throw std::invalid_argument("policy size does not match instance");

    Trajectory traj;
    traj.context = context;
    traj.steps.reserve(partition.horizon());
    State s = partition.start();
    for (std::size_t h = 0; h < partition.horizon(); ++h) {
        const Action a = policy(s);
        if (a >= cmdp.n_actions) throw std::invalid_argument("policy action out of range");
        const double r = uniform01(reward_rng) < rew(s, a) ? 1.0 : 0.0;
        traj.steps.push_back({s, a, r});

        const auto next_layer = partition.layer(h + 1);
        std::vector<double> probs(next_layer.size());
        for (std::size_t i = 0; i < next_layer.size(); ++i) probs[i] = dyn(s, a, next_layer[i]);
        s = next_layer[sample_categorical(probs, transition_rng)];
    }
    traj.terminal = s;
    return traj;
}

Trajectory sample_trajectory(const LayeredCMDP& cmdp, ContextIndex context, const DeterministicPolicy& policy,
                             Rng& rng) {
    return sample_trajectory(cmdp, context, policy, rng, rng);
}

std::vector<double> min_reach_table(const TabularDynamics& dyn, const LayerPartition& partition) {
    const std::size_t n = partition.n_states();
    std::vector<double> result(n, 1.0);
    std::vector<double> reach(n, 0.0);
    for (std::size_t target_layer = 1; target_layer <= partition.horizon(); ++target_layer) {
        for (State target : partition.layer(target_layer)) {
            std::fill(reach.begin(), reach.end(), 0.0);
            reach[target] = 1.0;
            for (std::size_t j = target_layer; j-- > 0;) {
                for (State x : partition.layer(j)) {
                    double best = std::numeric_limits<double>::infinity();
                    for (Action a = 0; a < dyn.n_actions(); ++a) {
                        double p = 0.0;
                        for (State next : partition.layer(j + 1)) p += dyn(x, a, next) * reach[next];
                        best = std::min(best, p);
                    }
                    reach[x] = best;
                }
            }
            result[target] = reach[partition.start()];
        }
    }
    return result;
}

double min_reach_probability(const LayeredCMDP& cmdp) {
    double result = 1.0;
    for (ContextIndex c = 0; c < cmdp.n_contexts(); ++c) {
        if (c > 0 && cmdp.dynamics[c] == cmdp.dynamics[c - 1]) continue;
        for (double r : min_reach_table(cmdp.dynamics_of(c), cmdp.partition)) result = std::min(result, r);
    }
    return result;
}

double exact_expected_value(const LayeredCMDP& cmdp, const std::vector<DeterministicPolicy>& policy_per_context) {
    if (policy_per_context.size() != cmdp.n_contexts())
        throw std::invalid_argument("exact_expected_value: need one policy per context");
    double total = 0.0;
    for (ContextIndex c = 0; c < cmdp.n_contexts(); ++c) {
        total += cmdp.context_dist[c] *
                 value_of_policy(policy_per_context[c], cmdp.dynamics_of(c), cmdp.rewards_of(c), cmdp.partition);
    }
    return total;
}

}  // namespace cmdp
