#include "cmdp/function_class.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cmdp/mdp.hpp"

namespace cmdp {

namespace {

std::size_t argmin_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

}  // namespace

SampleBatch SampleBatch::from_trajectory(const Trajectory& traj) {
    SampleBatch batch;
    batch.rewards.reserve(traj.steps.size());
    batch.transitions.reserve(traj.steps.size());
    for (std::size_t h = 0; h < traj.steps.size(); ++h) {
        const auto& step = traj.steps[h];
        batch.rewards.push_back({traj.context, step.state, step.action, step.reward});
        batch.transitions.push_back({traj.context, step.state, step.action, traj.next_state(h)});
    }
    return batch;
}

RewardFunctionClass::RewardFunctionClass(std::size_t n_contexts, std::size_t n_states, std::size_t n_actions,
                                         std::vector<std::vector<double>> members)
    : n_contexts_(n_contexts), n_states_(n_states), n_actions_(n_actions) {
    if (members.empty()) throw std::invalid_argument("reward function class must be nonempty");
    const std::size_t expected = n_contexts * n_states * n_actions;
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (members[m].size() != expected)
            throw std::invalid_argument("reward class member " + std::to_string(m) + " has wrong size");
        for (double v : members[m]) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("reward class member " + std::to_string(m) + " leaves [0,1]");
        }
    }
    members_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(members));
    sse_.assign(members_->size(), 0.0);
}

TabularRewards RewardFunctionClass::member_rewards(std::size_t member, ContextIndex c) const {
    TabularRewards rew(n_states_, n_actions_);
    for (State s = 0; s < n_states_; ++s)
        for (Action a = 0; a < n_actions_; ++a) rew(s, a) = (*this)(member, c, s, a);
    return rew;
}

void RewardFunctionClass::update(const SampleBatch& batch) {
    for (const auto& x : batch.rewards) {
        if (x.reward != 0.0 && x.reward != 1.0)
            throw std::invalid_argument("reward samples must be Bernoulli (0 or 1)");
        if (x.context >= n_contexts_ || x.state >= n_states_ || x.action >= n_actions_)
            throw std::out_of_range("reward sample index out of range");
    }
    for (std::size_t m = 0; m < size(); ++m) {
        const auto& table = (*members_)[m];
        double acc = 0.0;
        for (const auto& x : batch.rewards) {
            const double err = table[index(x.context, x.state, x.action)] - x.reward;
            acc += err * err;
        }
        sse_[m] += acc;
    }
}

std::size_t RewardFunctionClass::fit() const {
    if (size() == 0) throw std::logic_error("fit on an empty reward class");
    return argmin_lowest(sse_);
}

DynamicsClass::DynamicsClass(LayerPartition partition, std::size_t n_contexts, std::size_t n_actions,
                             std::vector<std::vector<double>> members)
    : partition_(std::move(partition)), n_contexts_(n_contexts), n_actions_(n_actions) {
    if (members.empty()) throw std::invalid_argument("dynamics class must be nonempty");
    const std::size_t n = partition_.n_states();
    const std::size_t expected = n_contexts * n * n_actions * n;
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto& table = members[m];
        if (table.size() != expected)
            throw std::invalid_argument("dynamics class member " + std::to_string(m) + " has wrong size");
        for (ContextIndex c = 0; c < n_contexts; ++c) {
            for (State s = 0; s < n; ++s) {
                if (partition_.is_final(s)) continue;
                const std::size_t h = partition_.layer_of(s);
                for (Action a = 0; a < n_actions; ++a) {
                    const std::size_t base = ((c * n + s) * n_actions + a) * n;
                    double sum = 0.0;
                    for (State next = 0; next < n; ++next) {
                        const double p = table[base + next];
                        if (!(p >= 0.0 && p <= 1.0))
                            throw std::invalid_argument("dynamics class member " + std::to_string(m) +
                                                        " has an entry outside [0,1]");
                        if (p != 0.0 && partition_.layer_of(next) != h + 1)
                            throw std::invalid_argument("dynamics class member " + std::to_string(m) +
                                                        " is not layer-respecting");
                        sum += p;
                    }
                    if (std::abs(sum - 1.0) > kProbabilityTolerance)
                        throw std::invalid_argument("dynamics class member " + std::to_string(m) +
                                                    " has a row not summing to 1");
                }
            }
        }
    }
    members_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(members));
    sse_.assign(members_->size(), 0.0);
}

TabularDynamics DynamicsClass::member_dynamics(std::size_t member, ContextIndex c) const {
    const std::size_t n = n_states();
    TabularDynamics dyn(n, n_actions_);
    const auto& table = (*members_).at(member);
    for (State s = 0; s < n; ++s)
        for (Action a = 0; a < n_actions_; ++a)
            for (State next = 0; next < n; ++next) dyn(s, a, next) = table[index(c, s, a) + next];
    return dyn;
}

void DynamicsClass::update(const SampleBatch& batch) {
    for (const auto& x : batch.transitions) {
        if (x.context >= n_contexts_ || x.state >= n_states() || x.action >= n_actions_ ||
            x.next_state >= n_states())
            throw std::out_of_range("transition sample index out of range");
        if (partition_.is_final(x.state) || partition_.layer_of(x.next_state) != partition_.layer_of(x.state) + 1)
            throw std::invalid_argument("transition sample: next state is not in the successor layer");
    }
    for (std::size_t m = 0; m < size(); ++m) {
        const auto& table = (*members_)[m];
        double acc = 0.0;
        for (const auto& x : batch.transitions) {
            const std::size_t base = index(x.context, x.state, x.action);
            for (State next : partition_.successors(x.state)) {
                const double err = table[base + next] - (next == x.next_state ? 1.0 : 0.0);
                acc += err * err;
            }
        }
        sse_[m] += acc;
    }
}

std::size_t DynamicsClass::fit() const {
    if (size() == 0) throw std::logic_error("fit on an empty dynamics class");
    return argmin_lowest(sse_);
}

void lsr_update_rewards(RewardFunctionClass& cls, const SampleBatch& batch) { cls.update(batch); }
std::size_t lsr_fit_rewards(const RewardFunctionClass& cls) { return cls.fit(); }
void lsr_update_dynamics(DynamicsClass& cls, const SampleBatch& batch) { cls.update(batch); }
std::size_t lsr_fit_dynamics(const DynamicsClass& cls) { return cls.fit(); }

DynamicsClass mix_with_uniform(const DynamicsClass& cls, double rho) {
    if (!(rho > 0.0 && rho < 0.5)) throw std::invalid_argument("mixing rate must lie in (0, 0.5)");
    const auto& partition = cls.partition();
    const std::size_t n = cls.n_states();
    std::vector<std::vector<double>> mixed;
    mixed.reserve(cls.size());
    for (std::size_t m = 0; m < cls.size(); ++m) {
        std::vector<double> table(cls.table(m).begin(), cls.table(m).end());
        for (ContextIndex c = 0; c < cls.n_contexts(); ++c) {
            for (State s = 0; s < n; ++s) {
                const auto succ = partition.successors(s);
                if (succ.empty()) continue;
                const double uniform = rho / static_cast<double>(succ.size());
                for (Action a = 0; a < cls.n_actions(); ++a) {
                    const std::size_t base = ((c * n + s) * cls.n_actions() + a) * n;
                    for (State next : succ) table[base + next] = (1.0 - rho) * table[base + next] + uniform;
                }
            }
        }
        mixed.push_back(std::move(table));
    }
    return DynamicsClass(partition, cls.n_contexts(), cls.n_actions(), std::move(mixed));
}

std::vector<double> reward_table_from(const std::vector<TabularRewards>& per_context) {
    std::vector<double> table;
    for (const auto& rew : per_context) table.insert(table.end(), rew.values().begin(), rew.values().end());
    return table;
}

std::vector<double> dynamics_table_from(const std::vector<std::shared_ptr<const TabularDynamics>>& per_context) {
    std::vector<double> table;
    for (const auto& dyn : per_context) {
        for (State s = 0; s < dyn->n_states(); ++s)
            for (Action a = 0; a < dyn->n_actions(); ++a) {
                const auto row = dyn->row(s, a);
                table.insert(table.end(), row.begin(), row.end());
            }
    }
    return table;
}

}  // namespace cmdp
