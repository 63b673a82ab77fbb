#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace cmdp {

using State = std::size_t;
using Action = std::size_t;
using ContextIndex = std::size_t;

/// Partition of the state set into layers S_0..S_H with transitions only
/// between consecutive layers. S_0 = {start} and S_H = {final}.
class LayerPartition {
public:
    LayerPartition() = default;

    /// Throws std::invalid_argument unless the layers are disjoint, cover
    /// 0..n-1, number at least two, and the first and last are singletons.
    explicit LayerPartition(std::vector<std::vector<State>> layers);

    std::size_t horizon() const { return layers_.size() - 1; }
    std::size_t n_states() const { return layer_of_.size(); }
    std::size_t layer_of(State s) const { return layer_of_.at(s); }
    std::span<const State> layer(std::size_t h) const { return layers_.at(h); }
    const std::vector<std::vector<State>>& layers() const { return layers_; }

    State start() const { return layers_.front().front(); }
    State final_state() const { return layers_.back().front(); }
    bool is_final(State s) const { return s == final_state(); }

    /// Successor layer of s; empty for the final state.
    std::span<const State> successors(State s) const;

    bool operator==(const LayerPartition&) const = default;

private:
    std::vector<std::vector<State>> layers_;
    std::vector<std::size_t> layer_of_;
};

/// Dense (s, a) -> real table. Used for mean rewards and optimistic rewards.
class StateActionTable {
public:
    StateActionTable() = default;
    StateActionTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
        : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, fill) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double& operator()(State s, Action a) { return values_[s * n_actions_ + a]; }
    double operator()(State s, Action a) const { return values_[s * n_actions_ + a]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool operator==(const StateActionTable&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> values_;
};

using TabularRewards = StateActionTable;

/// Dense transition kernel P(s' | s, a). Rows of the final state are zero.
class TabularDynamics {
public:
    TabularDynamics() = default;
    TabularDynamics(std::size_t n_states, std::size_t n_actions)
        : n_states_(n_states), n_actions_(n_actions), p_(n_states * n_actions * n_states, 0.0) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double& operator()(State s, Action a, State next) { return p_[index(s, a) + next]; }
    double operator()(State s, Action a, State next) const { return p_[index(s, a) + next]; }

    std::span<const double> row(State s, Action a) const {
        return std::span<const double>(p_).subspan(index(s, a), n_states_);
    }
    std::span<double> row(State s, Action a) {
        return std::span<double>(p_).subspan(index(s, a), n_states_);
    }

    bool operator==(const TabularDynamics&) const = default;

private:
    std::size_t index(State s, Action a) const { return (s * n_actions_ + a) * n_states_; }

    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> p_;
};

/// Layered contextual MDP with a finite context set. Context-independent
/// dynamics are represented by every context pointing at the same kernel.
struct LayeredCMDP {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    LayerPartition partition;
    std::vector<std::int64_t> context_ids;
    std::vector<double> context_dist;
    std::vector<std::shared_ptr<const TabularDynamics>> dynamics;
    std::vector<TabularRewards> rewards;

    std::size_t n_contexts() const { return context_ids.size(); }
    std::size_t horizon() const { return partition.horizon(); }
    const TabularDynamics& dynamics_of(ContextIndex c) const { return *dynamics.at(c); }
    const TabularRewards& rewards_of(ContextIndex c) const { return rewards.at(c); }

    /// True when every context has value-identical dynamics.
    bool has_shared_dynamics() const;
};

struct DeterministicPolicy {
    std::vector<Action> action_of;

    DeterministicPolicy() = default;
    explicit DeterministicPolicy(std::vector<Action> actions) : action_of(std::move(actions)) {}
    static DeterministicPolicy constant(std::size_t n_states, Action a) {
        return DeterministicPolicy(std::vector<Action>(n_states, a));
    }

    Action operator()(State s) const { return action_of.at(s); }
    std::size_t n_states() const { return action_of.size(); }

    /// FNV-1a over the action vector; stable across runs.
    std::uint64_t hash() const;

    bool operator==(const DeterministicPolicy&) const = default;
};

/// q_h(s, a) and q_h(s) for a deterministic policy. Each state belongs to a
/// single layer, so tables are indexed by state directly.
struct OccupancyTable {
    StateActionTable q;
    std::vector<double> q_state;

    double state(State s) const { return q_state.at(s); }
    double state_action(State s, Action a) const { return q(s, a); }
};

struct TrajectoryStep {
    State state = 0;
    Action action = 0;
    double reward = 0.0;
};

struct Trajectory {
    ContextIndex context = 0;
    std::vector<TrajectoryStep> steps;
    State terminal = 0;

    /// State reached after step h (s_{h+1}).
    State next_state(std::size_t h) const {
        return h + 1 < steps.size() ? steps[h + 1].state : terminal;
    }
    double total_reward() const;
};

}  // namespace cmdp
