#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "cmdp/foa.hpp"
#include "cmdp/function_class.hpp"
#include "cmdp/schedules.hpp"
#include "cmdp/types.hpp"

namespace cmdp {

enum class LearnerKind { rm_kd, rm_ucid, rm_ucdd };

std::string_view to_string(LearnerKind kind);

/// Everything a learner is allowed to see. There is deliberately no context
/// distribution, no truth index, and true dynamics only for rm_kd.
struct LearnerInputs {
    LayerPartition partition;
    std::size_t n_actions = 0;
    std::size_t n_contexts = 0;
    RewardFunctionClass reward_class;
    /// Read access to P^c, one entry per context. rm_kd only.
    std::vector<std::shared_ptr<const TabularDynamics>> known_dynamics;
    /// Required by rm_ucdd.
    std::optional<DynamicsClass> dynamics_class;
    /// Declared minimum reachability. Required by rm_ucid and rm_ucdd.
    std::optional<double> p_min;
};

struct LearnerOptions {
    double delta = 0.1;
    /// Horizon used inside the dynamics confidence widths.
    std::size_t T = 1;
    double bonus_scale = 1.0;
    /// Recompute pi_k(c) for every k on every round when false.
    bool memoize = true;
    /// Replaces the schedule-derived bonus numerator (beta_k, or
    /// beta_k + H|S|gamma_k for rm_ucdd) when set.
    std::function<double(std::size_t)> bonus_numerator;
    /// Constant dynamics confidence width for rm_ucid when set.
    std::optional<double> xi_override;
};

/// Per-round output of a learner, with the instrumentation needed by the
/// harness. Fields not used by an algorithm stay empty.
struct RoundDecision {
    std::size_t round = 0;
    bool initialization = false;
    DeterministicPolicy policy;
    double beta = 0.0;
    std::optional<double> gamma;
    double bonus_numerator = 0.0;
    double optimistic_value = 0.0;
    StateActionTable r_hat;
    /// Dynamics the policy was planned on (P^c, FOA's P-hat, or the LSR fit).
    TabularDynamics planning_dynamics;
    /// rm_ucid: empirical kernel and widths at this round.
    std::optional<TabularDynamics> p_bar;
    std::optional<StateActionTable> xi;
};

/// Shared machinery of the three optimistic learners: initialization
/// rounds, per-round LSR fits, and the per-context recomputation of
/// pi_k(c; .) for k = |A|+1..t with memoization.
class Learner {
public:
    Learner(LearnerKind kind, LearnerInputs inputs, LearnerOptions options);
    virtual ~Learner() = default;

    Learner(const Learner&) = delete;
    Learner& operator=(const Learner&) = delete;

    LearnerKind kind() const { return kind_; }
    std::size_t completed_rounds() const { return trajectories_.size(); }
    std::size_t n_actions() const { return inputs_.n_actions; }
    const Schedules& schedules() const { return schedules_; }
    const RewardFunctionClass& reward_class() const { return inputs_.reward_class; }
    const std::optional<DynamicsClass>& dynamics_class() const { return inputs_.dynamics_class; }

    /// Chooses pi_t(c; .) for the next round t = completed_rounds() + 1.
    RoundDecision act(ContextIndex context);
    /// Feeds the trajectory of the round just acted on to the oracles.
    void observe(const Trajectory& trajectory);

    /// pi_k(c; .) for any k up to the current round. Harness diagnostics.
    DeterministicPolicy policy_for(ContextIndex context, std::size_t k);
    /// Contribution of context c to the contextual potential at round k > |A|:
    /// sum_s q(s | pi_k(c), P) / denominator_k(c, s, pi_k(c; s)).
    double potential_term(ContextIndex context, std::size_t k);

    std::size_t fitted_reward_member(std::size_t k) const { return fitted_reward_.at(k); }
    std::size_t fitted_dynamics_member(std::size_t k) const { return fitted_dynamics_.at(k); }

    double bonus_numerator(std::size_t k) const;

protected:
    struct ContextCache {
        std::size_t next_k = 0;
        std::vector<DeterministicPolicy> policies;  // index k - 1
        std::vector<double> potential_terms;        // index k - 1; zero for initialization rounds
        /// Bonus denominators accumulated over i < next_k.
        StateActionTable match_mass;
        /// rm_ucid running visit counts over trajectories 1..counted_rounds.
        StateActionTable visits;
        std::vector<double> transitions;
        std::size_t counted_rounds = 0;
        RoundDecision last;
    };

    struct Materialized {
        RoundDecision decision;
        double potential_term = 0.0;
    };

    /// Add pi_i for the initialization rounds i <= |A| to the denominators.
    virtual void seed_denominators(ContextCache& cache, ContextIndex context) const = 0;
    /// Compute pi_k(c) from cache state at k and advance the denominators.
    virtual Materialized materialize(ContextCache& cache, ContextIndex context, std::size_t k) const = 0;

    const LearnerInputs& inputs() const { return inputs_; }
    const LearnerOptions& options() const { return options_; }
    const std::vector<Trajectory>& trajectories() const { return trajectories_; }
    double reward_estimate(std::size_t k, ContextIndex c, State s, Action a) const {
        return inputs_.reward_class(fitted_reward_.at(k), c, s, a);
    }
    RoundDecision base_decision(std::size_t k) const;

    Schedules schedules_;

private:
    ContextCache fresh_cache(ContextIndex context) const;
    void extend(ContextCache& cache, ContextIndex context, std::size_t t) const;
    ContextCache& cache_through(ContextIndex context, std::size_t t, ContextCache& scratch);
    void record_fits(std::size_t t);

    LearnerKind kind_;
    LearnerInputs inputs_;
    LearnerOptions options_;
    std::vector<Trajectory> trajectories_;
    std::vector<std::size_t> fitted_reward_;    // index k; valid for k > |A|
    std::vector<std::size_t> fitted_dynamics_;  // rm_ucdd only
    std::map<ContextIndex, ContextCache> caches_;
    bool acted_ = false;
};

/// Known context-dependent dynamics: bonus beta_k / sum_i 1[a = pi_i(c;s)] q(s | pi_i(c), P^c).
class RmKd final : public Learner {
public:
    RmKd(LearnerInputs inputs, LearnerOptions options);

protected:
    void seed_denominators(ContextCache& cache, ContextIndex context) const override;
    Materialized materialize(ContextCache& cache, ContextIndex context, std::size_t k) const override;
};

/// Unknown context-independent dynamics: empirical kernel plus FOA.
class RmUcid final : public Learner {
public:
    RmUcid(LearnerInputs inputs, LearnerOptions options);

protected:
    void seed_denominators(ContextCache& cache, ContextIndex context) const override;
    Materialized materialize(ContextCache& cache, ContextIndex context, std::size_t k) const override;
};

/// Unknown context-dependent dynamics: LSR fit over a finite kernel class.
class RmUcdd final : public Learner {
public:
    RmUcdd(LearnerInputs inputs, LearnerOptions options);

protected:
    void seed_denominators(ContextCache& cache, ContextIndex context) const override;
    Materialized materialize(ContextCache& cache, ContextIndex context, std::size_t k) const override;
};

std::unique_ptr<Learner> make_learner(LearnerKind kind, LearnerInputs inputs, LearnerOptions options);

}  // namespace cmdp
