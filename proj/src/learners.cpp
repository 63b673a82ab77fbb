#include "cmdp/learners.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "cmdp/mdp.hpp"

namespace cmdp {

namespace {

/// numerator / denominator with the conventions 0 / x = 0 and x / 0 = +inf.
double bonus(double numerator, double denominator) {
    if (numerator == 0.0) return 0.0;
    if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

BonusMode mode_of(LearnerKind kind) {
    return kind == LearnerKind::rm_kd ? BonusMode::known_dynamics : BonusMode::unknown_dynamics;
}

double potential_of(const OccupancyTable& occ, const DeterministicPolicy& policy,
                    const StateActionTable& denominators, const LayerPartition& partition, double scale) {
    double term = 0.0;
    for (State s = 0; s < partition.n_states(); ++s) {
        if (partition.is_final(s)) continue;
        const double q = occ.q_state[s];
        if (q == 0.0) continue;
        term += q / (scale * denominators(s, policy(s)));
    }
    return term;
}

void accumulate_policy(StateActionTable& denominators, const DeterministicPolicy& policy,
                       const LayerPartition& partition, const std::vector<double>* weights) {
    for (State s = 0; s < partition.n_states(); ++s) {
        if (partition.is_final(s)) continue;
        denominators(s, policy(s)) += weights ? (*weights)[s] : 1.0;
    }
}

}  // namespace

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::rm_kd: return "rm_kd";
        case LearnerKind::rm_ucid: return "rm_ucid";
        case LearnerKind::rm_ucdd: return "rm_ucdd";
    }
    return "unknown";
}

Learner::Learner(LearnerKind kind, LearnerInputs inputs, LearnerOptions options)
    : kind_(kind), inputs_(std::move(inputs)), options_(std::move(options)) {
    const auto& cls = inputs_.reward_class;
    const std::size_t n = inputs_.partition.n_states();
    if (inputs_.n_actions == 0) throw std::invalid_argument("learner needs at least one action");
    if (cls.size() == 0) throw std::invalid_argument("learner needs a nonempty reward class");
    if (cls.n_states() != n || cls.n_actions() != inputs_.n_actions || cls.n_contexts() != inputs_.n_contexts)
        throw std::invalid_argument("reward class dimensions do not match the instance");
    if (options_.T <= inputs_.n_actions)
        throw std::invalid_argument("T must exceed the number of actions (initialization rounds)");

    schedules_.size_F = cls.size();
    schedules_.size_Fp = inputs_.dynamics_class ? inputs_.dynamics_class->size() : 1;
    schedules_.delta = options_.delta;
    schedules_.n_states = n;
    schedules_.n_actions = inputs_.n_actions;
    schedules_.H = inputs_.partition.horizon();
    schedules_.T = options_.T;
    schedules_.bonus_scale = options_.bonus_scale;
    schedules_.validate();
}

double Learner::bonus_numerator(std::size_t k) const {
    if (options_.bonus_numerator) return options_.bonus_numerator(k);
    const double beta = schedules_.beta(k, mode_of(kind_));
    if (kind_ != LearnerKind::rm_ucdd) return beta;
    return beta + static_cast<double>(schedules_.H * schedules_.n_states) * schedules_.gamma(k);
}

RoundDecision Learner::base_decision(std::size_t k) const {
    RoundDecision d;
    d.round = k;
    d.beta = schedules_.beta(k, mode_of(kind_));
    if (kind_ == LearnerKind::rm_ucdd) d.gamma = schedules_.gamma(k);
    d.bonus_numerator = bonus_numerator(k);
    return d;
}

void Learner::record_fits(std::size_t t) {
    if (fitted_reward_.size() > t) return;
    fitted_reward_.resize(t + 1, 0);
    fitted_reward_[t] = inputs_.reward_class.fit();
    if (inputs_.dynamics_class) {
        fitted_dynamics_.resize(t + 1, 0);
        fitted_dynamics_[t] = inputs_.dynamics_class->fit();
    }
}

RoundDecision Learner::act(ContextIndex context) {
    if (acted_) throw std::logic_error("act called twice without an observe in between");
    if (context >= inputs_.n_contexts) throw std::out_of_range("unknown context index " + std::to_string(context));
    const std::size_t t = completed_rounds() + 1;
    acted_ = true;
    if (t <= inputs_.n_actions) {
        RoundDecision d = base_decision(t);
        d.initialization = true;
        d.policy = DeterministicPolicy::constant(inputs_.partition.n_states(), t - 1);
        return d;
    }
    record_fits(t);
    ContextCache scratch;
    return cache_through(context, t, scratch).last;
}

void Learner::observe(const Trajectory& trajectory) {
    if (!acted_) throw std::logic_error("observe called without a preceding act");
    if (trajectory.steps.size() != inputs_.partition.horizon())
        throw std::invalid_argument("trajectory length differs from the horizon");
    const SampleBatch batch = SampleBatch::from_trajectory(trajectory);
    inputs_.reward_class.update(batch);
    if (inputs_.dynamics_class) inputs_.dynamics_class->update(batch);
    trajectories_.push_back(trajectory);
    acted_ = false;
}

DeterministicPolicy Learner::policy_for(ContextIndex context, std::size_t k) {
    const std::size_t current = completed_rounds() + (acted_ ? 1 : 0);
    if (k == 0 || k > current) throw std::out_of_range("policy_for: round not reached yet");
    if (k <= inputs_.n_actions) return DeterministicPolicy::constant(inputs_.partition.n_states(), k - 1);
    ContextCache scratch;
    return cache_through(context, k, scratch).policies.at(k - 1);
}

double Learner::potential_term(ContextIndex context, std::size_t k) {
    const std::size_t current = completed_rounds() + (acted_ ? 1 : 0);
    if (k <= inputs_.n_actions || k > current)
        throw std::out_of_range("potential_term is defined for |A| < k <= current round");
    ContextCache scratch;
    return cache_through(context, k, scratch).potential_terms.at(k - 1);
}

Learner::ContextCache Learner::fresh_cache(ContextIndex context) const {
    const std::size_t n = inputs_.partition.n_states();
    const std::size_t n_actions = inputs_.n_actions;
    ContextCache cache;
    cache.match_mass = StateActionTable(n, n_actions);
    cache.visits = StateActionTable(n, n_actions);
    cache.transitions.assign(n * n_actions * n, 0.0);
    for (Action a = 0; a < n_actions; ++a) {
        cache.policies.push_back(DeterministicPolicy::constant(n, a));
        cache.potential_terms.push_back(0.0);
    }
    seed_denominators(cache, context);
    cache.next_k = n_actions + 1;
    return cache;
}

void Learner::extend(ContextCache& cache, ContextIndex context, std::size_t t) const {
    while (cache.next_k <= t) {
        if (cache.next_k >= fitted_reward_.size())
            throw std::logic_error("no oracle fit recorded for round " + std::to_string(cache.next_k));
        Materialized m = materialize(cache, context, cache.next_k);
        cache.policies.push_back(m.decision.policy);
        cache.potential_terms.push_back(m.potential_term);
        cache.last = std::move(m.decision);
        ++cache.next_k;
    }
}

Learner::ContextCache& Learner::cache_through(ContextIndex context, std::size_t t, ContextCache& scratch) {
    if (context >= inputs_.n_contexts) throw std::out_of_range("unknown context index " + std::to_string(context));
    if (!options_.memoize) {
        scratch = fresh_cache(context);
        extend(scratch, context, t);
        return scratch;
    }
    auto it = caches_.find(context);
    if (it == caches_.end()) it = caches_.emplace(context, fresh_cache(context)).first;
    extend(it->second, context, t);
    return it->second;
}

// ---------------------------------------------------------------------------

RmKd::RmKd(LearnerInputs inputs, LearnerOptions options)
    : Learner(LearnerKind::rm_kd, std::move(inputs), std::move(options)) {
    const auto& dyn = this->inputs().known_dynamics;
    if (dyn.size() != this->inputs().n_contexts)
        throw std::invalid_argument("rm_kd needs the true dynamics of every context");
    for (const auto& d : dyn) {
        if (!d) throw std::invalid_argument("rm_kd: missing dynamics");
        const auto report = validate_dynamics(*d, this->inputs().partition);
        if (!report.ok()) throw std::invalid_argument("rm_kd: invalid dynamics: " + report.violations.front());
    }
}

void RmKd::seed_denominators(ContextCache& cache, ContextIndex context) const {
    const auto& partition = inputs().partition;
    const auto& dyn = *inputs().known_dynamics.at(context);
    for (Action a = 0; a < inputs().n_actions; ++a) {
        const auto occ = compute_occupancy(cache.policies.at(a), dyn, partition);
        accumulate_policy(cache.match_mass, cache.policies.at(a), partition, &occ.q_state);
    }
}

Learner::Materialized RmKd::materialize(ContextCache& cache, ContextIndex context, std::size_t k) const {
    const auto& partition = inputs().partition;
    const auto& dyn = *inputs().known_dynamics.at(context);
    const std::size_t n = partition.n_states();

    Materialized out{base_decision(k), 0.0};
    auto& d = out.decision;
    d.r_hat = StateActionTable(n, inputs().n_actions);
    for (State s = 0; s < n; ++s) {
        if (partition.is_final(s)) continue;
        for (Action a = 0; a < inputs().n_actions; ++a)
            d.r_hat(s, a) = reward_estimate(k, context, s, a) + bonus(d.bonus_numerator, cache.match_mass(s, a));
    }
    auto planned = plan(dyn, d.r_hat, partition);
    d.policy = std::move(planned.policy);
    d.optimistic_value = planned.value;
    d.planning_dynamics = dyn;

    const auto occ = compute_occupancy(d.policy, dyn, partition);
    out.potential_term = potential_of(occ, d.policy, cache.match_mass, partition, 1.0);
    accumulate_policy(cache.match_mass, d.policy, partition, &occ.q_state);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_p_min(const LearnerInputs& inputs, std::string_view who) {
    if (!inputs.p_min || !(*inputs.p_min > 0.0 && *inputs.p_min <= 1.0))
        throw std::invalid_argument(std::string(who) + " needs a declared p_min in (0, 1]");
}

}  // namespace

RmUcid::RmUcid(LearnerInputs inputs, LearnerOptions options)
    : Learner(LearnerKind::rm_ucid, std::move(inputs), std::move(options)) {
    require_p_min(this->inputs(), "rm_ucid");
    if (this->options().xi_override && !(*this->options().xi_override >= 0.0))
        throw std::invalid_argument("rm_ucid: xi override must be nonnegative");
}

void RmUcid::seed_denominators(ContextCache& cache, ContextIndex) const {
    for (Action a = 0; a < inputs().n_actions; ++a)
        accumulate_policy(cache.match_mass, cache.policies.at(a), inputs().partition, nullptr);
}

Learner::Materialized RmUcid::materialize(ContextCache& cache, ContextIndex context, std::size_t k) const {
    const auto& partition = inputs().partition;
    const std::size_t n = partition.n_states();
    const std::size_t n_actions = inputs().n_actions;
    const double p_min = *inputs().p_min;

    // Counts N_k cover trajectories of rounds 1..k-1.
    while (cache.counted_rounds + 1 < k) {
        const auto& traj = trajectories().at(cache.counted_rounds);
        for (std::size_t h = 0; h < traj.steps.size(); ++h) {
            const auto& step = traj.steps[h];
            cache.visits(step.state, step.action) += 1.0;
            cache.transitions[(step.state * n_actions + step.action) * n + traj.next_state(h)] += 1.0;
        }
        ++cache.counted_rounds;
    }

    Materialized out{base_decision(k), 0.0};
    auto& d = out.decision;
    TabularDynamics p_bar(n, n_actions);
    StateActionTable xi(n, n_actions);
    d.r_hat = StateActionTable(n, n_actions);
    for (State s = 0; s < n; ++s) {
        if (partition.is_final(s)) continue;
        for (Action a = 0; a < n_actions; ++a) {
            const double visits = cache.visits(s, a);
            if (visits > 0.0) {
                for (State next : partition.successors(s))
                    p_bar(s, a, next) = cache.transitions[(s * n_actions + a) * n + next] / visits;
            }
            xi(s, a) = options().xi_override ? *options().xi_override : schedules_.xi(visits);
            d.r_hat(s, a) =
                reward_estimate(k, context, s, a) + bonus(d.bonus_numerator, p_min * cache.match_mass(s, a));
        }
    }

    auto model = foa_optimistic_plan(d.r_hat, p_bar, xi, partition);
    d.policy = std::move(model.policy);
    d.optimistic_value = model.value;
    d.planning_dynamics = std::move(model.p_hat);
    d.p_bar = std::move(p_bar);
    d.xi = std::move(xi);

    const auto occ = compute_occupancy(d.policy, d.planning_dynamics, partition);
    out.potential_term = potential_of(occ, d.policy, cache.match_mass, partition, p_min);
    accumulate_policy(cache.match_mass, d.policy, partition, nullptr);
    return out;
}

// ---------------------------------------------------------------------------

RmUcdd::RmUcdd(LearnerInputs inputs, LearnerOptions options)
    : Learner(LearnerKind::rm_ucdd, std::move(inputs), std::move(options)) {
    require_p_min(this->inputs(), "rm_ucdd");
    const auto& cls = this->inputs().dynamics_class;
    if (!cls) throw std::invalid_argument("rm_ucdd needs a dynamics class");
    if (cls->n_contexts() != this->inputs().n_contexts || cls->n_actions() != this->inputs().n_actions ||
        !(cls->partition() == this->inputs().partition))
        throw std::invalid_argument("dynamics class dimensions do not match the instance");
}

void RmUcdd::seed_denominators(ContextCache& cache, ContextIndex) const {
    for (Action a = 0; a < inputs().n_actions; ++a)
        accumulate_policy(cache.match_mass, cache.policies.at(a), inputs().partition, nullptr);
}

Learner::Materialized RmUcdd::materialize(ContextCache& cache, ContextIndex context, std::size_t k) const {
    const auto& partition = inputs().partition;
    const std::size_t n = partition.n_states();
    const double p_min = *inputs().p_min;

    Materialized out{base_decision(k), 0.0};
    auto& d = out.decision;
    d.planning_dynamics = inputs().dynamics_class->member_dynamics(fitted_dynamics_member(k), context);
    d.r_hat = StateActionTable(n, inputs().n_actions);
    for (State s = 0; s < n; ++s) {
        if (partition.is_final(s)) continue;
        for (Action a = 0; a < inputs().n_actions; ++a)
            d.r_hat(s, a) =
                reward_estimate(k, context, s, a) + bonus(d.bonus_numerator, p_min * cache.match_mass(s, a));
    }
    auto planned = plan(d.planning_dynamics, d.r_hat, partition);
    d.policy = std::move(planned.policy);
    d.optimistic_value = planned.value;

    const auto occ = compute_occupancy(d.policy, d.planning_dynamics, partition);
    out.potential_term = potential_of(occ, d.policy, cache.match_mass, partition, p_min);
    accumulate_policy(cache.match_mass, d.policy, partition, nullptr);
    return out;
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, LearnerInputs inputs, LearnerOptions options) {
    switch (kind) {
        case LearnerKind::rm_kd: return std::make_unique<RmKd>(std::move(inputs), std::move(options));
        case LearnerKind::rm_ucid: return std::make_unique<RmUcid>(std::move(inputs), std::move(options));
        case LearnerKind::rm_ucdd: return std::make_unique<RmUcdd>(std::move(inputs), std::move(options));
    }
    throw std::invalid_argument("unknown learner kind");
}

}  // namespace cmdp
