#include "cmdp/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cmdp {

namespace {

constexpr std::size_t kRejectionBudget = 1000;
constexpr std::size_t kMaxPermutations = 20;

std::vector<double> random_weights(std::size_t n, Rng& rng) {
    std::vector<double> w(n);
    for (auto& x : w) x = uniform01(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    } else {
        for (auto& x : w) x /= total;
    }
    return w;
}

std::size_t factorial_capped(std::size_t m, std::size_t cap) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= m; ++i) {
        f *= i;
        if (f >= cap) return cap;
    }
    return std::min(f, cap);
}

/// Convex combination of min(M!, 20) random permutation matrices, row-major.
std::vector<double> random_doubly_stochastic(std::size_t m, Rng& rng) {
    const std::size_t count = factorial_capped(m, kMaxPermutations);
    const auto weights = random_weights(count, rng);
    std::vector<double> matrix(m * m, 0.0);
    std::vector<std::size_t> perm(m);
    for (std::size_t k = 0; k < count; ++k) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < m; ++i) matrix[i * m + perm[i]] += weights[k];
    }
    return matrix;
}

void require_common(const GenSpec& spec) {
    if (spec.M == 0) throw std::invalid_argument("M must be at least 1");
    if (spec.H == 0) throw std::invalid_argument("H must be at least 1");
    if (spec.n_actions == 0) throw std::invalid_argument("n_actions must be at least 1");
    if (spec.n_contexts == 0) throw std::invalid_argument("n_contexts must be at least 1");
    if (spec.size_F == 0 || spec.size_Fp == 0) throw std::invalid_argument("class sizes must be at least 1");
}

std::vector<std::int64_t> default_context_ids(std::size_t n) {
    std::vector<std::int64_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::int64_t{0});
    return ids;
}

TabularDynamics random_kernel(const GenSpec& spec, const LayerPartition& partition, double p_min, Rng& rng) {
    TabularDynamics dyn(partition.n_states(), spec.n_actions);
    const std::size_t H = partition.horizon();
    const State start = partition.start();
    for (Action a = 0; a < spec.n_actions; ++a) {
        const auto first = partition.layer(1);
        const auto w = random_weights(first.size(), rng);
        const double free_mass = 1.0 - p_min * static_cast<double>(first.size());
        for (std::size_t j = 0; j < first.size(); ++j) dyn(start, a, first[j]) = p_min + free_mass * w[j];
    }
    for (std::size_t h = 1; h + 1 < H; ++h) {
        const auto from = partition.layer(h);
        const auto to = partition.layer(h + 1);
        for (Action a = 0; a < spec.n_actions; ++a) {
            // Mixing in p_min * J keeps the block doubly stochastic and every entry >= p_min,
            // so q_{h+1}(s') >= p_min under any policy, including ones mixing actions across states.
            const auto block = random_doubly_stochastic(spec.M, rng);
            const double keep = 1.0 - p_min * static_cast<double>(spec.M);
            for (std::size_t i = 0; i < spec.M; ++i)
                for (std::size_t j = 0; j < spec.M; ++j)
                    dyn(from[i], a, to[j]) = p_min + keep * block[i * spec.M + j];
        }
    }
    if (H >= 2) {
        for (State s : partition.layer(H - 1))
            for (Action a = 0; a < spec.n_actions; ++a) dyn(s, a, partition.final_state()) = 1.0;
    }
    return dyn;
}

double sup_distance(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

/// max over (c, s, a) rows of the L1 distance between two kernel tables.
double max_row_l1(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
    double worst = 0.0;
    for (std::size_t base = 0; base < x.size(); base += n) {
        double row = 0.0;
        for (std::size_t i = 0; i < n; ++i) row += std::abs(x[base + i] - y[base + i]);
        worst = std::max(worst, row);
    }
    return worst;
}

template <typename Distance, typename Propose>
void add_decoys(std::vector<std::vector<double>>& members, std::size_t target, double gap, Distance distance,
                Propose propose, const char* what) {
    while (members.size() < target) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < kRejectionBudget && !placed; ++attempt) {
            auto candidate = propose();
            const bool separated = std::all_of(members.begin(), members.end(),
                                               [&](const auto& m) { return distance(candidate, m) >= gap; });
            if (separated) {
                members.push_back(std::move(candidate));
                placed = true;
            }
        }
        if (!placed)
            throw std::runtime_error(std::string("rejection-sampling budget exhausted placing a ") + what + " decoy");
    }
}

}  // namespace

LayerPartition grid_partition(std::size_t M, std::size_t H) {
    if (M == 0 || H == 0) throw std::invalid_argument("grid_partition needs M >= 1 and H >= 1");
    std::vector<std::vector<State>> layers;
    layers.push_back({0});
    State next = 1;
    for (std::size_t h = 1; h < H; ++h) {
        std::vector<State> layer(M);
        for (auto& s : layer) s = next++;
        layers.push_back(std::move(layer));
    }
    layers.push_back({next});
    return LayerPartition(std::move(layers));
}

LayeredCMDP gen_doubly_stochastic(const GenSpec& spec, Rng& rng) {
    require_common(spec);
    const double p_min = spec.p_min_target.value_or(1.0 / (2.0 * static_cast<double>(spec.M)));
    const std::size_t first_layer = spec.H >= 2 ? spec.M : 1;
    if (!(p_min >= 0.0) || p_min * static_cast<double>(first_layer) > 1.0 + 1e-12)
        throw std::invalid_argument("infeasible p_min_target: M * p_min must not exceed 1");

    LayeredCMDP cmdp;
    cmdp.partition = grid_partition(spec.M, spec.H);
    cmdp.n_states = cmdp.partition.n_states();
    cmdp.n_actions = spec.n_actions;
    cmdp.context_ids = default_context_ids(spec.n_contexts);
    cmdp.context_dist = random_weights(spec.n_contexts, rng);

    const double first_step_floor = std::min(p_min, 1.0 / static_cast<double>(first_layer));
    if (spec.shared_dynamics) {
        auto shared = std::make_shared<const TabularDynamics>(random_kernel(spec, cmdp.partition, first_step_floor, rng));
        cmdp.dynamics.assign(spec.n_contexts, shared);
    } else {
        for (std::size_t c = 0; c < spec.n_contexts; ++c)
            cmdp.dynamics.push_back(
                std::make_shared<const TabularDynamics>(random_kernel(spec, cmdp.partition, first_step_floor, rng)));
    }
    for (std::size_t c = 0; c < spec.n_contexts; ++c) {
        TabularRewards rew(cmdp.n_states, cmdp.n_actions);
        for (State s = 0; s < cmdp.n_states; ++s) {
            if (cmdp.partition.is_final(s)) continue;
            for (Action a = 0; a < cmdp.n_actions; ++a) rew(s, a) = uniform01(rng);
        }
        cmdp.rewards.push_back(std::move(rew));
    }
    return cmdp;
}

EnvBundle gen_lower_bound_instance(const GenSpec& spec, Rng& rng) {
    require_common(spec);
    if (spec.H < 2) throw std::invalid_argument("lower-bound instance needs H >= 2");
    if (!(spec.reward_gap > 0.0 && spec.reward_gap <= 1.0)) throw std::invalid_argument("reward_gap must lie in (0,1]");

    EnvBundle bundle;
    auto& cmdp = bundle.cmdp;
    cmdp.partition = grid_partition(spec.M, spec.H);
    cmdp.n_states = cmdp.partition.n_states();
    cmdp.n_actions = spec.n_actions;
    cmdp.context_ids = default_context_ids(spec.n_contexts);
    cmdp.context_dist.assign(spec.n_contexts, 1.0 / static_cast<double>(spec.n_contexts));

    const auto& partition = cmdp.partition;
    TabularDynamics dyn(cmdp.n_states, cmdp.n_actions);
    for (Action a = 0; a < cmdp.n_actions; ++a) {
        for (State s : partition.layer(1)) dyn(partition.start(), a, s) = 1.0 / static_cast<double>(spec.M);
        for (std::size_t h = 1; h + 1 < spec.H; ++h)
            for (std::size_t j = 0; j < spec.M; ++j) dyn(partition.layer(h)[j], a, partition.layer(h + 1)[j]) = 1.0;
        for (State s : partition.layer(spec.H - 1)) dyn(s, a, partition.final_state()) = 1.0;
    }
    auto shared = std::make_shared<const TabularDynamics>(std::move(dyn));
    cmdp.dynamics.assign(spec.n_contexts, shared);

    const double high = 0.5 + spec.reward_gap / 2.0;
    const double low = 0.5 - spec.reward_gap / 2.0;
    const std::size_t table_size = spec.n_contexts * cmdp.n_states * cmdp.n_actions;
    auto propose = [&] {
        std::vector<double> table(table_size, 0.0);
        for (std::size_t c = 0; c < spec.n_contexts; ++c) {
            for (State s = 0; s < cmdp.n_states; ++s) {
                if (partition.is_final(s)) continue;
                const auto best = static_cast<Action>(uniform01(rng) * static_cast<double>(cmdp.n_actions)) %
                                  cmdp.n_actions;
                for (Action a = 0; a < cmdp.n_actions; ++a)
                    table[(c * cmdp.n_states + s) * cmdp.n_actions + a] = a == best ? high : low;
            }
        }
        return table;
    };
    std::vector<std::vector<double>> members;
    members.push_back(propose());
    add_decoys(members, spec.size_F, spec.reward_gap - 1e-12, sup_distance, propose, "reward");
    const auto truth = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(spec.size_F)) % spec.size_F;
    std::swap(members[0], members[truth]);

    for (std::size_t c = 0; c < spec.n_contexts; ++c) {
        TabularRewards rew(cmdp.n_states, cmdp.n_actions);
        for (State s = 0; s < cmdp.n_states; ++s)
            for (Action a = 0; a < cmdp.n_actions; ++a)
                rew(s, a) = members[truth][(c * cmdp.n_states + s) * cmdp.n_actions + a];
        cmdp.rewards.push_back(std::move(rew));
    }

    bundle.reward_class = RewardFunctionClass(spec.n_contexts, cmdp.n_states, cmdp.n_actions, std::move(members));
    bundle.reward_truth = truth;
    bundle.dynamics_class = DynamicsClass(partition, spec.n_contexts, cmdp.n_actions, {dynamics_table_from(cmdp.dynamics)});
    bundle.dynamics_truth = 0;
    return bundle;
}

EnvBundle gen_random_realizable(const GenSpec& spec, Rng& rng) {
    require_common(spec);
    if (!(spec.reward_gap >= 0.0)) throw std::invalid_argument("reward_gap must be nonnegative");
    if (spec.size_Fp > 1 && (spec.M < 2 || spec.H < 2))
        throw std::invalid_argument("size_Fp > 1 needs M >= 2 and H >= 2: every kernel row is deterministic otherwise");

    EnvBundle bundle;
    bundle.cmdp = gen_doubly_stochastic(spec, rng);
    const auto& cmdp = bundle.cmdp;
    const auto& partition = cmdp.partition;
    const std::size_t n = cmdp.n_states;
    const std::size_t n_actions = cmdp.n_actions;

    const auto reward_truth = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(spec.size_F)) % spec.size_F;
    const auto dynamics_truth =
        static_cast<std::size_t>(uniform01(rng) * static_cast<double>(spec.size_Fp)) % spec.size_Fp;

    const auto true_rewards = reward_table_from(cmdp.rewards);
    std::vector<std::vector<double>> reward_members{true_rewards};
    add_decoys(
        reward_members, spec.size_F, spec.reward_gap, sup_distance,
        [&] {
            auto table = true_rewards;
            for (std::size_t c = 0; c < spec.n_contexts; ++c)
                for (State s = 0; s < n; ++s) {
                    if (partition.is_final(s)) continue;
                    for (Action a = 0; a < n_actions; ++a)
                        if (uniform01(rng) < 0.5) table[(c * n + s) * n_actions + a] = uniform01(rng);
                }
            return table;
        },
        "reward");
    std::swap(reward_members[0], reward_members[reward_truth]);

    const auto true_dynamics = dynamics_table_from(cmdp.dynamics);
    std::vector<std::vector<double>> dynamics_members{true_dynamics};
    add_decoys(
        dynamics_members, spec.size_Fp, spec.reward_gap,
        [n](const auto& x, const auto& y) { return max_row_l1(x, y, n); },
        [&] {
            auto table = true_dynamics;
            for (std::size_t c = 0; c < spec.n_contexts; ++c)
                for (State s = 0; s < n; ++s) {
                    const auto succ = partition.successors(s);
                    if (succ.size() < 2) continue;
                    for (Action a = 0; a < n_actions; ++a) {
                        if (uniform01(rng) >= 0.5) continue;
                        const std::size_t base = ((c * n + s) * n_actions + a) * n;
                        const auto w = random_weights(succ.size(), rng);
                        for (std::size_t j = 0; j < succ.size(); ++j) table[base + succ[j]] = w[j];
                    }
                }
            return table;
        },
        "dynamics");
    std::swap(dynamics_members[0], dynamics_members[dynamics_truth]);

    bundle.reward_class = RewardFunctionClass(spec.n_contexts, n, n_actions, std::move(reward_members));
    bundle.reward_truth = reward_truth;
    bundle.dynamics_class = DynamicsClass(partition, spec.n_contexts, n_actions, std::move(dynamics_members));
    bundle.dynamics_truth = dynamics_truth;
    return bundle;
}

EnvBundle generate(const GenSpec& spec) {
    Rng rng(spec.seed);
    switch (spec.kind) {
        case EnvKind::doubly_stochastic: return EnvBundle{gen_doubly_stochastic(spec, rng), {}, {}, {}, {}};
        case EnvKind::lower_bound: return gen_lower_bound_instance(spec, rng);
        case EnvKind::random_realizable: return gen_random_realizable(spec, rng);
    }
    throw std::invalid_argument("unknown environment kind");
}

}  // namespace cmdp
