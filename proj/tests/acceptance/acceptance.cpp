// Acceptance checks. One line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cmdp/environments.hpp"
#include "cmdp/foa.hpp"
#include "cmdp/function_class.hpp"
#include "cmdp/harness.hpp"
#include "cmdp/mdp.hpp"
#include "oracles.hpp"

using namespace cmdp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s;  // <= 0: none
    std::function<Outcome()> run;
};

std::size_t total_lsr_checks = 0;
std::size_t total_lsr_violations = 0;

void tally_lsr(const RegretLog& log) {
    for (const auto& s : log.seeds) {
        total_lsr_checks += s.lsr_checks;
        total_lsr_violations += s.lsr_violations;
    }
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

DeterministicPolicy random_policy(const LayeredCMDP& cmdp, Rng& rng) {
    DeterministicPolicy pi;
    for (State s = 0; s < cmdp.n_states; ++s)
        pi.action_of.push_back(std::uniform_int_distribution<std::size_t>(0, cmdp.n_actions - 1)(rng));
    return pi;
}

Outcome occupancy_consistency() {
    Rng rng(20240601);
    oracle::Shape shape;  // |S| <= 12, |A| <= 3, H <= 4
    double worst_norm = 0.0, worst_value = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto cmdp = oracle::random_cmdp(rng, shape);
        const auto pi = random_policy(cmdp, rng);
        const auto& dyn = *cmdp.dynamics[0];
        const auto occ = compute_occupancy(pi, dyn, cmdp.partition);
        for (std::size_t h = 0; h <= cmdp.horizon(); ++h) {
            double mass = 0.0;
            for (State s : cmdp.partition.layer(h)) {
                if (h == cmdp.horizon()) {
                    mass += occ.q_state[s];
                    continue;
                }
                for (Action a = 0; a < cmdp.n_actions; ++a) mass += occ.q(s, a);
            }
            worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
        }
        const double v_occ = value_of_policy(pi, dyn, cmdp.rewards[0], cmdp.partition);
        const double v_back = oracle::policy_value(pi, dyn, cmdp.rewards[0], cmdp.partition);
        worst_value = std::max(worst_value, std::abs(v_occ - v_back));
    }
    return {worst_norm <= 1e-12 && worst_value <= 1e-10,
            fmt("1000 instances, max layer-sum error %.3g (tol 1e-12), max value gap %.3g (tol 1e-10)", worst_norm,
                worst_value)};
}

Outcome planner_optimality() {
    Rng rng(77);
    oracle::Shape shape;
    shape.max_states = 12;
    shape.max_actions = 3;
    int done = 0;
    double worst = 0.0;
    while (done < 200) {
        const auto cmdp = oracle::random_cmdp(rng, shape);
        if (std::pow(static_cast<double>(cmdp.n_actions), static_cast<double>(cmdp.n_states - 1)) > 4096.0) continue;
        const auto r = plan(*cmdp.dynamics[0], cmdp.rewards[0], cmdp.partition);
        const double bf =
            oracle::brute_force_optimal_value(*cmdp.dynamics[0], cmdp.rewards[0], cmdp.partition, cmdp.n_actions);
        worst = std::max(worst, std::abs(r.value - bf));
        ++done;
    }
    return {worst <= 1e-10, fmt("200 instances with |A|^(|S|-1) <= 4096, max gap to brute force %.3g (tol 1e-10)", worst)};
}

Outcome foa_correctness() {
    // (a) whole simplex: hand example, then random instances against the teleport recursion.
    const LayerPartition two({{0}, {1, 2}, {3}});
    StateActionTable r(4, 2, 0.0);
    for (Action a = 0; a < 2; ++a) {
        r(1, a) = 0.2;
        r(2, a) = 0.9;
    }
    TabularDynamics p(4, 2);
    for (Action a = 0; a < 2; ++a) {
        p(0, a, 1) = 1.0;
        p(1, a, 3) = 1.0;
        p(2, a, 3) = 1.0;
    }
    const double hand = foa_optimistic_plan(r, p, StateActionTable(4, 2, 2.0), two).value;
    double worst_a = std::abs(hand - 0.9), worst_b = 0.0, worst_c = 0.0;

    Rng rng(4242);
    oracle::Shape wide;
    for (int i = 0; i < 200; ++i) {
        const auto cmdp = oracle::random_cmdp(rng, wide);
        auto r_hat = cmdp.rewards[0];
        for (auto& x : r_hat.values()) x *= 1.0 + 4.0 * uniform01(rng);
        const auto& p_bar = *cmdp.dynamics[0];
        StateActionTable xi(cmdp.n_states, cmdp.n_actions);
        for (auto& x : xi.values()) x = 2.0 + uniform01(rng);
        worst_a = std::max(worst_a, std::abs(foa_optimistic_plan(r_hat, p_bar, xi, cmdp.partition).value -
                                             oracle::teleport_value(r_hat, cmdp.partition, cmdp.n_actions)));
        const auto z = foa_optimistic_plan(r_hat, p_bar, StateActionTable(cmdp.n_states, cmdp.n_actions, 0.0),
                                           cmdp.partition);
        worst_b = std::max(worst_b, std::abs(z.value - plan(p_bar, r_hat, cmdp.partition).value));
    }

    oracle::Shape narrow;
    narrow.max_states = 8;
    narrow.max_actions = 2;
    narrow.max_H = 4;
    narrow.max_layer = 2;
    narrow.sparsity = 0.15;
    for (int i = 0; i < 200; ++i) {
        const auto cmdp = oracle::random_cmdp(rng, narrow);
        auto r_hat = cmdp.rewards[0];
        for (auto& x : r_hat.values()) x *= 1.0 + uniform01(rng);
        StateActionTable xi(cmdp.n_states, cmdp.n_actions);
        for (auto& x : xi.values()) x = 1.2 * uniform01(rng);
        const double v = foa_optimistic_plan(r_hat, *cmdp.dynamics[0], xi, cmdp.partition).value;
        const double g = oracle::foa_grid_value(r_hat, *cmdp.dynamics[0], xi, cmdp.partition, cmdp.n_actions, 1e-3);
        worst_c = std::max(worst_c, std::abs(v - g));
    }
    return {worst_a <= 1e-12 && worst_b <= 1e-10 && worst_c <= 2e-3,
            fmt("(a) whole simplex max gap %.3g, (b) zero width vs plan %.3g, (c) 200 grid-oracle instances max gap "
                "%.3g (tol 2e-3)",
                worst_a, worst_b, worst_c)};
}

GenSpec small_realizable(std::uint64_t seed, std::size_t contexts, std::size_t size_F, bool shared) {
    GenSpec s;
    s.kind = EnvKind::random_realizable;
    s.M = 2;
    s.H = 3;
    s.n_actions = 2;
    s.n_contexts = contexts;
    s.size_F = size_F;
    s.size_Fp = 4;
    s.seed = seed;
    s.shared_dynamics = shared;
    return s;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
    std::vector<std::uint64_t> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

Outcome optimism_frequency() {
    ExperimentConfig cfg;
    cfg.env = small_realizable(314, 3, 8, true);
    cfg.algorithm = Algorithm::rm_ucid;
    cfg.T = 500;
    cfg.delta = 0.1;
    cfg.bonus_scale = 1.0;
    cfg.p_min_exact = true;
    cfg.seeds = seed_range(50);
    const auto log = run_experiment(cfg);
    tally_lsr(log);
    std::size_t event = 0, checked = 0, violations = 0;
    for (const auto& s : log.seeds) {
        event += s.optimism_event_rounds;
        checked += s.optimism_checked_rounds;
        violations += s.optimism_violations;
    }
    const double freq = checked ? static_cast<double>(event) / static_cast<double>(checked) : 0.0;
    return {checked > 0 && violations == 0 && freq >= 0.9,
            fmt("|S|=6 |A|=2 H=3, 3 contexts, T=500, 50 seeds: event on %zu/%zu rounds (%.4f, need >= 0.9), "
                "optimism violations %zu (need 0)",
                event, checked, freq, violations)};
}

Outcome potential_bound() {
    std::size_t kd_ok = 0, ucid_ok = 0;
    double kd_ratio = 0.0, ucid_ratio = 0.0;
    const auto env = generate(small_realizable(2718, 3, 8, true));
    const double p_min = min_reach_probability(env.cmdp);
    for (auto alg : {Algorithm::rm_kd, Algorithm::rm_ucid}) {
        ExperimentConfig cfg;
        cfg.algorithm = alg;
        cfg.T = 2000;
        cfg.delta = 0.1;
        cfg.bonus_scale = 1.0;
        cfg.p_min_declared = p_min;
        cfg.seeds = seed_range(10);
        const auto log = run_experiment(cfg, env);
        tally_lsr(log);
        for (const auto& s : log.seeds) {
            const bool ok = s.potential_sum <= s.potential_bound;
            const double ratio = s.potential_sum / s.potential_bound;
            if (alg == Algorithm::rm_kd) {
                kd_ok += ok;
                kd_ratio = std::max(kd_ratio, ratio);
            } else {
                ucid_ok += ok;
                ucid_ratio = std::max(ucid_ratio, ratio);
            }
        }
    }
    return {kd_ok == 10 && ucid_ok == 10,
            fmt("DP p_min %.6g, T=2000, 10 seeds: phi within bound on %zu/10 (max sum/bound %.4f), psi within bound on "
                "%zu/10 (max %.4f)",
                p_min, kd_ok, kd_ratio, ucid_ok, ucid_ratio)};
}

Outcome sublinear_regret() {
    const auto env = generate(small_realizable(1618, 5, 16, false));
    auto mean_final = [&](Algorithm alg, std::size_t T) {
        ExperimentConfig cfg;
        cfg.algorithm = alg;
        cfg.T = T;
        cfg.delta = 0.1;
        cfg.bonus_scale = 0.05;
        cfg.seeds = seed_range(10);
        cfg.diagnostics = alg != Algorithm::uniform_random;
        const auto log = run_experiment(cfg, env);
        tally_lsr(log);
        double sum = 0.0;
        for (const auto& s : log.seeds) sum += s.cumulative_regret;
        return sum / static_cast<double>(log.seeds.size());
    };
    const double r2000 = mean_final(Algorithm::rm_kd, 2000);
    const double r4000 = mean_final(Algorithm::rm_kd, 4000);
    const double uniform = mean_final(Algorithm::uniform_random, 4000);
    const bool ratio_ok = r4000 <= 0.75 * 2.0 * r2000;
    const bool baseline_ok = r4000 <= 0.3 * uniform;
    return {ratio_ok && baseline_ok,
            fmt("mean R(2000)=%.4g, R(4000)=%.4g (ratio %.3f, need <= 1.5), uniform R(4000)=%.4g (fraction %.3f, need "
                "<= 0.3)",
                r2000, r4000, r4000 / r2000, uniform, r4000 / uniform)};
}

Outcome lsr_dominance() {
    return {total_lsr_checks > 0 && total_lsr_violations == 0,
            fmt("%zu update steps across the runs above, %zu violations (slack 1e-9)", total_lsr_checks,
                total_lsr_violations)};
}

Outcome lower_bound_instance() {
    std::string detail;
    bool ok = true;
    for (std::size_t M : {2u, 3u, 4u})
        for (std::size_t H : {2u, 3u}) {
            GenSpec s;
            s.kind = EnvKind::lower_bound;
            s.M = M;
            s.H = H;
            s.n_contexts = 2;
            s.size_F = 4;
            s.seed = M * 7 + H;
            const auto env = generate(s);
            const double p = min_reach_probability(env.cmdp);
            const bool here = env.cmdp.n_states == M * (H - 1) + 2 && p == 1.0 / static_cast<double>(M) &&
                              validate_cmdp(env.cmdp).ok();
            ok = ok && here;
            detail += fmt("M=%zu H=%zu |S|=%zu p_min=%.17g%s; ", M, H, env.cmdp.n_states, p, here ? "" : " (FAIL)");
        }
    return {ok, detail};
}

Outcome mixing() {
    double worst_sum = 0.0, worst_excess = -1.0;
    int classes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenSpec s;
        s.kind = EnvKind::random_realizable;
        s.M = 2 + seed % 3;
        s.H = 2 + seed % 3;
        s.n_actions = 2;
        s.n_contexts = 1 + seed % 3;
        s.size_Fp = 3;
        s.seed = 9000 + seed;
        const auto cls = *generate(s).dynamics_class;
        ++classes;
        for (double rho : {0.05, 0.2}) {
            const auto mixed = mix_with_uniform(cls, rho);
            const auto& part = cls.partition();
            for (std::size_t m = 0; m < cls.size(); ++m)
                for (ContextIndex c = 0; c < cls.n_contexts(); ++c)
                    for (State st = 0; st < cls.n_states(); ++st) {
                        if (part.is_final(st)) continue;
                        for (Action a = 0; a < cls.n_actions(); ++a) {
                            double sum = 0.0, l1 = 0.0;
                            for (State next = 0; next < cls.n_states(); ++next) {
                                sum += mixed(m, c, st, a, next);
                                l1 += std::abs(mixed(m, c, st, a, next) - cls(m, c, st, a, next));
                            }
                            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
                            worst_excess = std::max(worst_excess, l1 - 2.0 * rho);
                        }
                    }
        }
    }
    return {worst_sum <= 1e-12 && worst_excess <= 0.0,
            fmt("%d classes, rho in {0.05, 0.2}: max row-sum error %.3g (tol 1e-12), max (L1 shift - 2 rho) %.3g "
                "(need <= 0)",
                classes, worst_sum, worst_excess)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"occupancy_value_consistency", 10.0, occupancy_consistency},
        {"planner_optimality", 30.0, planner_optimality},
        {"foa_correctness", 60.0, foa_correctness},
        {"optimism_frequency", 0.0, optimism_frequency},
        {"potential_bound", 0.0, potential_bound},
        {"sublinear_regret", 300.0, sublinear_regret},
        {"lsr_argmin_dominance", 0.0, lsr_dominance},
        {"lower_bound_instance", 0.0, lower_bound_instance},
        {"mixing_with_uniform", 0.0, mixing},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = out.pass;
        std::string timing = fmt("%.2fs", secs);
        if (c.time_limit_s > 0.0) {
            timing += fmt(" / limit %.0fs", c.time_limit_s);
            if (secs >= c.time_limit_s) pass = false;
        }
        std::printf("[%s] %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), out.detail.c_str(), timing.c_str());
        std::fflush(stdout);
        failures += !pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
