#include "doctest.h"

#include <cmath>

#include "cmdp/foa.hpp"
#include "cmdp/mdp.hpp"
#include "cmdp/schedules.hpp"
#include "oracles.hpp"

using namespace cmdp;

namespace {

Schedules sched(std::size_t S, std::size_t A, std::size_t F, std::size_t Fp, double delta, std::size_t T = 10) {
    Schedules s;
    s.n_states = S;
    s.n_actions = A;
    s.size_F = F;
    s.size_Fp = Fp;
    s.delta = delta;
    s.T = T;
    s.H = 2;
    return s;
}

double l1(std::span<const double> x, std::span<const double> y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
    return d;
}

}  // namespace

TEST_CASE("beta schedule") {
    auto s = sched(4, 2, 16, 1, 0.5);
    // Frozen from the closed form sqrt(17 * ln 65536).
    CHECK(s.beta(8, BonusMode::known_dynamics) == doctest::Approx(13.73084240359291).epsilon(1e-12));
    // Same parameters with the estimated-dynamics constant 8.
    CHECK(s.beta(9, BonusMode::unknown_dynamics) == doctest::Approx(15.235395588902088).epsilon(1e-12));
    CHECK(s.beta(100, BonusMode::known_dynamics) > s.beta(50, BonusMode::known_dynamics));
    for (std::size_t t = 1; t < 500; ++t) {
        CHECK(s.beta(t + 1, BonusMode::known_dynamics) >= s.beta(t, BonusMode::known_dynamics));
        CHECK(s.beta(t, BonusMode::unknown_dynamics) > s.beta(t, BonusMode::known_dynamics));
    }
    s.bonus_scale = 0.0;
    CHECK(s.beta(8, BonusMode::known_dynamics) == 0.0);
    s.bonus_scale = 0.25;
    CHECK(s.beta(8, BonusMode::known_dynamics) == doctest::Approx(0.25 * 13.73084240359291).epsilon(1e-12));
    CHECK_THROWS_AS(s.beta(0, BonusMode::known_dynamics), std::invalid_argument);
}

TEST_CASE("gamma schedule") {
    auto s = sched(2, 2, 1, 4, 0.5);
    CHECK(s.gamma(2) == doctest::Approx(7.49299150041928).epsilon(1e-12));
    for (std::size_t t = 1; t < 500; ++t) CHECK(s.gamma(t + 1) >= s.gamma(t));
    auto equal = sched(5, 3, 7, 7, 0.2);
    for (std::size_t t : {1u, 2u, 17u, 1000u})
        CHECK(equal.gamma(t) == doctest::Approx(std::sqrt(18.0 / 17.0) * equal.beta(t, BonusMode::unknown_dynamics))
                                    .epsilon(1e-12));
    s.bonus_scale = 0.0;
    CHECK(s.gamma(2) == 0.0);
}

TEST_CASE("xi schedule") {
    const auto s = sched(2, 2, 1, 1, 0.5, 10);
    CHECK(s.xi(0) == doctest::Approx(8.518641247892914).epsilon(1e-12));
    CHECK(s.xi(0) == s.xi(1));
    CHECK(s.xi(4) / s.xi(1) == 0.5);
    double prev = s.xi(0);
    for (double n = 1; n < 1e7; n *= 3) {
        CHECK(s.xi(n) <= prev);
        prev = s.xi(n);
    }
    CHECK(s.xi(1e12) < 1e-4);
}

TEST_CASE("schedule validation") {
    auto s = sched(2, 2, 1, 1, 0.5);
    CHECK_NOTHROW(s.validate());
    s.bonus_scale = 0.0;
    CHECK_NOTHROW(s.validate());
    s.bonus_scale = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.bonus_scale = 1.0;
    s.delta = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.delta = 0.5;
    s.size_F = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("L1-ball inner maximization") {
    SUBCASE("greedy shift of half the radius") {
        const std::vector<double> base{0.5, 0.5}, v{1.0, 0.0};
        const auto p = l1_ball_maximizer(base, v, 0.4);
        CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("removal from the lowest values first") {
        const std::vector<double> base{0.2, 0.3, 0.5}, v{0.0, 1.0, 2.0};
        const auto p = l1_ball_maximizer(base, v, 0.6);
        CHECK(p[2] == doctest::Approx(0.8));
        CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(0.2));
    }
    SUBCASE("ties favour the lowest index on both sides") {
        const std::vector<double> base{0.25, 0.25, 0.25, 0.25}, v{1.0, 1.0, 0.0, 0.0};
        const auto p = l1_ball_maximizer(base, v, 0.2);
        CHECK(p[0] == doctest::Approx(0.35));
        CHECK(p[1] == doctest::Approx(0.25));
        CHECK(p[2] == doctest::Approx(0.15));
        CHECK(p[3] == doctest::Approx(0.25));
    }
    SUBCASE("whole simplex and zero radius") {
        const std::vector<double> base{0.1, 0.6, 0.3}, v{0.5, 0.1, 0.9};
        const auto p = l1_ball_maximizer(base, v, 2.0);
        CHECK(p[2] == 1.0);
        CHECK(l1_ball_maximizer(base, v, 0.0) == base);
    }
    SUBCASE("empty base is read as uniform") {
        const std::vector<double> base{0.0, 0.0}, v{0.0, 1.0};
        const auto p = l1_ball_maximizer(base, v, 0.2);
        CHECK(p[1] == doctest::Approx(0.6));
    }
    SUBCASE("errors") {
        const std::vector<double> base{1.0}, v{1.0, 2.0};
        CHECK_THROWS_AS(l1_ball_maximizer(base, v, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(l1_ball_maximizer(base, std::vector<double>{0.0}, -0.1), std::invalid_argument);
    }
}

TEST_CASE("FOA with the whole simplex teleports to the best successor") {
    const LayerPartition part({{0}, {1, 2}, {3}});
    StateActionTable r(4, 2, 0.0);
    for (Action a = 0; a < 2; ++a) {
        r(1, a) = 0.2;
        r(2, a) = 0.9;
    }
    TabularDynamics p_bar(4, 2);
    for (Action a = 0; a < 2; ++a) {
        p_bar(0, a, 1) = 1.0;
        p_bar(1, a, 3) = 1.0;
        p_bar(2, a, 3) = 1.0;
    }
    const auto m = foa_optimistic_plan(r, p_bar, StateActionTable(4, 2, 2.0), part);
    CHECK(m.value == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.p_hat(0, 0, 2) == 1.0);
}

TEST_CASE("FOA degenerate and random cases") {
    Rng rng(17);
    oracle::Shape shape;
    shape.max_states = 9;
    shape.max_actions = 3;
    shape.max_H = 4;
    shape.max_layer = 3;
    for (int i = 0; i < 100; ++i) {
        const auto cmdp = oracle::random_cmdp(rng, shape);
        const auto& part = cmdp.partition;
        StateActionTable r_hat = cmdp.rewards[0];
        for (auto& x : r_hat.values()) x *= 3.0;  // optimistic rewards above 1
        const auto& p_bar = *cmdp.dynamics[0];

        const auto zero = foa_optimistic_plan(r_hat, p_bar, StateActionTable(cmdp.n_states, cmdp.n_actions, 0.0), part);
        const auto planned = plan(p_bar, r_hat, part);
        CHECK(std::abs(zero.value - planned.value) <= 1e-12);
        CHECK(zero.p_hat == p_bar);

        const auto wide = foa_optimistic_plan(r_hat, p_bar, StateActionTable(cmdp.n_states, cmdp.n_actions, 2.5), part);
        CHECK(std::abs(wide.value - oracle::teleport_value(r_hat, part, cmdp.n_actions)) <= 1e-12);

        StateActionTable xi(cmdp.n_states, cmdp.n_actions);
        for (auto& x : xi.values()) x = 0.8 * uniform01(rng);
        const auto m = foa_optimistic_plan(r_hat, p_bar, xi, part);
        CHECK(validate_dynamics(m.p_hat, part).ok());
        for (State s = 0; s < cmdp.n_states; ++s) {
            if (part.is_final(s)) continue;
            for (Action a = 0; a < cmdp.n_actions; ++a) CHECK(l1(m.p_hat.row(s, a), p_bar.row(s, a)) <= xi(s, a) + 1e-12);
        }
        const auto replanned = plan(m.p_hat, r_hat, part);
        CHECK(std::abs(replanned.value - m.value) <= 1e-10);
        CHECK(std::abs(value_of_policy(m.policy, m.p_hat, r_hat, part) - m.value) <= 1e-10);
        CHECK(m.value >= planned.value - 1e-12);
        CHECK(m.value <= wide.value + 1e-12);
    }
}

TEST_CASE("FOA matches the grid oracle on two-successor layers") {
    Rng rng(23);
    oracle::Shape shape;
    shape.max_states = 8;
    shape.max_actions = 2;
    shape.max_H = 4;
    shape.max_layer = 2;
    shape.sparsity = 0.15;
    for (int i = 0; i < 30; ++i) {
        const auto cmdp = oracle::random_cmdp(rng, shape);
        StateActionTable xi(cmdp.n_states, cmdp.n_actions);
        for (auto& x : xi.values()) x = uniform01(rng);
        const auto m = foa_optimistic_plan(cmdp.rewards[0], *cmdp.dynamics[0], xi, cmdp.partition);
        const double grid = oracle::foa_grid_value(cmdp.rewards[0], *cmdp.dynamics[0], xi, cmdp.partition, cmdp.n_actions);
        CHECK(std::abs(m.value - grid) <= 2e-3);
    }
}

TEST_CASE("FOA on empty rows and bad inputs") {
    const LayerPartition part({{0}, {1, 2}, {3}});
    StateActionTable r(4, 1, 0.0);
    r(1, 0) = 1.0;
    TabularDynamics empty(4, 1);
    // Uniform base (0.5, 0.5), radius 0.4: 0.7 on the better successor.
    const auto m = foa_optimistic_plan(r, empty, StateActionTable(4, 1, 0.4), part);
    CHECK(m.value == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(validate_dynamics(m.p_hat, part).ok());

    CHECK_THROWS_AS(foa_optimistic_plan(r, empty, StateActionTable(4, 1, -0.1), part), std::invalid_argument);
    r(2, 0) = std::nan("");
    CHECK_THROWS_AS(foa_optimistic_plan(r, empty, StateActionTable(4, 1, 0.4), part), std::invalid_argument);
}
