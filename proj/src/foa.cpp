#include "cmdp/foa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmdp {

std::vector<double> l1_ball_maximizer(std::span<const double> base, std::span<const double> values, double radius) {
    const std::size_t m = base.size();
    if (m == 0 || values.size() != m) throw std::invalid_argument("l1_ball_maximizer: size mismatch");
    if (!(radius >= 0.0)) throw std::invalid_argument("l1_ball_maximizer: radius must be nonnegative");

    std::vector<double> p(base.begin(), base.end());
    const double mass = std::accumulate(p.begin(), p.end(), 0.0);
    if (mass <= 0.0) std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(m));

    std::vector<std::size_t> descending(m);
    std::iota(descending.begin(), descending.end(), std::size_t{0});
    std::stable_sort(descending.begin(), descending.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
    std::vector<std::size_t> ascending(m);
    std::iota(ascending.begin(), ascending.end(), std::size_t{0});
    std::stable_sort(ascending.begin(), ascending.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    const std::size_t best = descending.front();
    // Take exactly the mass added to `best` from the lowest-valued entries, so a
    // zero radius (or a row summing to 1 within rounding) leaves the base untouched.
    double excess = std::min(radius / 2.0, std::max(0.0, 1.0 - p[best]));
    p[best] += excess;
    for (std::size_t j : ascending) {
        if (excess <= 0.0) break;
        if (j == best) continue;
        const double removed = std::min(p[j], excess);
        p[j] -= removed;
        excess -= removed;
    }
    return p;
}

OptimisticModel foa_optimistic_plan(const StateActionTable& r_hat, const TabularDynamics& p_bar,
                                    const StateActionTable& xi, const LayerPartition& partition) {
    const std::size_t n = partition.n_states();
    const std::size_t n_actions = p_bar.n_actions();
    if (p_bar.n_states() != n || r_hat.n_states() != n || xi.n_states() != n || r_hat.n_actions() != n_actions ||
        xi.n_actions() != n_actions)
        throw std::invalid_argument("foa_optimistic_plan: dimension mismatch");

    OptimisticModel model{r_hat, TabularDynamics(n, n_actions), DeterministicPolicy::constant(n, 0), 0.0,
                          std::vector<double>(n, 0.0)};
    auto& v = model.state_values;

    for (std::size_t h = partition.horizon(); h-- > 0;) {
        const auto next_layer = partition.layer(h + 1);
        std::vector<double> next_values(next_layer.size());
        for (std::size_t i = 0; i < next_layer.size(); ++i) next_values[i] = v[next_layer[i]];

        std::vector<double> base(next_layer.size());
        for (State s : partition.layer(h)) {
            double best = -std::numeric_limits<double>::infinity();
            Action best_action = 0;
            for (Action a = 0; a < n_actions; ++a) {
                const double r = r_hat(s, a);
                if (std::isnan(r)) throw std::invalid_argument("foa_optimistic_plan: NaN reward");
                if (!(xi(s, a) >= 0.0)) throw std::invalid_argument("foa_optimistic_plan: negative confidence width");

                for (std::size_t i = 0; i < next_layer.size(); ++i) base[i] = p_bar(s, a, next_layer[i]);
                const auto row = l1_ball_maximizer(base, next_values, xi(s, a));

                double q = r;
                for (std::size_t i = 0; i < next_layer.size(); ++i) {
                    model.p_hat(s, a, next_layer[i]) = row[i];
                    if (row[i] != 0.0) q += row[i] * next_values[i];
                }
                if (a == 0 || q > best) {
                    best = q;
                    best_action = a;
                }
            }
            v[s] = best;
            model.policy.action_of[s] = best_action;
        }
    }
    model.value = v[partition.start()];
    return model;
}

}  // namespace cmdp
