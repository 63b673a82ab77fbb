#include "cmdp/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmdp {

void Schedules::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(bonus_scale >= 0.0)) throw std::invalid_argument("bonus_scale must be nonnegative");
    if (size_F == 0 || size_Fp == 0 || n_states == 0 || n_actions == 0 || H == 0 || T == 0)
        throw std::invalid_argument("schedule counts must be positive");
}

double Schedules::beta(std::size_t t, BonusMode mode) const {
    if (t == 0) throw std::invalid_argument("beta: rounds start at 1");
    const double k = mode == BonusMode::known_dynamics ? 4.0 : 8.0;
    const double td = static_cast<double>(t);
    const double log_term = std::log(k * static_cast<double>(size_F) * td * td * td / delta);
    return bonus_scale * std::sqrt(17.0 * td * log_term / static_cast<double>(n_states * n_actions));
}

double Schedules::gamma(std::size_t t) const {
    if (t == 0) throw std::invalid_argument("gamma: rounds start at 1");
    const double td = static_cast<double>(t);
    const double log_term = std::log(8.0 * static_cast<double>(size_Fp) * td * td * td / delta);
    return bonus_scale * std::sqrt(18.0 * td * log_term / static_cast<double>(n_states * n_actions));
}

double Schedules::xi(double visits) const {
    const double sa = static_cast<double>(n_states * n_actions);
    const double td = static_cast<double>(T);
    const double lambda = 2.0 * std::log(4.0 * sa * td * td / delta);
    return 2.0 * std::sqrt((static_cast<double>(n_states) + lambda) / std::max(1.0, visits));
}

}  // namespace cmdp
