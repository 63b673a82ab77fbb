#pragma once

#include <cstddef>

namespace cmdp {

/// Which concentration constant the reward bonus uses: 4 when the dynamics
/// are known, 8 when they are estimated.
enum class BonusMode { known_dynamics, unknown_dynamics };

/// Confidence schedules. All logarithms are natural.
struct Schedules {
    std::size_t size_F = 1;
    std::size_t size_Fp = 1;
    double delta = 0.1;
    std::size_t n_states = 1;
    std::size_t n_actions = 1;
    std::size_t H = 1;
    std::size_t T = 1;
    double bonus_scale = 1.0;

    /// Throws std::invalid_argument on delta outside (0,1), negative scale or zero counts.
    void validate() const;

    /// bonus_scale * sqrt(17 t ln(K |F| t^3 / delta) / (|S||A|)), K = 4 or 8.
    double beta(std::size_t t, BonusMode mode) const;
    /// bonus_scale * sqrt(18 t ln(8 |Fp| t^3 / delta) / (|S||A|)).
    double gamma(std::size_t t) const;
    /// 2 sqrt((|S| + 2 ln(4 |S||A| T^2 / delta)) / max(1, N)). Unscaled.
    double xi(double visits) const;
};

}  // namespace cmdp
