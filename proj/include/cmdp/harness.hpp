#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmdp/environments.hpp"
#include "cmdp/serialization.hpp"

namespace cmdp {

enum class Algorithm { rm_kd, rm_ucid, rm_ucdd, uniform_random, greedy_no_bonus };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

struct ExperimentConfig {
    /// Generator spec or path to a serialized instance.
    std::variant<GenSpec, std::filesystem::path> env = GenSpec{};
    Algorithm algorithm = Algorithm::rm_kd;
    std::size_t T = 100;
    double delta = 0.1;
    /// rm_ucid / rm_ucdd. Either a number or, with p_min_exact, the DP value.
    std::optional<double> p_min_declared;
    bool p_min_exact = false;
    double bonus_scale = 1.0;
    std::vector<std::uint64_t> seeds{0};
    std::filesystem::path output;
    bool memoize = true;
    /// Potential, optimism and LSR-dominance checks. Costs an extra
    /// materialization of every context per round.
    bool diagnostics = true;
};

/// Keys: env (object = GenSpec, string = instance file relative to base_dir),
/// algorithm, T, delta, p_min_declared (number or "exact"), bonus_scale,
/// seeds, output, memoize, diagnostics.
ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir = {});
json config_to_json(const ExperimentConfig& config);

struct RegretRow {
    std::uint64_t seed = 0;
    std::size_t t = 0;
    std::int64_t context = 0;
    double v_star = 0.0;
    double v_pi = 0.0;
    double inst_regret = 0.0;
    double cum_regret = 0.0;
    double realized_return = 0.0;
    std::optional<double> beta;
    std::optional<double> gamma;
    /// phi_t for rm_kd / greedy, psi_t for rm_ucid / rm_ucdd; empty during initialization.
    std::optional<double> potential;
    std::uint64_t policy_hash = 0;
    std::optional<double> optimistic_value;
    std::optional<double> xi_min;
    std::optional<double> xi_max;
};

struct SeedSummary {
    std::uint64_t seed = 0;
    double cumulative_regret = 0.0;
    double initialization_regret = 0.0;
    /// Sum over t > |A| of the potential and the deterministic bound it must respect.
    double potential_sum = 0.0;
    double potential_bound = 0.0;
    std::size_t lsr_checks = 0;
    std::size_t lsr_violations = 0;
    /// Rounds (t > |A|) on which the confidence event held / was checked.
    std::size_t optimism_event_rounds = 0;
    std::size_t optimism_checked_rounds = 0;
    std::size_t optimism_violations = 0;
};

struct RegretLog {
    std::vector<RegretRow> rows;
    std::vector<SeedSummary> seeds;
};

/// Plays the interaction protocol for every configured seed. Seeds run in
/// parallel, capped by CMDP_LAB_THREADS (0 or unset = all cores); the
/// result is ordered by seed position and independent of the thread count.
/// Throws std::invalid_argument on config/env mismatches.
RegretLog run_experiment(const ExperimentConfig& config);
/// Same, on an instance already in memory (config.env is ignored).
RegretLog run_experiment(const ExperimentConfig& config, const EnvBundle& env);

/// Resolves config.env into an instance.
EnvBundle load_environment(const ExperimentConfig& config);

/// Worker count from CMDP_LAB_THREADS.
std::size_t configured_threads();

inline constexpr std::string_view kCsvHeader =
    "seed,t,context,v_star,v_pi,inst_regret,cum_regret,return,beta,gamma_or_blank,phi_or_psi";

/// 12 significant digits, LF endings. Throws std::runtime_error on an unwritable path.
void write_csv(const RegretLog& log, const std::filesystem::path& path);
/// Per-round policy hash, optimistic value and xi range.
void write_diagnostics_csv(const RegretLog& log, const std::filesystem::path& path);

/// Parses a file written by write_csv. Diagnostic-only fields stay empty.
std::vector<RegretRow> read_csv(const std::filesystem::path& path);

}  // namespace cmdp
