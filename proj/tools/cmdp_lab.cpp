// cmdp_lab: run experiments, generate instances, verify instance files.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "cmdp/harness.hpp"
#include "cmdp/mdp.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override, const std::string& diag_path) {
    const std::filesystem::path path(config_path);
    auto config = cmdp::config_from_json(cmdp::read_json_file(path), path.parent_path());
    if (!out_override.empty()) config.output = out_override;
    if (config.output.empty()) throw std::invalid_argument("config has no 'output' and --out was not given");

    const auto log = cmdp::run_experiment(config);
    cmdp::write_csv(log, config.output);
    if (!diag_path.empty()) cmdp::write_diagnostics_csv(log, diag_path);

    std::printf("%s  T=%zu  seeds=%zu  -> %s\n", std::string(cmdp::to_string(config.algorithm)).c_str(), config.T,
                config.seeds.size(), config.output.string().c_str());
    for (const auto& s : log.seeds) {
        std::printf("seed %llu: cumulative regret %.6g", static_cast<unsigned long long>(s.seed), s.cumulative_regret);
        if (s.potential_bound > 0.0) std::printf("  potential %.6g / bound %.6g", s.potential_sum, s.potential_bound);
        if (s.optimism_checked_rounds > 0)
            std::printf("  optimism event %zu/%zu, violations %zu", s.optimism_event_rounds, s.optimism_checked_rounds,
                        s.optimism_violations);
        if (s.lsr_checks > 0) std::printf("  lsr violations %zu/%zu", s.lsr_violations, s.lsr_checks);
        std::printf("\n");
    }
    return 0;
}

int cmd_gen_env(const std::string& spec_path, const std::string& out_path) {
    const auto spec = cmdp::gen_spec_from_json(cmdp::read_json_file(spec_path));
    const auto bundle = cmdp::generate(spec);
    cmdp::write_json_file(out_path, cmdp::bundle_to_json(bundle));
    std::printf("wrote %s (%zu states, %zu actions, H=%zu, %zu contexts)\n", out_path.c_str(), bundle.cmdp.n_states,
                bundle.cmdp.n_actions, bundle.cmdp.horizon(), bundle.cmdp.n_contexts());
    return 0;
}

int cmd_verify(const std::string& env_path) {
    const auto cmdp = cmdp::cmdp_from_json(cmdp::read_json_file(env_path), false);
    const auto report = cmdp::validate_cmdp(cmdp);
    std::printf("instance: %zu states, %zu actions, H=%zu, %zu contexts\n", cmdp.n_states, cmdp.n_actions,
                cmdp.horizon(), cmdp.n_contexts());
    if (!report.ok()) {
        std::printf("validation: FAILED (%zu violations)\n", report.violations.size());
        for (const auto& v : report.violations) std::printf("  - %s\n", v.c_str());
        return 1;
    }
    std::printf("validation: ok\n");
    std::printf("shared dynamics: %s\n", cmdp.has_shared_dynamics() ? "yes" : "no");
    std::printf("min_reach_probability: %.12g\n", cmdp::min_reach_probability(cmdp));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contextual MDP regret-minimization lab"};
    app.require_subcommand(1);

    std::string config_path, out_override, diag_path;
    auto* run = app.add_subcommand("run", "Run an experiment config and write the regret CSV");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_override, "Override the config's output path");
    run->add_option("--diagnostics", diag_path, "Also write per-round diagnostics CSV");

    std::string spec_path, out_path;
    auto* gen = app.add_subcommand("gen-env", "Generate an instance from a generator spec");
    gen->add_option("--spec", spec_path, "Generator spec (JSON)")->required()->check(CLI::ExistingFile);
    gen->add_option("--out", out_path, "Output instance file")->required();

    std::string env_path;
    auto* verify = app.add_subcommand("verify", "Validate an instance file and report its minimum reachability");
    verify->add_option("--env", env_path, "Instance file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config_path, out_override, diag_path);
        if (*gen) return cmd_gen_env(spec_path, out_path);
        if (*verify) return cmd_verify(env_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
