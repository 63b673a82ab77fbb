#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <string>

#include "cmdp/environments.hpp"
#include "cmdp/harness.hpp"
#include "cmdp/mdp.hpp"
#include "cmdp/serialization.hpp"

namespace py = pybind11;
using namespace cmdp;

namespace {

py::object optional_float(const std::optional<double>& x) {
    return x ? py::object(py::float_(*x)) : py::object(py::none());
}

py::dict row_to_dict(const RegretRow& r) {
    py::dict d;
    d["seed"] = r.seed;
    d["t"] = r.t;
    d["context"] = r.context;
    d["v_star"] = r.v_star;
    d["v_pi"] = r.v_pi;
    d["inst_regret"] = r.inst_regret;
    d["cum_regret"] = r.cum_regret;
    d["return"] = r.realized_return;
    d["beta"] = optional_float(r.beta);
    d["gamma"] = optional_float(r.gamma);
    d["potential"] = optional_float(r.potential);
    d["policy_hash"] = r.policy_hash;
    d["optimistic_value"] = optional_float(r.optimistic_value);
    d["xi_min"] = optional_float(r.xi_min);
    d["xi_max"] = optional_float(r.xi_max);
    return d;
}

py::dict summary_to_dict(const SeedSummary& s) {
    py::dict d;
    d["seed"] = s.seed;
    d["cumulative_regret"] = s.cumulative_regret;
    d["initialization_regret"] = s.initialization_regret;
    d["potential_sum"] = s.potential_sum;
    d["potential_bound"] = s.potential_bound;
    d["lsr_checks"] = s.lsr_checks;
    d["lsr_violations"] = s.lsr_violations;
    d["optimism_event_rounds"] = s.optimism_event_rounds;
    d["optimism_checked_rounds"] = s.optimism_checked_rounds;
    d["optimism_violations"] = s.optimism_violations;
    return d;
}

RegretLog run(const std::string& config_json, const std::string& base_dir) {
    const auto config = config_from_json(json::parse(config_json), base_dir);
    py::gil_scoped_release release;
    return run_experiment(config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Contextual MDP regret-minimization core";

    py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

    m.attr("CSV_HEADER") = std::string(kCsvHeader);

    m.def("generate", [](const std::string& spec_json) {
        return bundle_to_json(generate(gen_spec_from_json(json::parse(spec_json)))).dump();
    }, py::arg("spec_json"), "Generator spec (JSON text) to an instance bundle (JSON text).");

    m.def("validate", [](const std::string& instance_json) {
        return validate_cmdp(cmdp_from_json(json::parse(instance_json), false)).violations;
    }, py::arg("instance_json"), "Structural violations of an instance; empty when valid.");

    m.def("min_reach_probability", [](const std::string& instance_json) {
        return min_reach_probability(cmdp_from_json(json::parse(instance_json)));
    }, py::arg("instance_json"));

    m.def("plan", [](const std::string& instance_json, std::size_t context) {
        const auto cmdp = cmdp_from_json(json::parse(instance_json));
        if (context >= cmdp.n_contexts()) throw std::invalid_argument("context index out of range");
        const auto result = plan(cmdp.dynamics_of(context), cmdp.rewards[context], cmdp.partition);
        return py::make_tuple(result.value, result.policy.action_of, result.state_values);
    }, py::arg("instance_json"), py::arg("context") = 0,
       "Optimal (value, actions per state, state values) for one context.");

    m.def("run_experiment", [](const std::string& config_json, const std::string& base_dir) {
        const auto log = run(config_json, base_dir);
        py::list rows, seeds;
        for (const auto& r : log.rows) rows.append(row_to_dict(r));
        for (const auto& s : log.seeds) seeds.append(summary_to_dict(s));
        return py::make_tuple(rows, seeds);
    }, py::arg("config_json"), py::arg("base_dir") = std::string(),
       "Runs every seed; returns (rows, per-seed summaries).");

    m.def("run_to_csv", [](const std::string& config_json, const std::string& path, const std::string& base_dir) {
        const auto log = run(config_json, base_dir);
        write_csv(log, path);
        return log.rows.size();
    }, py::arg("config_json"), py::arg("path"), py::arg("base_dir") = std::string());

    m.def("read_csv", [](const std::string& path) {
        py::list rows;
        for (const auto& r : read_csv(path)) rows.append(row_to_dict(r));
        return rows;
    }, py::arg("path"));

    m.def("configured_threads", &configured_threads);
}
