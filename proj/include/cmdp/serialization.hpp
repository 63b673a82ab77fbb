#pragma once

#include <filesystem>

#include "json.hpp"

#include "cmdp/environments.hpp"

namespace cmdp {

using json = nlohmann::json;

// Instance document:
//   n_states, n_actions, H, layers, contexts, context_dist,
//   blocks: [{context, dynamics[s][a] = dense row over all states, rewards[s][a]}]
// plus optional reward_class / dynamics_class:
//   {n_contexts, n_states, n_actions, members[m][c][s][a](, [s']), truth_index?}
// Value-equal per-context kernels are shared again on load.

json cmdp_to_json(const LayeredCMDP& cmdp);
/// Throws std::invalid_argument on malformed documents, and on failed
/// validation unless validate is false.
LayeredCMDP cmdp_from_json(const json& doc, bool validate = true);

json reward_class_to_json(const RewardFunctionClass& cls, std::optional<std::size_t> truth);
RewardFunctionClass reward_class_from_json(const json& doc, std::optional<std::size_t>* truth = nullptr);

json dynamics_class_to_json(const DynamicsClass& cls, std::optional<std::size_t> truth);
DynamicsClass dynamics_class_from_json(const json& doc, const LayerPartition& partition,
                                       std::optional<std::size_t>* truth = nullptr);

json bundle_to_json(const EnvBundle& bundle);
EnvBundle bundle_from_json(const json& doc);

json gen_spec_to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const json& doc);

EnvKind env_kind_from_string(std::string_view name);
std::string_view to_string(EnvKind kind);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

}  // namespace cmdp
