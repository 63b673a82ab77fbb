#include "cmdp/serialization.hpp"

#include <fstream>
#include <stdexcept>

#include "cmdp/mdp.hpp"

namespace cmdp {

namespace {

template <typename T>
T required(const json& doc, const char* key) {
    if (!doc.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
    }
}

void expect_size(const json& node, std::size_t n, const std::string& what) {
    if (!node.is_array() || node.size() != n)
        throw std::invalid_argument(what + ": expected an array of length " + std::to_string(n));
}

}  // namespace

json cmdp_to_json(const LayeredCMDP& cmdp) {
    json doc;
    doc["n_states"] = cmdp.n_states;
    doc["n_actions"] = cmdp.n_actions;
    doc["H"] = cmdp.horizon();
    doc["layers"] = cmdp.partition.layers();
    doc["contexts"] = cmdp.context_ids;
    doc["context_dist"] = cmdp.context_dist;
    json blocks = json::array();
    for (ContextIndex c = 0; c < cmdp.n_contexts(); ++c) {
        const auto& dyn = cmdp.dynamics_of(c);
        const auto& rew = cmdp.rewards_of(c);
        json dynamics = json::array();
        json rewards = json::array();
        for (State s = 0; s < cmdp.n_states; ++s) {
            json dyn_s = json::array();
            json rew_s = json::array();
            for (Action a = 0; a < cmdp.n_actions; ++a) {
                const auto row = dyn.row(s, a);
                dyn_s.push_back(std::vector<double>(row.begin(), row.end()));
                rew_s.push_back(rew(s, a));
            }
            dynamics.push_back(std::move(dyn_s));
            rewards.push_back(std::move(rew_s));
        }
        blocks.push_back({{"context", cmdp.context_ids[c]}, {"dynamics", std::move(dynamics)}, {"rewards", std::move(rewards)}});
    }
    doc["blocks"] = std::move(blocks);
    return doc;
}

LayeredCMDP cmdp_from_json(const json& doc, bool validate) {
    LayeredCMDP cmdp;
    cmdp.n_states = required<std::size_t>(doc, "n_states");
    cmdp.n_actions = required<std::size_t>(doc, "n_actions");
    const auto H = required<std::size_t>(doc, "H");
    cmdp.partition = LayerPartition(required<std::vector<std::vector<State>>>(doc, "layers"));
    if (cmdp.partition.horizon() != H) throw std::invalid_argument("H disagrees with the number of layers");
    if (cmdp.partition.n_states() != cmdp.n_states) throw std::invalid_argument("layers do not cover n_states");
    cmdp.context_ids = required<std::vector<std::int64_t>>(doc, "contexts");
    cmdp.context_dist = required<std::vector<double>>(doc, "context_dist");

    const auto& blocks = doc.at("blocks");
    expect_size(blocks, cmdp.context_ids.size(), "blocks");
    for (ContextIndex c = 0; c < cmdp.context_ids.size(); ++c) {
        const auto& block = blocks[c];
        if (required<std::int64_t>(block, "context") != cmdp.context_ids[c])
            throw std::invalid_argument("blocks must follow the order of 'contexts'");
        const auto& dynamics = block.at("dynamics");
        const auto& rewards = block.at("rewards");
        expect_size(dynamics, cmdp.n_states, "dynamics");
        expect_size(rewards, cmdp.n_states, "rewards");
        TabularDynamics dyn(cmdp.n_states, cmdp.n_actions);
        TabularRewards rew(cmdp.n_states, cmdp.n_actions);
        for (State s = 0; s < cmdp.n_states; ++s) {
            expect_size(dynamics[s], cmdp.n_actions, "dynamics[s]");
            expect_size(rewards[s], cmdp.n_actions, "rewards[s]");
            for (Action a = 0; a < cmdp.n_actions; ++a) {
                const auto row = dynamics[s][a].get<std::vector<double>>();
                if (row.size() != cmdp.n_states) throw std::invalid_argument("dynamics rows must list every state");
                std::copy(row.begin(), row.end(), dyn.row(s, a).begin());
                rew(s, a) = rewards[s][a].get<double>();
            }
        }
        std::shared_ptr<const TabularDynamics> shared;
        for (const auto& prior : cmdp.dynamics)
            if (*prior == dyn) shared = prior;
        cmdp.dynamics.push_back(shared ? shared : std::make_shared<const TabularDynamics>(std::move(dyn)));
        cmdp.rewards.push_back(std::move(rew));
    }
    if (!validate) return cmdp;
    const auto report = validate_cmdp(cmdp);
    if (!report.ok()) throw std::invalid_argument("invalid instance: " + report.violations.front());
    return cmdp;
}

json reward_class_to_json(const RewardFunctionClass& cls, std::optional<std::size_t> truth) {
    json members = json::array();
    for (std::size_t m = 0; m < cls.size(); ++m) {
        json by_context = json::array();
        for (ContextIndex c = 0; c < cls.n_contexts(); ++c) {
            json by_state = json::array();
            for (State s = 0; s < cls.n_states(); ++s) {
                std::vector<double> values(cls.n_actions());
                for (Action a = 0; a < cls.n_actions(); ++a) values[a] = cls(m, c, s, a);
                by_state.push_back(std::move(values));
            }
            by_context.push_back(std::move(by_state));
        }
        members.push_back(std::move(by_context));
    }
    json doc{{"n_contexts", cls.n_contexts()},
             {"n_states", cls.n_states()},
             {"n_actions", cls.n_actions()},
             {"members", std::move(members)}};
    if (truth) doc["truth_index"] = *truth;
    return doc;
}

RewardFunctionClass reward_class_from_json(const json& doc, std::optional<std::size_t>* truth) {
    const auto n_contexts = required<std::size_t>(doc, "n_contexts");
    const auto n_states = required<std::size_t>(doc, "n_states");
    const auto n_actions = required<std::size_t>(doc, "n_actions");
    std::vector<std::vector<double>> tables;
    for (const auto& member : doc.at("members")) {
        expect_size(member, n_contexts, "reward member");
        std::vector<double> table;
        table.reserve(n_contexts * n_states * n_actions);
        for (const auto& by_state : member) {
            expect_size(by_state, n_states, "reward member[c]");
            for (const auto& values : by_state) {
                expect_size(values, n_actions, "reward member[c][s]");
                for (const auto& v : values) table.push_back(v.get<double>());
            }
        }
        tables.push_back(std::move(table));
    }
    RewardFunctionClass cls(n_contexts, n_states, n_actions, std::move(tables));
    if (truth) {
        *truth = doc.contains("truth_index") ? std::optional<std::size_t>(doc.at("truth_index").get<std::size_t>())
                                             : std::nullopt;
        if (*truth && **truth >= cls.size()) throw std::invalid_argument("reward truth_index out of range");
    }
    return cls;
}

json dynamics_class_to_json(const DynamicsClass& cls, std::optional<std::size_t> truth) {
    const std::size_t n = cls.n_states();
    json members = json::array();
    for (std::size_t m = 0; m < cls.size(); ++m) {
        json by_context = json::array();
        for (ContextIndex c = 0; c < cls.n_contexts(); ++c) {
            json by_state = json::array();
            for (State s = 0; s < n; ++s) {
                json by_action = json::array();
                for (Action a = 0; a < cls.n_actions(); ++a) {
                    std::vector<double> row(n);
                    for (State next = 0; next < n; ++next) row[next] = cls(m, c, s, a, next);
                    by_action.push_back(std::move(row));
                }
                by_state.push_back(std::move(by_action));
            }
            by_context.push_back(std::move(by_state));
        }
        members.push_back(std::move(by_context));
    }
    json doc{{"n_contexts", cls.n_contexts()},
             {"n_states", n},
             {"n_actions", cls.n_actions()},
             {"members", std::move(members)}};
    if (truth) doc["truth_index"] = *truth;
    return doc;
}

DynamicsClass dynamics_class_from_json(const json& doc, const LayerPartition& partition,
                                       std::optional<std::size_t>* truth) {
    const auto n_contexts = required<std::size_t>(doc, "n_contexts");
    const auto n_states = required<std::size_t>(doc, "n_states");
    const auto n_actions = required<std::size_t>(doc, "n_actions");
    if (n_states != partition.n_states()) throw std::invalid_argument("dynamics class state count mismatch");
    std::vector<std::vector<double>> tables;
    for (const auto& member : doc.at("members")) {
        expect_size(member, n_contexts, "dynamics member");
        std::vector<double> table;
        table.reserve(n_contexts * n_states * n_actions * n_states);
        for (const auto& by_state : member) {
            expect_size(by_state, n_states, "dynamics member[c]");
            for (const auto& by_action : by_state) {
                expect_size(by_action, n_actions, "dynamics member[c][s]");
                for (const auto& row : by_action) {
                    expect_size(row, n_states, "dynamics member[c][s][a]");
                    for (const auto& v : row) table.push_back(v.get<double>());
                }
            }
        }
        tables.push_back(std::move(table));
    }
    DynamicsClass cls(partition, n_contexts, n_actions, std::move(tables));
    if (truth) {
        *truth = doc.contains("truth_index") ? std::optional<std::size_t>(doc.at("truth_index").get<std::size_t>())
                                             : std::nullopt;
        if (*truth && **truth >= cls.size()) throw std::invalid_argument("dynamics truth_index out of range");
    }
    return cls;
}

json bundle_to_json(const EnvBundle& bundle) {
    json doc = cmdp_to_json(bundle.cmdp);
    if (bundle.reward_class) doc["reward_class"] = reward_class_to_json(*bundle.reward_class, bundle.reward_truth);
    if (bundle.dynamics_class)
        doc["dynamics_class"] = dynamics_class_to_json(*bundle.dynamics_class, bundle.dynamics_truth);
    return doc;
}

EnvBundle bundle_from_json(const json& doc) {
    EnvBundle bundle;
    bundle.cmdp = cmdp_from_json(doc);
    if (doc.contains("reward_class"))
        bundle.reward_class = reward_class_from_json(doc.at("reward_class"), &bundle.reward_truth);
    if (doc.contains("dynamics_class"))
        bundle.dynamics_class =
            dynamics_class_from_json(doc.at("dynamics_class"), bundle.cmdp.partition, &bundle.dynamics_truth);
    return bundle;
}

std::string_view to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::doubly_stochastic: return "doubly_stochastic";
        case EnvKind::lower_bound: return "lower_bound";
        case EnvKind::random_realizable: return "random_realizable";
    }
    return "unknown";
}

EnvKind env_kind_from_string(std::string_view name) {
    if (name == "doubly_stochastic") return EnvKind::doubly_stochastic;
    if (name == "lower_bound") return EnvKind::lower_bound;
    if (name == "random_realizable") return EnvKind::random_realizable;
    throw std::invalid_argument("unknown environment kind '" + std::string(name) + "'");
}

json gen_spec_to_json(const GenSpec& spec) {
    json doc{{"kind", to_string(spec.kind)},
             {"M", spec.M},
             {"H", spec.H},
             {"n_actions", spec.n_actions},
             {"n_contexts", spec.n_contexts},
             {"size_F", spec.size_F},
             {"size_Fp", spec.size_Fp},
             {"seed", spec.seed},
             {"reward_gap", spec.reward_gap},
             {"shared_dynamics", spec.shared_dynamics}};
    if (spec.p_min_target) doc["p_min_target"] = *spec.p_min_target;
    return doc;
}

GenSpec gen_spec_from_json(const json& doc) {
    GenSpec spec;
    spec.kind = env_kind_from_string(required<std::string>(doc, "kind"));
    spec.M = doc.value("M", spec.M);
    spec.H = doc.value("H", spec.H);
    spec.n_actions = doc.value("n_actions", spec.n_actions);
    spec.n_contexts = doc.value("n_contexts", spec.n_contexts);
    spec.size_F = doc.value("size_F", spec.size_F);
    spec.size_Fp = doc.value("size_Fp", spec.size_Fp);
    spec.seed = doc.value("seed", spec.seed);
    spec.reward_gap = doc.value("reward_gap", spec.reward_gap);
    spec.shared_dynamics = doc.value("shared_dynamics", spec.shared_dynamics);
    if (doc.contains("p_min_target") && !doc.at("p_min_target").is_null())
        spec.p_min_target = doc.at("p_min_target").get<double>();
    return spec;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(1) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace cmdp
