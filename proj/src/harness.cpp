#include "cmdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cmdp/learners.hpp"
#include "cmdp/mdp.hpp"

namespace cmdp {

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::rm_kd: return "rm_kd";
        case Algorithm::rm_ucid: return "rm_ucid";
        case Algorithm::rm_ucdd: return "rm_ucdd";
        case Algorithm::uniform_random: return "uniform_random";
        case Algorithm::greedy_no_bonus: return "greedy_no_bonus";
    }
    return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
    for (auto a : {Algorithm::rm_kd, Algorithm::rm_ucid, Algorithm::rm_ucdd, Algorithm::uniform_random,
                   Algorithm::greedy_no_bonus})
        if (to_string(a) == name) return a;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    if (!doc.contains("env")) throw std::invalid_argument("config: missing key 'env'");
    const auto& env = doc.at("env");
    if (env.is_string()) {
        std::filesystem::path p = env.get<std::string>();
        config.env = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (env.is_object()) {
        config.env = gen_spec_from_json(env);
    } else {
        throw std::invalid_argument("config: 'env' must be a generator spec or a file path");
    }
    if (!doc.contains("algorithm")) throw std::invalid_argument("config: missing key 'algorithm'");
    config.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
    if (!doc.contains("T")) throw std::invalid_argument("config: missing key 'T'");
    config.T = doc.at("T").get<std::size_t>();
    config.delta = doc.value("delta", config.delta);
    if (doc.contains("p_min_declared") && !doc.at("p_min_declared").is_null()) {
        const auto& p = doc.at("p_min_declared");
        if (p.is_string()) {
            if (p.get<std::string>() != "exact")
                throw std::invalid_argument("config: p_min_declared must be a number or \"exact\"");
            config.p_min_exact = true;
        } else {
            config.p_min_declared = p.get<double>();
        }
    }
    config.bonus_scale = doc.value("bonus_scale", config.bonus_scale);
    if (doc.contains("seeds")) config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("output")) {
        std::filesystem::path out = doc.at("output").get<std::string>();
        config.output = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    }
    config.memoize = doc.value("memoize", config.memoize);
    config.diagnostics = doc.value("diagnostics", config.diagnostics);
    return config;
}

json config_to_json(const ExperimentConfig& config) {
    json doc;
    if (const auto* spec = std::get_if<GenSpec>(&config.env))
        doc["env"] = gen_spec_to_json(*spec);
    else
        doc["env"] = std::get<std::filesystem::path>(config.env).string();
    doc["algorithm"] = to_string(config.algorithm);
    doc["T"] = config.T;
    doc["delta"] = config.delta;
    if (config.p_min_exact)
        doc["p_min_declared"] = "exact";
    else if (config.p_min_declared)
        doc["p_min_declared"] = *config.p_min_declared;
    doc["bonus_scale"] = config.bonus_scale;
    doc["seeds"] = config.seeds;
    doc["output"] = config.output.string();
    doc["memoize"] = config.memoize;
    doc["diagnostics"] = config.diagnostics;
    return doc;
}

EnvBundle load_environment(const ExperimentConfig& config) {
    if (const auto* spec = std::get_if<GenSpec>(&config.env)) return generate(*spec);
    return bundle_from_json(read_json_file(std::get<std::filesystem::path>(config.env)));
}

std::size_t configured_threads() {
    std::size_t n = 0;
    if (const char* raw = std::getenv("CMDP_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(raw, &end, 10);
        if (end != raw && v > 0) n = static_cast<std::size_t>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

namespace {

struct Prepared {
    const EnvBundle* env = nullptr;
    std::vector<PlanResult> optimal;  // per context
    std::optional<LearnerKind> learner_kind;
    double bonus_scale = 1.0;
    std::optional<double> p_min;        // handed to ucid / ucdd
    double potential_p_min = 1.0;       // used in the potential bound
    std::vector<double> context_cdf;
};

bool is_psi(Algorithm a) { return a == Algorithm::rm_ucid || a == Algorithm::rm_ucdd; }

Prepared prepare(const ExperimentConfig& config, const EnvBundle& env) {
    const auto& cmdp = env.cmdp;
    const auto report = validate_cmdp(cmdp);
    if (!report.ok()) throw std::invalid_argument("invalid instance: " + report.violations.front());
    if (config.T <= cmdp.n_actions)
        throw std::invalid_argument("T must exceed the number of actions (initialization rounds)");
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(config.bonus_scale >= 0.0)) throw std::invalid_argument("bonus_scale must be nonnegative");
    if (config.seeds.empty()) throw std::invalid_argument("at least one seed is required");

    Prepared p;
    p.env = &env;
    for (ContextIndex c = 0; c < cmdp.n_contexts(); ++c)
        p.optimal.push_back(plan(cmdp.dynamics_of(c), cmdp.rewards_of(c), cmdp.partition));
    double acc = 0.0;
    for (double w : cmdp.context_dist) p.context_cdf.push_back(acc += w);

    switch (config.algorithm) {
        case Algorithm::rm_kd: p.learner_kind = LearnerKind::rm_kd; break;
        case Algorithm::greedy_no_bonus: p.learner_kind = LearnerKind::rm_kd; break;
        case Algorithm::rm_ucid: p.learner_kind = LearnerKind::rm_ucid; break;
        case Algorithm::rm_ucdd: p.learner_kind = LearnerKind::rm_ucdd; break;
        case Algorithm::uniform_random: break;
    }
    p.bonus_scale = config.algorithm == Algorithm::greedy_no_bonus ? 0.0 : config.bonus_scale;
    if (p.learner_kind && !env.reward_class)
        throw std::invalid_argument(std::string(to_string(config.algorithm)) + " needs a reward class");
    if (config.algorithm == Algorithm::rm_ucid && !cmdp.has_shared_dynamics())
        throw std::invalid_argument("rm_ucid needs context-independent dynamics");
    if (config.algorithm == Algorithm::rm_ucdd && !env.dynamics_class)
        throw std::invalid_argument("rm_ucdd needs a dynamics class");
    if (is_psi(config.algorithm)) {
        if (config.p_min_exact)
            p.p_min = min_reach_probability(cmdp);
        else if (config.p_min_declared)
            p.p_min = *config.p_min_declared;
        else
            throw std::invalid_argument(std::string(to_string(config.algorithm)) + " needs p_min_declared");
        p.potential_p_min = *p.p_min;
    } else {
        p.potential_p_min = min_reach_probability(cmdp);
    }
    return p;
}

ContextIndex draw_context(const Prepared& p, std::uint64_t seed, std::size_t t) {
    auto rng = stream_rng(seed, streams::context, t);
    const double u = uniform01(rng) * p.context_cdf.back();
    const auto it = std::upper_bound(p.context_cdf.begin(), p.context_cdf.end(), u);
    auto c = static_cast<ContextIndex>(it - p.context_cdf.begin());
    c = std::min(c, p.context_cdf.size() - 1);
    while (c > 0 && p.env->cmdp.context_dist[c] <= 0.0) --c;  // tail rounding onto a zero-mass context
    return c;
}

/// Empirical row as seen by the optimistic planner: zero rows are uniform over the successor layer.
double l1_to_truth(const TabularDynamics& p_bar, const TabularDynamics& truth, const LayerPartition& partition,
                   State s, Action a) {
    const auto row = p_bar.row(s, a);
    const auto succ = partition.successors(s);
    double mass = 0.0;
    for (State next : succ) mass += row[next];
    double dist = 0.0;
    for (State next : succ) {
        const double base = mass > 0.0 ? row[next] : 1.0 / static_cast<double>(succ.size());
        dist += std::abs(base - truth(s, a, next));
    }
    return dist;
}

struct SeedResult {
    std::vector<RegretRow> rows;
    SeedSummary summary;
};

SeedResult run_seed(const ExperimentConfig& config, const Prepared& p, std::uint64_t seed) {
    const auto& env = *p.env;
    const auto& cmdp = env.cmdp;
    const auto& partition = cmdp.partition;
    const std::size_t n_actions = cmdp.n_actions;

    std::unique_ptr<Learner> learner;
    if (p.learner_kind) {
        LearnerInputs in;
        in.partition = partition;
        in.n_actions = n_actions;
        in.n_contexts = cmdp.n_contexts();
        in.reward_class = *env.reward_class;
        if (*p.learner_kind == LearnerKind::rm_kd) in.known_dynamics = cmdp.dynamics;
        if (*p.learner_kind == LearnerKind::rm_ucdd) in.dynamics_class = *env.dynamics_class;
        in.p_min = p.p_min;
        LearnerOptions opt;
        opt.delta = config.delta;
        opt.T = config.T;
        opt.bonus_scale = p.bonus_scale;
        opt.memoize = config.memoize;
        learner = make_learner(*p.learner_kind, std::move(in), std::move(opt));
    }

    SeedResult out;
    out.rows.reserve(config.T);
    auto& sum = out.summary;
    sum.seed = seed;
    const bool diag = config.diagnostics && learner;
    if (diag) {
        const double S = static_cast<double>(cmdp.n_states);
        const double A = static_cast<double>(n_actions);
        sum.potential_bound =
            (S * A / p.potential_p_min) * (1.0 + std::log(static_cast<double>(config.T) / A));
    }

    double cum = 0.0;
    for (std::size_t t = 1; t <= config.T; ++t) {
        const ContextIndex c = draw_context(p, seed, t);
        RegretRow row;
        row.seed = seed;
        row.t = t;
        row.context = cmdp.context_ids[c];

        DeterministicPolicy policy;
        std::optional<RoundDecision> decision;
        if (learner) {
            decision = learner->act(c);
            policy = decision->policy;
            row.beta = decision->beta;
            row.gamma = decision->gamma;
            if (!decision->initialization) row.optimistic_value = decision->optimistic_value;
            if (decision->xi) {
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (State s = 0; s < cmdp.n_states; ++s) {
                    if (partition.is_final(s)) continue;
                    for (Action a = 0; a < n_actions; ++a) {
                        lo = std::min(lo, (*decision->xi)(s, a));
                        hi = std::max(hi, (*decision->xi)(s, a));
                    }
                }
                row.xi_min = lo;
                row.xi_max = hi;
            }
        } else {
            auto rng = stream_rng(seed, streams::baseline_policy, t);
            std::uniform_int_distribution<std::size_t> pick(0, n_actions - 1);
            policy.action_of.resize(cmdp.n_states);
            for (State s = 0; s < cmdp.n_states; ++s) policy.action_of[s] = pick(rng);
        }
        row.policy_hash = policy.hash();

        // Optimism check on the played context.
        if (diag && decision && decision->p_bar && decision->xi && !decision->initialization) {
            const auto& truth = cmdp.dynamics_of(c);
            bool event = true;
            for (State s = 0; s < cmdp.n_states && event; ++s) {
                if (partition.is_final(s)) continue;
                for (Action a = 0; a < n_actions && event; ++a)
                    event = l1_to_truth(*decision->p_bar, truth, partition, s, a) <= (*decision->xi)(s, a);
            }
            ++sum.optimism_checked_rounds;
            if (event) {
                ++sum.optimism_event_rounds;
                const double comparator = value_of_policy(p.optimal[c].policy, truth, decision->r_hat, partition);
                if (!(decision->optimistic_value >= comparator - 1e-9)) ++sum.optimism_violations;
            }
        }

        if (diag && t > n_actions) {
            double potential = 0.0;
            for (ContextIndex ctx = 0; ctx < cmdp.n_contexts(); ++ctx)
                if (cmdp.context_dist[ctx] > 0.0)
                    potential += cmdp.context_dist[ctx] * learner->potential_term(ctx, t);
            row.potential = potential;
            sum.potential_sum += potential;
        }

        auto transition_rng = stream_rng(seed, streams::transition, t);
        auto reward_rng = stream_rng(seed, streams::reward, t);
        const auto traj = sample_trajectory(cmdp, c, policy, transition_rng, reward_rng);
        row.realized_return = traj.total_reward();

        if (learner) {
            learner->observe(traj);
            if (config.diagnostics) {
                if (env.reward_truth) {
                    const auto& cls = learner->reward_class();
                    ++sum.lsr_checks;
                    if (!(cls.sse(cls.fit()) <= cls.sse(*env.reward_truth) + 1e-9)) ++sum.lsr_violations;
                }
                const auto& dcls = learner->dynamics_class();
                if (dcls && env.dynamics_truth) {
                    ++sum.lsr_checks;
                    if (!(dcls->sse(dcls->fit()) <= dcls->sse(*env.dynamics_truth) + 1e-9)) ++sum.lsr_violations;
                }
            }
        }

        row.v_star = p.optimal[c].value;
        row.v_pi = value_of_policy(policy, cmdp.dynamics_of(c), cmdp.rewards_of(c), partition);
        row.inst_regret = row.v_star - row.v_pi;
        cum += row.inst_regret;
        row.cum_regret = cum;
        if (t <= n_actions) sum.initialization_regret += row.inst_regret;
        out.rows.push_back(std::move(row));
    }
    sum.cumulative_regret = cum;
    return out;
}

}  // namespace

RegretLog run_experiment(const ExperimentConfig& config) {
    const auto env = load_environment(config);
    return run_experiment(config, env);
}

RegretLog run_experiment(const ExperimentConfig& config, const EnvBundle& env) {
    const auto prepared = prepare(config, env);
    const std::size_t n = config.seeds.size();
    std::vector<SeedResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                results[i] = run_seed(config, prepared, config.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min(configured_threads(), n);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RegretLog log;
    for (auto& r : results) {
        log.rows.insert(log.rows.end(), std::make_move_iterator(r.rows.begin()),
                        std::make_move_iterator(r.rows.end()));
        log.seeds.push_back(r.summary);
    }
    return log;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_csv(const RegretLog& log, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << kCsvHeader << '\n';
    for (const auto& r : log.rows) {
        out << r.seed << ',' << r.t << ',' << r.context << ',' << fmt(r.v_star) << ',' << fmt(r.v_pi) << ','
            << fmt(r.inst_regret) << ',' << fmt(r.cum_regret) << ',' << fmt(r.realized_return) << ',' << fmt(r.beta)
            << ',' << fmt(r.gamma) << ',' << fmt(r.potential) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_diagnostics_csv(const RegretLog& log, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "seed,t,context,policy_hash,optimistic_value,v_pi,xi_min,xi_max\n";
    for (const auto& r : log.rows) {
        out << r.seed << ',' << r.t << ',' << r.context << ',' << r.policy_hash << ',' << fmt(r.optimistic_value)
            << ',' << fmt(r.v_pi) << ',' << fmt(r.xi_min) << ',' << fmt(r.xi_max) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<RegretRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::invalid_argument(path.string() + ": unexpected header");
    std::vector<RegretRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 11) throw std::invalid_argument(path.string() + ": malformed row '" + line + "'");
        auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<double>(std::stod(s)); };
        RegretRow r;
        r.seed = std::stoull(cells[0]);
        r.t = std::stoull(cells[1]);
        r.context = std::stoll(cells[2]);
        r.v_star = std::stod(cells[3]);
        r.v_pi = std::stod(cells[4]);
        r.inst_regret = std::stod(cells[5]);
        r.cum_regret = std::stod(cells[6]);
        r.realized_return = std::stod(cells[7]);
        r.beta = opt(cells[8]);
        r.gamma = opt(cells[9]);
        r.potential = opt(cells[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace cmdp
