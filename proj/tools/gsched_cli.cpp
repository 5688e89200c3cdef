// gsched: instance generation, training, evaluation and the star toy.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsched/config.hpp"
#include "gsched/errors.hpp"
#include "gsched/experiment.hpp"
#include "gsched/policy.hpp"
#include "gsched/train.hpp"

namespace fs = std::filesystem;
using namespace gsched;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

int run_generate(const std::string& config, const std::string& mus, int instances, int horizon, std::uint64_t seed,
                 const std::string& out) {
    GenerateOptions opts;
    opts.config = config;
    opts.mus = parse_double_list(mus);
    opts.instances = instances;
    opts.horizon = horizon;
    opts.seed = seed;
    opts.out_dir = out;
    const auto dirs = generate_instances(opts);
    std::cout << "wrote " << dirs.size() << " instances under " << out << '\n';
    return 0;
}

int run_train(const std::string& config_path, int episodes, std::int64_t seed, const std::string& out) {
    TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
    if (episodes >= 0) config.episodes = episodes;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    fs::create_directories(out);
    if (config.checkpoint_dir.empty()) config.checkpoint_dir = out;
    config.validate();
    {
        auto os = open_out(fs::path(out) / "train_config.cfg");
        write_train_config(os, config);
    }

    const TrainResult result = train(config);
    save_checkpoint_file((fs::path(out) / "checkpoint.ckpt").string(), Checkpoint{result.params, config.adam});
    auto log = open_out(fs::path(out) / "train_log.csv");
    write_train_log(log, result.log);
    std::cout << "trained " << config.episodes << " episodes; checkpoint at " << (fs::path(out) / "checkpoint.ckpt")
              << '\n';
    return 0;
}

int run_eval(const std::string& in, const std::string& policies, const std::string& baseline,
             const std::string& checkpoint, const std::string& utility, int threads, bool trajectories,
             const std::string& out) {
    EvalOptions opts;
    opts.policies = split_list(policies);
    opts.baseline = baseline;
    opts.utility = parse_utility_kind(utility);
    opts.threads = threads;
    if (!checkpoint.empty()) opts.checkpoint = load_checkpoint_file(checkpoint);

    std::vector<Instance> instances;
    for (const auto& dir : find_instances(in)) instances.push_back(load_instance(dir));
    if (instances.empty()) throw ConfigError("no instances found under " + in);

    const EvaluationReport report = evaluate(instances, opts);
    fs::create_directories(out);
    {
        auto os = open_out(fs::path(out) / "per_instance.csv");
        write_metrics_csv(os, report);
    }
    {
        auto os = open_out(fs::path(out) / "ratios.csv");
        write_ratios_csv(os, report);
    }
    {
        auto os = open_out(fs::path(out) / "summary.csv");
        write_summary_csv(os, report.summary);
    }
    if (trajectories) {
        std::shared_ptr<const GcnParams> params;
        if (opts.checkpoint) params = std::make_shared<const GcnParams>(opts.checkpoint->params);
        for (const auto& inst : instances) {
            for (const auto& name : opts.policies) {
                Policy policy;
                if (name == "gcn") {
                    auto lap = std::make_shared<const LaplacianMatrix>(normalized_laplacian(inst.graph));
                    policy = make_gcn_policy(params, lap, opts.utility);
                } else if (name == "greedy") {
                    policy = make_greedy_policy(opts.utility);
                } else if (name == "exact") {
                    policy = make_exact_policy(opts.utility, opts.exact_cap);
                } else {
                    policy = make_lgs_policy(opts.utility);
                }
                const fs::path dir = fs::path(out) / "trajectories" / inst.name;
                fs::create_directories(dir);
                auto os = open_out(dir / (name + ".csv"));
                write_trajectory_csv(os, run_episode(inst.graph, policy, inst.trace));
            }
        }
    }
    write_summary_csv(std::cout, report.summary);
    return 0;
}

int run_report(const std::string& in, const std::string& out) {
    std::ifstream is(fs::path(in) / "ratios.csv");
    if (!is) throw std::runtime_error("no ratios.csv in " + in);
    const auto rows = summarize(read_ratios_csv(is));
    write_summary_csv(std::cout, rows);
    if (!out.empty()) {
        auto os = open_out(out);
        write_summary_csv(os, rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GCN-augmented distributed link scheduling workbench"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Write scheduling instances (graph + traffic trace)");
    std::string gen_config = "Star30";
    std::string gen_mu = "0.07";
    int gen_instances = 100;
    int gen_horizon = 64;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "instances";
    gen->add_option("--config", gen_config, "Graph configuration: StarX, BA-mX, BA-mix, ER, Tree")->capture_default_str();
    gen->add_option("--mu", gen_mu, "Comma-separated traffic loads")->capture_default_str();
    gen->add_option("--instances", gen_instances, "Instances per load")->capture_default_str();
    gen->add_option("--horizon", gen_horizon, "Slots per instance")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Base seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->capture_default_str();

    auto* tr = app.add_subcommand("train", "Train GCN parameters with lookahead rewards");
    std::string tr_config;
    int tr_episodes = -1;
    std::int64_t tr_seed = -1;
    std::string tr_out = "train_out";
    tr->add_option("--config", tr_config, "Training config file (defaults to the built-in curriculum)");
    tr->add_option("--episodes", tr_episodes, "Override episode count");
    tr->add_option("--seed", tr_seed, "Override seed");
    tr->add_option("--out", tr_out, "Output directory")->capture_default_str();

    auto* ev = app.add_subcommand("eval", "Evaluate policies on stored instances");
    std::string ev_in = "instances";
    std::string ev_policies = "lgs,gcn";
    std::string ev_baseline = "lgs";
    std::string ev_checkpoint;
    std::string ev_utility = "product";
    int ev_threads = 0;
    bool ev_traj = false;
    std::string ev_out = "eval_out";
    ev->add_option("--in", ev_in, "Instance root directory")->capture_default_str();
    ev->add_option("--policies", ev_policies, "Comma-separated: lgs, greedy, exact, gcn")->capture_default_str();
    ev->add_option("--baseline", ev_baseline, "Reference policy for approximation ratios")->capture_default_str();
    ev->add_option("--checkpoint", ev_checkpoint, "GCN checkpoint (required for gcn)");
    ev->add_option("--utility", ev_utility, "Baseline utility: product or min")->capture_default_str();
    ev->add_option("--threads", ev_threads, "Worker threads (0 = all cores)");
    ev->add_flag("--trajectories", ev_traj, "Also write t,node,q,scheduled CSVs");
    ev->add_option("--out", ev_out, "Output directory")->capture_default_str();

    app.add_subcommand("toy", "Six-link star example under exact MWIS and greedy scheduling");

    auto* rep = app.add_subcommand("report", "Re-aggregate an evaluation's ratios.csv");
    std::string rep_in = "eval_out";
    std::string rep_out;
    rep->add_option("--in", rep_in, "Evaluation output directory")->capture_default_str();
    rep->add_option("--out", rep_out, "Also write the summary CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_generate(gen_config, gen_mu, gen_instances, gen_horizon, gen_seed, gen_out);
        if (tr->parsed()) return run_train(tr_config, tr_episodes, tr_seed, tr_out);
        if (ev->parsed()) {
            return run_eval(ev_in, ev_policies, ev_baseline, ev_checkpoint, ev_utility, ev_threads, ev_traj, ev_out);
        }
        if (rep->parsed()) return run_report(rep_in, rep_out);
        print_toy(std::cout, run_toy());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "gsched: error: " << e.what() << '\n';
        return 1;
    }
}
