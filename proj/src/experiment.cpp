#include "gsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "gsched/config.hpp"
#include "gsched/errors.hpp"
#include "gsched/policy.hpp"

namespace fs = std::filesystem;

namespace gsched {

namespace {

constexpr std::uint64_t kTrafficStream = 1;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_mu(double mu) {
    std::ostringstream ss;
    ss << mu;
    return ss.str();
}

std::map<std::string, std::string> read_key_values(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& where) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(where + ": missing '" + key + "'");
    return it->second;
}

} // namespace

Instance make_instance(const GraphSpec& spec, double mu, int horizon, std::uint64_t base_seed, int index) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("traffic load must lie in (0, 1)");
    Instance inst;
    inst.config = spec.name();
    inst.mu = mu;
    inst.seed = derive_seed(base_seed, fnv1a(spec.name()), static_cast<std::uint64_t>(index));
    std::ostringstream name;
    name << spec.name() << "/mu_" << format_mu(mu) << "/instance_" << std::setw(3) << std::setfill('0') << index;
    inst.name = name.str();

    // Graph and traffic seeds ignore mu: the same index at another load sees
    // the same graph and link rates.
    Rng graph_rng(inst.seed);
    inst.graph = spec.sample(graph_rng);
    Rng traffic_rng(derive_seed(inst.seed, kTrafficStream));
    inst.trace = sample_traffic(inst.graph, horizon, mu * kMeanLinkRate, traffic_rng);
    return inst;
}

void write_trace_csv(std::ostream& os, const TrafficTrace& trace) {
    os << "# seed=" << trace.seed << '\n'
       << "# lambda=" << std::setprecision(17) << trace.arrival_rate << '\n'
       << "# horizon=" << trace.horizon << '\n'
       << "# nodes=" << trace.nodes << '\n'
       << "t,node,arrival,rate\n";
    for (int t = 0; t < trace.horizon; ++t) {
        const auto a = trace.arrivals_at(t);
        const auto r = trace.rates_at(t);
        for (int v = 0; v < trace.nodes; ++v) {
            os << t << ',' << v << ',' << a[static_cast<std::size_t>(v)] << ',' << r[static_cast<std::size_t>(v)] << '\n';
        }
    }
}

TrafficTrace read_trace_csv(std::istream& is) {
    TrafficTrace trace;
    std::map<std::string, std::string> meta;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::size_t cell = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        if (!header_seen) {
            if (line != "t,node,arrival,rate") throw std::runtime_error("trace csv: unexpected header");
            header_seen = true;
            trace.seed = std::stoull(require(meta, "seed", "trace csv"));
            trace.arrival_rate = std::stod(require(meta, "lambda", "trace csv"));
            trace.horizon = std::stoi(require(meta, "horizon", "trace csv"));
            trace.nodes = std::stoi(require(meta, "nodes", "trace csv"));
            const auto cells = static_cast<std::size_t>(trace.horizon) * static_cast<std::size_t>(trace.nodes);
            trace.arrivals.resize(cells);
            trace.rates.resize(cells);
            continue;
        }
        std::istringstream ls(line);
        long long t = 0, v = 0, a = 0, r = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ls >> t >> c1 >> v >> c2 >> a >> c3 >> r) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": malformed row");
        }
        const auto expected_t = static_cast<long long>(cell / static_cast<std::size_t>(std::max(trace.nodes, 1)));
        const auto expected_v = static_cast<long long>(cell % static_cast<std::size_t>(std::max(trace.nodes, 1)));
        if (cell >= trace.arrivals.size() || t != expected_t || v != expected_v) {
            throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": rows out of order");
        }
        trace.arrivals[cell] = a;
        trace.rates[cell] = r;
        ++cell;
    }
    if (!header_seen || cell != trace.arrivals.size()) throw std::runtime_error("trace csv: incomplete trace");
    return trace;
}

void save_instance(const std::string& dir, const Instance& inst) {
    fs::create_directories(dir);
    {
        std::ofstream os(fs::path(dir) / "graph.txt");
        write_edge_list(os, inst.graph);
    }
    {
        std::ofstream os(fs::path(dir) / "trace.csv");
        write_trace_csv(os, inst.trace);
    }
    std::ofstream os(fs::path(dir) / "meta.txt");
    os << "name=" << inst.name << '\n'
       << "config=" << inst.config << '\n'
       << "mu=" << std::setprecision(17) << inst.mu << '\n'
       << "lambda=" << inst.trace.arrival_rate << '\n'
       << "horizon=" << inst.trace.horizon << '\n'
       << "nodes=" << inst.graph.node_count() << '\n'
       << "edges=" << inst.graph.edge_count() << '\n'
       << "seed=" << inst.seed << '\n'
       << "checksum=" << inst.trace.checksum() << '\n';
    if (!os) throw std::runtime_error("failed writing instance " + dir);
}

Instance load_instance(const std::string& dir) {
    std::ifstream meta_is(fs::path(dir) / "meta.txt");
    if (!meta_is) throw std::runtime_error("missing meta.txt in " + dir);
    const auto meta = read_key_values(meta_is);
    Instance inst;
    inst.name = require(meta, "name", dir);
    inst.config = require(meta, "config", dir);
    inst.mu = std::stod(require(meta, "mu", dir));
    inst.seed = std::stoull(require(meta, "seed", dir));
    std::ifstream graph_is(fs::path(dir) / "graph.txt");
    if (!graph_is) throw std::runtime_error("missing graph.txt in " + dir);
    inst.graph = read_edge_list(graph_is);
    std::ifstream trace_is(fs::path(dir) / "trace.csv");
    if (!trace_is) throw std::runtime_error("missing trace.csv in " + dir);
    inst.trace = read_trace_csv(trace_is);
    if (inst.trace.nodes != inst.graph.node_count()) throw std::runtime_error(dir + ": trace and graph sizes differ");
    if (std::to_string(inst.trace.checksum()) != require(meta, "checksum", dir)) {
        throw std::runtime_error(dir + ": trace checksum mismatch");
    }
    return inst;
}

std::vector<std::string> find_instances(const std::string& root) {
    std::vector<std::string> out;
    if (!fs::exists(root)) throw std::runtime_error("instance directory does not exist: " + root);
    if (fs::exists(fs::path(root) / "meta.txt")) out.push_back(root);
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "meta.txt")) out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> generate_instances(const GenerateOptions& opts) {
    if (opts.instances < 1) throw ConfigError("instance count must be at least 1");
    if (opts.horizon < 1) throw ConfigError("horizon must be at least 1");
    if (opts.out_dir.empty()) throw ConfigError("output directory required");
    for (double mu : opts.mus) {
        if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("traffic loads must lie in (0, 1)");
    }
    GraphSpec spec;
    try {
        spec = GraphSpec::parse(opts.config);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::string> dirs;
    for (double mu : opts.mus) {
        for (int i = 0; i < opts.instances; ++i) {
            Instance inst = make_instance(spec, mu, opts.horizon, opts.seed, i);
            const std::string dir = (fs::path(opts.out_dir) / inst.name).string();
            save_instance(dir, inst);
            dirs.push_back(dir);
        }
    }
    return dirs;
}

namespace {

const std::set<std::string> kKnownPolicies = {"lgs", "greedy", "exact", "gcn"};

Policy build_policy(const std::string& name, const Instance& inst, const EvalOptions& opts,
                    const std::shared_ptr<const GcnParams>& params) {
    if (name == "lgs") return make_lgs_policy(opts.utility);
    if (name == "greedy") return make_greedy_policy(opts.utility);
    if (name == "exact") return make_exact_policy(opts.utility, opts.exact_cap);
    if (name == "gcn") {
        auto lap = std::make_shared<const LaplacianMatrix>(normalized_laplacian(inst.graph));
        return make_gcn_policy(params, lap, opts.utility);
    }
    throw ConfigError("unknown policy: " + name);
}

std::vector<std::string> policies_to_run(const EvalOptions& opts) {
    std::vector<std::string> names = opts.policies;
    names.push_back(opts.baseline);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

} // namespace

void validate_eval(const EvalOptions& opts, const std::vector<Instance>& instances) {
    if (opts.policies.empty()) throw ConfigError("no policies selected");
    for (const auto& name : policies_to_run(opts)) {
        if (!kKnownPolicies.contains(name)) throw ConfigError("unknown policy: " + name);
        if (name == "gcn") {
            if (!opts.checkpoint) throw ConfigError("the gcn policy requires --checkpoint");
            if (opts.checkpoint->params.input_dim() != 1) {
                throw ConfigError("checkpoint expects " + std::to_string(opts.checkpoint->params.input_dim()) +
                                  " input features; instances provide 1");
            }
        }
        if (name == "exact") {
            for (const auto& inst : instances) {
                if (inst.graph.node_count() > opts.exact_cap) {
                    throw ConfigError("exact policy limited to " + std::to_string(opts.exact_cap) + " nodes; " +
                                      inst.name + " has " + std::to_string(inst.graph.node_count()));
                }
            }
        }
    }
}

double safe_ratio(double numerator, double denominator) {
    if (numerator == 0.0 && denominator == 0.0) return 1.0;
    if (denominator == 0.0) return std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

EvaluationReport evaluate(const std::vector<Instance>& instances, const EvalOptions& opts) {
    validate_eval(opts, instances);
    std::shared_ptr<const GcnParams> params;
    if (opts.checkpoint) params = std::make_shared<const GcnParams>(opts.checkpoint->params);
    const auto names = policies_to_run(opts);

    EvaluationReport report;
    report.instances.resize(instances.size());
    auto evaluate_one = [&](std::size_t i) {
        const Instance& inst = instances[i];
        InstanceEvaluation& ev = report.instances[i];
        ev.instance = inst.name;
        ev.config = inst.config;
        ev.mu = inst.mu;
        ev.trace_checksum = inst.trace.checksum();
        ev.centralization = inst.graph.edge_count() > 0 ? centralization(inst.graph)
                                                        : std::numeric_limits<double>::quiet_NaN();
        for (const auto& name : names) {
            const Policy policy = build_policy(name, inst, opts, params);
            ev.metrics[name] = compute_metrics(run_episode(inst.graph, policy, inst.trace));
        }
        const MetricsBundle& base = ev.metrics.at(opts.baseline);
        for (const auto& name : opts.policies) {
            const MetricsBundle& m = ev.metrics.at(name);
            ev.ratios[name] = {safe_ratio(m.mean, base.mean), safe_ratio(m.median, base.median),
                               safe_ratio(m.p95, base.p95)};
        }
    };

    unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads) : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(instances.size(), 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < instances.size(); ++i) evaluate_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> workers;
            for (unsigned w = 0; w < threads; ++w) {
                workers.emplace_back([&] {
                    for (std::size_t i = next++; i < instances.size(); i = next++) {
                        try {
                            evaluate_one(i);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    report.summary = summarize(report.instances);
    return report;
}

std::vector<SummaryRow> summarize(const std::vector<InstanceEvaluation>& evals) {
    struct Group {
        std::vector<double> mean, median, p95;
        double centralization_sum = 0.0;
        int centralization_count = 0;
    };
    std::map<std::tuple<std::string, double, std::string>, Group> groups;
    for (const auto& ev : evals) {
        for (const auto& [policy, ar] : ev.ratios) {
            Group& g = groups[{ev.config, ev.mu, policy}];
            g.mean.push_back(ar.mean);
            g.median.push_back(ar.median);
            g.p95.push_back(ar.p95);
            if (std::isfinite(ev.centralization)) {
                g.centralization_sum += ev.centralization;
                ++g.centralization_count;
            }
        }
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, g] : groups) {
        const auto& [config, mu, policy] = key;
        const double cent = g.centralization_count > 0 ? g.centralization_sum / g.centralization_count
                                                       : std::numeric_limits<double>::quiet_NaN();
        for (const auto& [metric, values] : {std::pair{"mean", &g.mean}, std::pair{"median", &g.median},
                                             std::pair{"p95", &g.p95}}) {
            SummaryRow row;
            row.config = config;
            row.mu = mu;
            row.policy = policy;
            row.metric = metric;
            row.centralization = cent;
            row.count = static_cast<int>(values->size());
            double sum = 0.0;
            for (double v : *values) sum += v;
            row.mean = sum / static_cast<double>(values->size());
            row.q1 = percentile(*values, 0.25);
            row.median = percentile(*values, 0.5);
            row.q3 = percentile(*values, 0.75);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_metrics_csv(std::ostream& os, const EvaluationReport& report) {
    os << "instance,policy,mean,median,p95,objective,rounds_mean\n" << std::setprecision(10);
    for (const auto& ev : report.instances) {
        for (const auto& [policy, m] : ev.metrics) {
            os << ev.instance << ',' << policy << ',' << m.mean << ',' << m.median << ',' << m.p95 << ','
               << m.objective << ',' << m.rounds_mean << '\n';
        }
    }
}

void write_ratios_csv(std::ostream& os, const EvaluationReport& report) {
    os << "instance,config,mu,centralization,policy,ar_mean,ar_median,ar_p95,trace_checksum\n"
       << std::setprecision(12);
    for (const auto& ev : report.instances) {
        for (const auto& [policy, ar] : ev.ratios) {
            os << ev.instance << ',' << ev.config << ',' << ev.mu << ',' << ev.centralization << ',' << policy << ','
               << ar.mean << ',' << ar.median << ',' << ar.p95 << ',' << ev.trace_checksum << '\n';
        }
    }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "config,mu,policy,metric,centralization,count,ar_mean,ar_q1,ar_median,ar_q3\n" << std::setprecision(6);
    for (const auto& r : rows) {
        os << r.config << ',' << r.mu << ',' << r.policy << ',' << r.metric << ',' << r.centralization << ','
           << r.count << ',' << r.mean << ',' << r.q1 << ',' << r.median << ',' << r.q3 << '\n';
    }
}

std::vector<InstanceEvaluation> read_ratios_csv(std::istream& is) {
    std::vector<InstanceEvaluation> out;
    std::map<std::string, std::size_t> index;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        const auto cols = split_list(line);
        if (cols.size() != 9) throw std::runtime_error("ratios csv line " + std::to_string(line_no) + ": expected 9 columns");
        auto [it, inserted] = index.try_emplace(cols[0], out.size());
        if (inserted) {
            InstanceEvaluation ev;
            ev.instance = cols[0];
            ev.config = cols[1];
            ev.mu = std::stod(cols[2]);
            ev.centralization = std::stod(cols[3]);
            ev.trace_checksum = std::stoull(cols[8]);
            out.push_back(std::move(ev));
        }
        out[it->second].ratios[cols[4]] = {std::stod(cols[5]), std::stod(cols[6]), std::stod(cols[7])};
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const EpisodeResult& result) {
    os << "t,node,q,scheduled\n";
    for (std::size_t t = 0; t < result.queues.size(); ++t) {
        std::vector<char> on(static_cast<std::size_t>(result.nodes), 0);
        if (t < result.schedules.size()) {
            for (NodeId v : result.schedules[t].nodes) on[static_cast<std::size_t>(v)] = 1;
        }
        for (int v = 0; v < result.nodes; ++v) {
            os << t << ',' << v << ',' << result.queues[t][static_cast<std::size_t>(v)] << ','
               << static_cast<int>(on[static_cast<std::size_t>(v)]) << '\n';
        }
    }
}

namespace {

ToyRun toy_run(const ConflictGraph& g, const std::function<Schedule(const ConflictGraph&, std::span<const double>)>& solver,
               int horizon, int burn_in) {
    const Policy policy = [&solver](const ConflictGraph& graph, std::span<const std::int64_t> q,
                                    std::span<const std::int64_t>) {
        const UtilityVector u(q.begin(), q.end());
        return solver(graph, u);
    };
    const EpisodeResult result = run_episode(g, policy, constant_traffic(g.node_count(), horizon, 1, 2));

    ToyRun run;
    run.steady_state_backlog = compute_metrics(result, burn_in, horizon).mean;
    // Shortest period p with q(T-1) == q(T-1-p).
    const int last = horizon - 1;
    for (int p = 1; last - p >= burn_in; ++p) {
        if (result.queues[static_cast<std::size_t>(last)] == result.queues[static_cast<std::size_t>(last - p)]) {
            for (int t = last - p + 1; t <= last; ++t) {
                run.cycle.push_back(result.queues[static_cast<std::size_t>(t)]);
                run.cycle_schedules.push_back(result.schedules[static_cast<std::size_t>(t)].nodes);
            }
            break;
        }
    }
    return run;
}

void print_run(std::ostream& os, const char* label, const ToyRun& run) {
    os << label << " steady-state average backlog: " << std::fixed << std::setprecision(4) << run.steady_state_backlog
       << '\n';
    os.unsetf(std::ios::floatfield);
    for (std::size_t i = 0; i < run.cycle.size(); ++i) {
        os << "  state q = [";
        for (std::size_t v = 0; v < run.cycle[i].size(); ++v) os << (v ? " " : "") << run.cycle[i][v];
        os << "]  scheduled = {";
        for (std::size_t k = 0; k < run.cycle_schedules[i].size(); ++k) os << (k ? "," : "") << run.cycle_schedules[i][k];
        os << "}\n";
    }
}

} // namespace

ToyReport run_toy(int horizon, int burn_in) {
    if (horizon <= burn_in || burn_in < 0) throw std::invalid_argument("toy horizon must exceed the burn-in");
    const ConflictGraph star = generate_star(5);
    ToyReport report;
    report.exact = toy_run(star, [](const ConflictGraph& g, std::span<const double> u) { return exact_mwis(g, u); },
                           horizon, burn_in);
    report.greedy = toy_run(
        star, [](const ConflictGraph& g, std::span<const double> u) { return greedy_centralized(g, u); }, horizon,
        burn_in);
    return report;
}

void print_toy(std::ostream& os, const ToyReport& report) {
    os << "six-link star, a(t) = 1, r(t) = 2, utility = queue length\n";
    print_run(os, "exact MWIS", report.exact);
    print_run(os, "greedy", report.greedy);
}

} // namespace gsched
