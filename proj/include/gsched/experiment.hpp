#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsched/gcn.hpp"
#include "gsched/graph.hpp"
#include "gsched/sim.hpp"

namespace gsched {

// ---------------------------------------------------------------------------
// Scheduling instances: one conflict graph plus one traffic trace, persisted
// as a directory so every policy replays identical randomness.
//
//   <dir>/graph.txt   edge list
//   <dir>/trace.csv   '# key=value' metadata lines, then t,node,arrival,rate
//   <dir>/meta.txt    key=value: config, mu, lambda, horizon, nodes, seed, checksum
// ---------------------------------------------------------------------------

struct Instance {
    std::string name;
    std::string config;
    double mu = 0.0;
    std::uint64_t seed = 0;
    ConflictGraph graph;
    TrafficTrace trace;
};

inline constexpr double kMeanLinkRate = 50.0;

/// Samples instance `index` of a configuration; a pure function of its arguments.
Instance make_instance(const GraphSpec& spec, double mu, int horizon, std::uint64_t base_seed, int index);

void write_trace_csv(std::ostream& os, const TrafficTrace& trace);
TrafficTrace read_trace_csv(std::istream& is);

void save_instance(const std::string& dir, const Instance& inst);
Instance load_instance(const std::string& dir);

/// All instance directories below `root` (those holding meta.txt), sorted by path.
std::vector<std::string> find_instances(const std::string& root);

struct GenerateOptions {
    std::string config = "Star30";
    std::vector<double> mus = {0.07};
    int instances = 100;
    int horizon = 64;
    std::uint64_t seed = 0;
    std::string out_dir;
};

/// Writes <out>/<config>/mu_<mu>/instance_<i>/ for every mu and index; returns the directories.
std::vector<std::string> generate_instances(const GenerateOptions& opts);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Policy names: lgs | greedy | exact | gcn
struct EvalOptions {
    std::vector<std::string> policies = {"lgs", "gcn"};
    std::string baseline = "lgs";
    std::optional<Checkpoint> checkpoint;
    UtilityKind utility = UtilityKind::product;
    int exact_cap = 40;
    int threads = 0;  // 0: hardware concurrency
};

struct ApproximationRatios {
    double mean = 1.0;
    double median = 1.0;
    double p95 = 1.0;
};

struct InstanceEvaluation {
    std::string instance;
    std::string config;
    double mu = 0.0;
    double centralization = 0.0;  // NaN on edgeless graphs
    std::uint64_t trace_checksum = 0;
    std::map<std::string, MetricsBundle> metrics;
    std::map<std::string, ApproximationRatios> ratios;  // policy / baseline
};

struct SummaryRow {
    std::string config;
    double mu = 0.0;
    std::string policy;
    std::string metric;  // mean | median | p95
    double centralization = 0.0;
    int count = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct EvaluationReport {
    std::vector<InstanceEvaluation> instances;
    std::vector<SummaryRow> summary;
};

/// Throws ConfigError for unknown policies, a GCN policy without checkpoint,
/// or exact MWIS on instances above its node cap.
void validate_eval(const EvalOptions& opts, const std::vector<Instance>& instances);

/// metric ratio with 0/0 = 1
double safe_ratio(double numerator, double denominator);

EvaluationReport evaluate(const std::vector<Instance>& instances, const EvalOptions& opts);
std::vector<SummaryRow> summarize(const std::vector<InstanceEvaluation>& evals);

// CSV writers. per-instance schema: instance,policy,mean,median,p95,objective,rounds_mean
void write_metrics_csv(std::ostream& os, const EvaluationReport& report);
void write_ratios_csv(std::ostream& os, const EvaluationReport& report);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<InstanceEvaluation> read_ratios_csv(std::istream& is);

/// Trajectory schema: t,node,q,scheduled
void write_trajectory_csv(std::ostream& os, const EpisodeResult& result);

// ---------------------------------------------------------------------------
// Six-link star toy: a(t) = 1, r(t) = 2, utility = queue length.
// ---------------------------------------------------------------------------

struct ToyRun {
    double steady_state_backlog = 0.0;     // mean over q(burn_in) .. q(T-1)
    std::vector<QueueVector> cycle;        // distinct states of the final period
    std::vector<std::vector<NodeId>> cycle_schedules;
};

struct ToyReport {
    ToyRun exact;
    ToyRun greedy;
};

inline constexpr int kToyHorizon = 128;
inline constexpr int kToyBurnIn = 20;

ToyReport run_toy(int horizon = kToyHorizon, int burn_in = kToyBurnIn);
void print_toy(std::ostream& os, const ToyReport& report);

} // namespace gsched
