#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gsched/graph.hpp"
#include "gsched/rng.hpp"
#include "gsched/solvers.hpp"

namespace gsched {

using QueueVector = std::vector<std::int64_t>;

struct NetworkState {
    QueueVector q;  // packets queued per link
    QueueVector r;  // packets the link can send this slot
    int t = 0;
};

/// Per-slot arrivals and link rates for every node, stored row-major (slot, node).
struct TrafficTrace {
    int horizon = 0;
    int nodes = 0;
    std::vector<std::int64_t> arrivals;
    std::vector<std::int64_t> rates;
    std::uint64_t seed = 0;
    double arrival_rate = 0.0;

    std::span<const std::int64_t> arrivals_at(int t) const;
    std::span<const std::int64_t> rates_at(int t) const;

    /// Slots [first, first + length) as a standalone trace.
    TrafficTrace segment(int first, int length) const;

    /// FNV-1a over dimensions, arrivals and rates.
    std::uint64_t checksum() const;

    bool operator==(const TrafficTrace&) const = default;
};

struct RateModel {
    double mean = 50.0;
    double stddev = 25.0;  // clipped to [0, 100] then rounded
};

/// Poisson(lambda) arrivals and clipped-normal rates, i.i.d. per (slot, node).
/// Arrivals and rates come from separate child streams, so traces drawn from
/// the same seed at different lambda share their rate realizations.
TrafficTrace sample_traffic(const ConflictGraph& g, int horizon, double lambda, Rng& rng, const RateModel& rates = {});

/// Same shape, constant a(t) and r(t) everywhere.
TrafficTrace constant_traffic(int nodes, int horizon, std::int64_t arrival, std::int64_t rate);

/// Queue update for one slot. Scheduled links send min(r, q) packets using the
/// rate active when the schedule was chosen; all links then add their arrivals.
NetworkState step(const ConflictGraph& g, const NetworkState& state, const Schedule& schedule,
                  std::span<const std::int64_t> arrivals, std::span<const std::int64_t> next_rates);

using Policy = std::function<Schedule(const ConflictGraph&, std::span<const std::int64_t> q,
                                      std::span<const std::int64_t> r)>;

struct EpisodeResult {
    int nodes = 0;
    std::vector<Schedule> schedules;  // one per slot, T entries
    std::vector<QueueVector> queues;  // q(0) .. q(T), T + 1 entries
};

/// Runs the policy over every slot of the trace starting from q0 (zeros when empty).
EpisodeResult run_episode(const ConflictGraph& g, const Policy& policy, const TrafficTrace& trace,
                          const QueueVector& q0 = {});

/// Total backlog after each of the K steps taken from `state` under `policy`.
std::vector<std::int64_t> lookahead_rollout(const ConflictGraph& g, const NetworkState& state, const Policy& policy,
                                            int steps, const TrafficTrace& segment);

/// Ratio of K-step cumulative backlog under the baseline to that under the
/// learned policy, both rolled out on the same trace segment. 0/0 is 1.
double lookahead_compare(const ConflictGraph& g, const NetworkState& state, const Policy& gcn_policy,
                         const Policy& baseline_policy, int steps, const TrafficTrace& segment);

struct MetricsBundle {
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double objective = 0.0;  // time average of per-node mean backlog
    double rounds_mean = 0.0;
    int rounds_max = 0;
};

/// Linear-interpolation percentile, p in [0, 1]. Sorts a copy.
double percentile(std::vector<double> samples, double p);

/// Metrics over queue snapshots q(first) .. q(last - 1); last < 0 means through q(T).
MetricsBundle compute_metrics(const EpisodeResult& result, int first = 0, int last = -1);

} // namespace gsched
