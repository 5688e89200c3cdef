#include "gsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gsched/errors.hpp"

namespace gsched {

std::span<const std::int64_t> TrafficTrace::arrivals_at(int t) const {
    if (t < 0 || t >= horizon) throw std::out_of_range("trace slot out of range");
    return {arrivals.data() + static_cast<std::size_t>(t) * nodes, static_cast<std::size_t>(nodes)};
}

std::span<const std::int64_t> TrafficTrace::rates_at(int t) const {
    if (t < 0 || t >= horizon) throw std::out_of_range("trace slot out of range");
    return {rates.data() + static_cast<std::size_t>(t) * nodes, static_cast<std::size_t>(nodes)};
}

TrafficTrace TrafficTrace::segment(int first, int length) const {
    if (first < 0 || length < 0 || first + length > horizon) throw std::out_of_range("trace segment out of range");
    TrafficTrace out;
    out.horizon = length;
    out.nodes = nodes;
    out.seed = seed;
    out.arrival_rate = arrival_rate;
    const auto begin = static_cast<std::ptrdiff_t>(first) * nodes;
    const auto end = static_cast<std::ptrdiff_t>(first + length) * nodes;
    out.arrivals.assign(arrivals.begin() + begin, arrivals.begin() + end);
    out.rates.assign(rates.begin() + begin, rates.begin() + end);
    return out;
}

std::uint64_t TrafficTrace::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(static_cast<std::uint64_t>(horizon));
    mix(static_cast<std::uint64_t>(nodes));
    for (auto a : arrivals) mix(static_cast<std::uint64_t>(a));
    for (auto r : rates) mix(static_cast<std::uint64_t>(r));
    return h;
}

TrafficTrace sample_traffic(const ConflictGraph& g, int horizon, double lambda, Rng& rng, const RateModel& model) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("arrival rate must be non-negative");
    if (horizon < 1) throw std::invalid_argument("trace horizon must be at least 1");
    TrafficTrace trace;
    trace.horizon = horizon;
    trace.nodes = g.node_count();
    trace.seed = rng();
    trace.arrival_rate = lambda;
    const std::size_t cells = static_cast<std::size_t>(horizon) * static_cast<std::size_t>(trace.nodes);
    trace.arrivals.assign(cells, 0);
    trace.rates.resize(cells);

    Rng arrival_rng(derive_seed(trace.seed, 1));
    Rng rate_rng(derive_seed(trace.seed, 2));
    if (lambda > 0.0) {
        std::poisson_distribution<std::int64_t> arrivals(lambda);
        for (auto& a : trace.arrivals) a = arrivals(arrival_rng);
    }
    std::normal_distribution<double> rate(model.mean, model.stddev);
    for (auto& r : trace.rates) r = static_cast<std::int64_t>(std::lround(std::clamp(rate(rate_rng), 0.0, 100.0)));
    return trace;
}

TrafficTrace constant_traffic(int nodes, int horizon, std::int64_t arrival, std::int64_t rate) {
    if (horizon < 1 || nodes < 0 || arrival < 0 || rate < 0) throw std::invalid_argument("invalid constant traffic");
    TrafficTrace trace;
    trace.horizon = horizon;
    trace.nodes = nodes;
    trace.arrival_rate = static_cast<double>(arrival);
    const std::size_t cells = static_cast<std::size_t>(horizon) * static_cast<std::size_t>(nodes);
    trace.arrivals.assign(cells, arrival);
    trace.rates.assign(cells, rate);
    return trace;
}

NetworkState step(const ConflictGraph& g, const NetworkState& state, const Schedule& schedule,
                  std::span<const std::int64_t> arrivals, std::span<const std::int64_t> next_rates) {
    const auto n = static_cast<std::size_t>(g.node_count());
    if (state.q.size() != n || state.r.size() != n || arrivals.size() != n || next_rates.size() != n) {
        throw std::invalid_argument("state vectors must have one entry per node");
    }
    if (!is_independent_set(g, schedule.nodes)) throw ContractViolation("schedule is not an independent set");

    NetworkState next;
    next.q = state.q;
    next.r.assign(next_rates.begin(), next_rates.end());
    next.t = state.t + 1;
    for (NodeId v : schedule.nodes) {
        const auto i = static_cast<std::size_t>(v);
        next.q[i] -= std::min(state.r[i], state.q[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (arrivals[i] < 0) throw std::invalid_argument("arrivals must be non-negative");
        next.q[i] += arrivals[i];
    }
    return next;
}

EpisodeResult run_episode(const ConflictGraph& g, const Policy& policy, const TrafficTrace& trace,
                          const QueueVector& q0) {
    if (trace.horizon < 1) throw std::invalid_argument("trace horizon must be at least 1");
    if (trace.nodes != g.node_count()) throw std::invalid_argument("trace and graph disagree on node count");
    const auto n = static_cast<std::size_t>(g.node_count());

    NetworkState state;
    state.q = q0.empty() ? QueueVector(n, 0) : q0;
    if (state.q.size() != n) throw std::invalid_argument("initial queue vector has wrong length");
    state.r.assign(trace.rates_at(0).begin(), trace.rates_at(0).end());

    EpisodeResult result;
    result.nodes = g.node_count();
    result.schedules.reserve(static_cast<std::size_t>(trace.horizon));
    result.queues.reserve(static_cast<std::size_t>(trace.horizon) + 1);
    result.queues.push_back(state.q);
    for (int t = 0; t < trace.horizon; ++t) {
        Schedule s = policy(g, state.q, state.r);
        const auto next_rates = trace.rates_at(t + 1 < trace.horizon ? t + 1 : t);
        state = step(g, state, s, trace.arrivals_at(t), next_rates);
        result.schedules.push_back(std::move(s));
        result.queues.push_back(state.q);
    }
    return result;
}

std::vector<std::int64_t> lookahead_rollout(const ConflictGraph& g, const NetworkState& state, const Policy& policy,
                                            int steps, const TrafficTrace& segment) {
    if (steps < 1) throw std::invalid_argument("lookahead needs at least one step");
    if (segment.horizon < steps) throw std::invalid_argument("trace segment shorter than lookahead");
    std::vector<std::int64_t> totals;
    totals.reserve(static_cast<std::size_t>(steps));
    NetworkState s = state;
    for (int k = 0; k < steps; ++k) {
        Schedule sched = policy(g, s.q, s.r);
        const auto next_rates = segment.rates_at(k + 1 < segment.horizon ? k + 1 : k);
        s = step(g, s, sched, segment.arrivals_at(k), next_rates);
        totals.push_back(std::accumulate(s.q.begin(), s.q.end(), std::int64_t{0}));
    }
    return totals;
}

double lookahead_compare(const ConflictGraph& g, const NetworkState& state, const Policy& gcn_policy,
                         const Policy& baseline_policy, int steps, const TrafficTrace& segment) {
    const auto learned = lookahead_rollout(g, state, gcn_policy, steps, segment);
    const auto baseline = lookahead_rollout(g, state, baseline_policy, steps, segment);
    const auto learned_sum = std::accumulate(learned.begin(), learned.end(), std::int64_t{0});
    const auto baseline_sum = std::accumulate(baseline.begin(), baseline.end(), std::int64_t{0});
    if (learned_sum == 0 && baseline_sum == 0) return 1.0;
    // An emptied network under the learned policy is scored against one packet.
    if (learned_sum == 0) return static_cast<double>(baseline_sum);
    return static_cast<double>(baseline_sum) / static_cast<double>(learned_sum);
}

double percentile(std::vector<double> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile level outside [0,1]");
    std::sort(samples.begin(), samples.end());
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
}

MetricsBundle compute_metrics(const EpisodeResult& result, int first, int last) {
    const int snapshots = static_cast<int>(result.queues.size());
    if (last < 0) last = snapshots;
    if (first < 0 || first >= last || last > snapshots) throw std::invalid_argument("metrics window out of range");

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(last - first) * static_cast<std::size_t>(result.nodes));
    double objective = 0.0;
    for (int t = first; t < last; ++t) {
        const auto& q = result.queues[static_cast<std::size_t>(t)];
        double total = 0.0;
        for (auto x : q) {
            samples.push_back(static_cast<double>(x));
            total += static_cast<double>(x);
        }
        objective += result.nodes > 0 ? total / result.nodes : 0.0;
    }

    MetricsBundle m;
    m.objective = objective / (last - first);
    m.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    m.median = percentile(samples, 0.5);
    m.p95 = percentile(std::move(samples), 0.95);
    if (!result.schedules.empty()) {
        double rounds = 0.0;
        for (const auto& s : result.schedules) {
            rounds += s.rounds_used;
            m.rounds_max = std::max(m.rounds_max, s.rounds_used);
        }
        m.rounds_mean = rounds / static_cast<double>(result.schedules.size());
    }
    return m;
}

} // namespace gsched
