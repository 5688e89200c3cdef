// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gsched/experiment.hpp"
#include "gsched/policy.hpp"
#include "gsched/train.hpp"
#include "oracles.hpp"

using namespace gsched;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

Outcome toy() {
    const auto t0 = std::chrono::steady_clock::now();
    const ToyReport r = run_toy(128, 20);
    const double secs = elapsed(t0);
    const double e = r.exact.steady_state_backlog, g = r.greedy.steady_state_backlog;
    const bool ok = std::abs(e - 13.0 / 6.0) <= 1e-9 && std::abs(g - 1.5) <= 1e-9 && secs < 1.0;
    return {ok, fmt("exact %.10f (13/6), greedy %.10f (1.5), %.3fs", e, g, secs)};
}

Outcome lgs_equals_greedy() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    std::uniform_int_distribution<int> size(2, 60);
    const double ps[] = {0.05, 0.1, 0.3};
    const int ms[] = {1, 2, 5};
    int same = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n = size(rng);
        ConflictGraph g = i % 2 == 0 ? generate_er(n, ps[(i / 2) % 3], rng)
                                     : generate_ba(std::max(n, ms[(i / 2) % 3] + 1), ms[(i / 2) % 3], rng);
        const auto u = oracle::distinct_utilities(g.node_count(), rng);
        same += lgs(g, u).nodes == greedy_centralized(g, u).nodes;
    }
    const double secs = elapsed(t0);
    return {same == 1000 && secs < 10.0, fmt("%d/1000 identical, %.2fs", same, secs)};
}

Outcome exact_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1002);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_real_distribution<double> p(0.0, 0.8), w(0.0, 10.0);
    int agree = 0;
    for (int i = 0; i < 200; ++i) {
        const auto g = generate_er(size(rng), p(rng), rng);
        std::vector<double> u(static_cast<std::size_t>(g.node_count()));
        for (double& x : u) x = w(rng);
        const double got = schedule_weight(u, exact_mwis(g, u).nodes);
        const double best = oracle::brute_force_mwis(g, u);
        agree += std::abs(got - best) <= 1e-9 * std::max(1.0, best);
    }
    const double secs = elapsed(t0);
    return {agree == 200 && secs < 30.0, fmt("%d/200 match enumeration, %.2fs", agree, secs)};
}

Outcome gradient_check() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1003);
    std::uniform_int_distribution<int> size(1, 10), width(1, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int n = size(rng);
        const auto g = generate_er(n, 0.4, rng);
        const auto lap = normalized_laplacian(g);
        std::vector<int> dims = i % 2 ? std::vector<int>{width(rng), width(rng), 1} : std::vector<int>{width(rng), 1};
        GcnParams params = init_params(dims, rng);
        Eigen::MatrixXd s(n, dims[0]);
        for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = normal(rng);
        Eigen::VectorXd w(n);
        for (Eigen::Index k = 0; k < n; ++k) w(k) = normal(rng);
        const auto grads = backward(params, forward(params, lap, s).cache, w);
        for (int l = 0; l < params.layers(); ++l) {
            for (int which = 0; which < 2; ++which) {
                Eigen::MatrixXd& m = which ? params.neighbor_weights[l] : params.self_weights[l];
                const Eigen::MatrixXd& gm = which ? grads.neighbor_weights[l] : grads.self_weights[l];
                for (Eigen::Index k = 0; k < m.size(); ++k) {
                    const double orig = m.data()[k];
                    m.data()[k] = orig + 1e-5;
                    const double up = w.dot(infer(params, lap, s));
                    m.data()[k] = orig - 1e-5;
                    const double down = w.dot(infer(params, lap, s));
                    m.data()[k] = orig;
                    const double fd = (up - down) / 2e-5;
                    const double err = std::abs(fd - gm.data()[k]) / std::max({1.0, std::abs(fd), std::abs(gm.data()[k])});
                    worst = std::max(worst, err);
                }
            }
        }
    }
    const double secs = elapsed(t0);
    return {worst <= 1e-4 && secs < 10.0, fmt("max relative error %.2e, %.2fs", worst, secs)};
}

Outcome pipeline_identity() {
    Rng rng(1004);
    auto params = std::make_shared<const GcnParams>(identity_params());
    const char* models[] = {"Star30", "BA-m2", "ER", "Tree", "BA-m5"};
    std::uniform_real_distribution<double> load(0.01, 0.1);
    int slots = 0, equal = 0;
    std::vector<Instance> instances;
    for (int i = 0; i < 100; ++i) {
        const Instance inst = make_instance(GraphSpec::parse(models[i % 5]), load(rng), 64, 1004, i);
        auto lap = std::make_shared<const LaplacianMatrix>(normalized_laplacian(inst.graph));
        const auto a = run_episode(inst.graph, make_gcn_policy(params, lap), inst.trace);
        const auto b = run_episode(inst.graph, make_lgs_policy(), inst.trace);
        for (std::size_t t = 0; t < a.schedules.size(); ++t) {
            ++slots;
            equal += a.schedules[t].nodes == b.schedules[t].nodes;
        }
        instances.push_back(inst);
    }
    EvalOptions opts;
    opts.policies = {"gcn"};
    opts.checkpoint = Checkpoint{*params, AdamSettings{}};
    int unit = 0;
    for (const auto& ev : evaluate(instances, opts).instances) {
        const auto& r = ev.ratios.at("gcn");
        unit += r.mean == 1.0 && r.median == 1.0 && r.p95 == 1.0;
    }
    return {equal == slots && unit == 100, fmt("%d/%d slots identical, %d/100 instances with AR exactly 1", equal, slots, unit)};
}

Outcome conservation() {
    Rng rng(1005);
    const char* models[] = {"Star30", "BA-m2", "ER", "Tree"};
    std::uniform_real_distribution<double> load(0.01, 0.15);
    long checked = 0, violations = 0;
    for (int i = 0; i < 100; ++i) {
        const Instance inst = make_instance(GraphSpec::parse(models[i % 4]), load(rng), 64, 1005, i);
        const Policy policy = i % 2 ? make_lgs_policy() : make_greedy_policy(UtilityKind::min);
        const auto res = run_episode(inst.graph, policy, inst.trace);
        const int n = inst.graph.node_count();
        for (int t = 0; t < inst.trace.horizon; ++t) {
            std::vector<bool> on(static_cast<std::size_t>(n), false);
            for (NodeId v : res.schedules[t].nodes) on[v] = true;
            const auto a = inst.trace.arrivals_at(t);
            const auto r = inst.trace.rates_at(t);
            for (int v = 0; v < n; ++v) {
                const std::int64_t q = res.queues[t][v], q1 = res.queues[t + 1][v];
                const std::int64_t served = on[v] ? std::min(r[v], q) : 0;
                ++checked;
                violations += (q1 - q != a[v] - served) || q1 < 0;
            }
        }
    }
    return {violations == 0, fmt("%ld node-slots checked, %ld violations", checked, violations)};
}

Outcome round_complexity() {
    Rng rng(1007);
    std::vector<double> mean_rounds;
    std::string detail;
    for (int n : {50, 100, 200, 400}) {
        double sum = 0.0;
        for (int i = 0; i < 200; ++i) {
            const auto g = generate_er(n, 0.1, rng);
            sum += lgs(g, oracle::distinct_utilities(n, rng)).rounds_used;
        }
        mean_rounds.push_back(sum / 200.0);
        detail += fmt("n=%d: %.2f  ", n, sum / 200.0);
    }
    const double growth = mean_rounds.back() / mean_rounds.front();
    const double bound = std::log2(400.0) / std::log2(50.0) * 1.5;
    return {growth <= bound, detail + fmt("ratio %.3f <= %.3f", growth, bound)};
}

Outcome training_smoke() {
    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig config;  // 80% Star30 / 20% BA-m2, K = 5, Heaviside, batch 64
    config.episodes = 1000;
    const TrainResult trained = train(config);

    std::vector<Instance> instances;
    for (int i = 0; i < 100; ++i) instances.push_back(make_instance(GraphSpec::parse("Star30"), 0.07, 64, 7, i));
    EvalOptions opts;
    opts.policies = {"gcn"};
    opts.checkpoint = Checkpoint{trained.params, config.adam};
    const auto report = evaluate(instances, opts);
    double mean = 0.0, median = 0.0, p95 = 0.0;
    for (const auto& ev : report.instances) {
        const auto& r = ev.ratios.at("gcn");
        mean += r.mean / 100.0;
        median += r.median / 100.0;
        p95 += r.p95 / 100.0;
    }
    const double secs = elapsed(t0);
    return {median < 1.0 && secs < 1800.0,
            fmt("median-backlog AR %.4f (need < 1), mean AR %.4f, p95 AR %.4f, %.1fs", median, mean, p95, secs)};
}

Outcome traffic_statistics() {
    Rng rng(1009);
    const auto trace = sample_traffic(oracle::edgeless(1000), 1000, 3.5, rng);
    double arrivals = 0.0, rates = 0.0;
    bool bounded = true;
    for (auto a : trace.arrivals) arrivals += static_cast<double>(a);
    for (auto r : trace.rates) {
        bounded = bounded && r >= 0 && r <= 100;
        rates += static_cast<double>(r);
    }
    arrivals /= 1e6;
    rates /= 1e6;
    const bool ok = std::abs(arrivals - 3.5) <= 0.02 * 3.5 && std::abs(rates - 50.0) <= 1.0 && bounded;
    return {ok, fmt("arrival mean %.4f (3.5), rate mean %.3f (50), rates in [0,100]: %s", arrivals, rates,
                    bounded ? "yes" : "no")};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"star toy steady state", toy},
        {"LGS equals centralized greedy", lgs_equals_greedy},
        {"exact solver vs enumeration", exact_oracle},
        {"gradient check", gradient_check},
        {"pipeline identity", pipeline_identity},
        {"queue conservation", conservation},
        {"LGS round growth", round_complexity},
        {"training smoke (1000 episodes)", training_smoke},
        {"traffic statistics", traffic_statistics},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu %-32s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
