#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsched/config.hpp"
#include "gsched/errors.hpp"
#include "gsched/experiment.hpp"
#include "gsched/policy.hpp"

using namespace gsched;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<Instance> star_instances(int count, double mu = 0.07, std::uint64_t seed = 7) {
    std::vector<Instance> out;
    for (int i = 0; i < count; ++i) out.push_back(make_instance(GraphSpec::parse("Star30"), mu, 64, seed, i));
    return out;
}

} // namespace

TEST_CASE("config parsing") {
    std::istringstream text(R"(# curriculum
episodes = 250
lookahead = 3
phi = linear
graph_mix = Star30:0.5, BA-m2:0.25, ER:0.25
loads = 0.02, 0.04
layer_dims = 1, 8, 1
lr = 0.005
utility = min
recompute_unscheduled = true
)");
    const TrainConfig c = parse_train_config(text);
    CHECK(c.episodes == 250);
    CHECK(c.lookahead == 3);
    CHECK(c.phi == RewardActivation::linear);
    REQUIRE(c.graph_mix.size() == 3);
    CHECK(c.graph_mix[2].spec.name() == "ER");
    CHECK(c.graph_mix[1].weight == 0.25);
    CHECK(c.loads == std::vector<double>{0.02, 0.04});
    CHECK(c.layer_dims == std::vector<int>{1, 8, 1});
    CHECK(c.adam.base_lr == 0.005);
    CHECK(c.utility == UtilityKind::min);
    CHECK(c.recompute_unscheduled);

    std::stringstream round;
    write_train_config(round, c);
    const TrainConfig back = parse_train_config(round);
    CHECK(back.episodes == c.episodes);
    CHECK(back.graph_mix.size() == 3);
    CHECK(back.layer_dims == c.layer_dims);
    CHECK(back.adam.base_lr == c.adam.base_lr);
    CHECK(back.seed == c.seed);
}

TEST_CASE("config errors name the line") {
    auto error_of = [](const std::string& body) -> std::string {
        std::istringstream is(body);
        try {
            parse_train_config(is, "test.cfg");
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(error_of("episodes = 10\nbogus = 1\n").find("test.cfg:2") != std::string::npos);
    CHECK(error_of("episodes = ten\n").find("test.cfg:1") != std::string::npos);
    CHECK(error_of("graph_mix = Star30:0.5\n") != "");
    CHECK(error_of("episodes 10\n") != "");
    CHECK(error_of("phi = cubic\n") != "");
}

TEST_CASE("instances are pure functions of their seed") {
    const auto spec = GraphSpec::parse("ER");
    const auto a = make_instance(spec, 0.07, 64, 7, 3), b = make_instance(spec, 0.07, 64, 7, 3);
    CHECK(a.graph == b.graph);
    CHECK(a.trace.checksum() == b.trace.checksum());
    CHECK(a.name == "ER/mu_0.07/instance_003");

    const auto hi = make_instance(spec, 0.05, 64, 7, 3);
    CHECK(hi.graph == a.graph);
    CHECK(hi.trace.rates == a.trace.rates);
    CHECK(make_instance(spec, 0.07, 64, 7, 4).trace.checksum() != a.trace.checksum());
    CHECK_THROWS_AS(make_instance(spec, 1.5, 64, 7, 0), std::invalid_argument);
}

TEST_CASE("instance persistence") {
    TempDir tmp("gsched_instances_test");
    GenerateOptions opts;
    opts.config = "ER";
    opts.mus = {0.07};
    opts.instances = 3;
    opts.seed = 7;
    opts.out_dir = tmp.path.string();
    const auto dirs = generate_instances(opts);
    CHECK(dirs.size() == 3);
    CHECK(find_instances(tmp.path.string()) == dirs);

    const Instance loaded = load_instance(dirs[1]);
    const Instance direct = make_instance(GraphSpec::parse("ER"), 0.07, 64, 7, 1);
    CHECK(loaded.graph == direct.graph);
    CHECK(loaded.trace == direct.trace);
    CHECK(loaded.name == direct.name);

    // Tampering with the trace is detected.
    {
        std::ifstream is(fs::path(dirs[0]) / "trace.csv");
        std::stringstream body;
        body << is.rdbuf();
        std::string text = body.str();
        const auto pos = text.rfind(',');
        text[pos + 1] = text[pos + 1] == '9' ? '8' : '9';
        std::ofstream(fs::path(dirs[0]) / "trace.csv") << text;
    }
    CHECK_THROWS(load_instance(dirs[0]));

    opts.instances = 1;
    opts.out_dir = (tmp.path / "single").string();
    CHECK(generate_instances(opts).size() == 1);
    opts.config = "Hexagon";
    CHECK_THROWS_AS(generate_instances(opts), ConfigError);
}

TEST_CASE("trace csv round trip") {
    const auto inst = make_instance(GraphSpec::parse("Star5"), 0.03, 10, 1, 0);
    std::stringstream ss;
    write_trace_csv(ss, inst.trace);
    CHECK(read_trace_csv(ss) == inst.trace);
}

TEST_CASE("self-comparison and identity checkpoint give unit ratios") {
    const auto instances = star_instances(10);
    EvalOptions opts;
    opts.policies = {"lgs", "gcn", "greedy"};
    opts.checkpoint = Checkpoint{identity_params(), AdamSettings{}};
    opts.threads = 3;
    const auto report = evaluate(instances, opts);
    for (const auto& ev : report.instances) {
        for (const auto& name : {"lgs", "gcn"}) {
            const auto& r = ev.ratios.at(name);
            CHECK(r.mean == 1.0);
            CHECK(r.median == 1.0);
            CHECK(r.p95 == 1.0);
        }
        CHECK(ev.centralization == doctest::Approx(15.5));
    }
    // On a star, greedy and LGS coincide too.
    for (const auto& ev : report.instances) CHECK(ev.metrics.at("greedy").mean == ev.metrics.at("lgs").mean);
}

TEST_CASE("parallel evaluation matches serial evaluation") {
    const auto instances = star_instances(8);
    EvalOptions opts;
    opts.policies = {"greedy", "exact"};
    opts.threads = 1;
    const auto serial = evaluate(instances, opts);
    opts.threads = 4;
    const auto parallel = evaluate(instances, opts);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        CHECK(serial.instances[i].instance == parallel.instances[i].instance);
        CHECK(serial.instances[i].ratios.at("exact").mean == parallel.instances[i].ratios.at("exact").mean);
    }
}

TEST_CASE("evaluation validation") {
    const auto instances = star_instances(1);
    EvalOptions opts;
    opts.policies = {"gcn"};
    CHECK_THROWS_AS(evaluate(instances, opts), ConfigError);
    opts.policies = {"magic"};
    CHECK_THROWS_AS(evaluate(instances, opts), ConfigError);
    opts.policies = {"exact"};
    opts.exact_cap = 20;
    CHECK_THROWS_AS(evaluate(instances, opts), ConfigError);
    opts.policies = {"gcn"};
    Rng rng(1);
    opts.checkpoint = Checkpoint{init_params(std::vector<int>{2, 1}, rng), AdamSettings{}};
    CHECK_THROWS_AS(evaluate(instances, opts), ConfigError);
}

TEST_CASE("ratios") {
    CHECK(safe_ratio(0.0, 0.0) == 1.0);
    CHECK(safe_ratio(3.0, 4.0) == 0.75);
    CHECK(std::isinf(safe_ratio(1.0, 0.0)));
}

TEST_CASE("csv schemas and report aggregation") {
    const auto instances = star_instances(6);
    EvalOptions opts;
    opts.policies = {"lgs", "greedy"};
    const auto report = evaluate(instances, opts);

    std::stringstream metrics;
    write_metrics_csv(metrics, report);
    std::string header;
    std::getline(metrics, header);
    CHECK(header == "instance,policy,mean,median,p95,objective,rounds_mean");

    std::stringstream ratios;
    write_ratios_csv(ratios, report);
    const std::string ratio_text = ratios.str();
    CHECK(ratio_text.rfind("instance,config,mu,centralization,policy,ar_mean,ar_median,ar_p95,trace_checksum\n", 0) == 0);

    std::stringstream again(ratio_text);
    const auto rows = summarize(read_ratios_csv(again));
    REQUIRE(rows.size() == report.summary.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].policy == report.summary[i].policy);
        CHECK(rows[i].metric == report.summary[i].metric);
        CHECK(rows[i].count == 6);
        CHECK(rows[i].mean == doctest::Approx(report.summary[i].mean));
        CHECK(rows[i].centralization == doctest::Approx(15.5));
    }

    std::stringstream traj;
    write_trajectory_csv(traj, run_episode(instances[0].graph, make_lgs_policy(), instances[0].trace));
    std::getline(traj, header);
    CHECK(header == "t,node,q,scheduled");
    int lines = 0;
    for (std::string line; std::getline(traj, line);) ++lines;
    CHECK(lines == 65 * 31);
}

TEST_CASE("star toy") {
    const auto report = run_toy();
    CHECK(report.exact.steady_state_backlog == doctest::Approx(13.0 / 6.0).epsilon(1e-12));
    CHECK(report.greedy.steady_state_backlog == doctest::Approx(1.5).epsilon(1e-12));

    REQUIRE(report.greedy.cycle.size() == 2);
    const QueueVector hub_high{2, 1, 1, 1, 1, 1}, hub_low{1, 2, 2, 2, 2, 2};
    const bool order_a = report.greedy.cycle[0] == hub_high && report.greedy.cycle[1] == hub_low;
    const bool order_b = report.greedy.cycle[0] == hub_low && report.greedy.cycle[1] == hub_high;
    CHECK((order_a || order_b));

    std::ostringstream os;
    print_toy(os, report);
    CHECK(os.str().find("2.1667") != std::string::npos);
    CHECK(os.str().find("1.5000") != std::string::npos);
}
