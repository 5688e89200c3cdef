#include <doctest.h>

#include "gsched/errors.hpp"
#include "gsched/solvers.hpp"
#include "oracles.hpp"

using namespace gsched;

using Set = std::vector<NodeId>;

TEST_CASE("lgs hand traces") {
    const auto p3 = oracle::path(3);
    const std::vector<double> u{3, 1, 2};
    auto s = lgs(p3, u);
    CHECK(s.nodes == Set{0, 2});
    CHECK(s.rounds_used == 1);

    const std::vector<double> equal(6, 1.0);
    s = lgs(generate_star(5), equal);
    CHECK(s.nodes == Set{1, 2, 3, 4, 5});
    CHECK(s.rounds_used == 1);

    s = lgs(oracle::complete(3), std::vector<double>{5, 3, 4});
    CHECK(s.nodes == Set{0});
    CHECK(s.rounds_used == 1);

    // 0-1-2-3 with u = 1,2,3,4: round 1 takes 3, round 2 takes 1.
    s = lgs(oracle::path(4), std::vector<double>{1, 2, 3, 4});
    CHECK(s.nodes == Set{1, 3});
    CHECK(s.rounds_used == 2);

    CHECK(lgs(oracle::edgeless(0), std::vector<double>{}).nodes.empty());
    CHECK_THROWS_AS(lgs(p3, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("zero utilities still get scheduled") {
    const auto s = lgs(oracle::path(3), std::vector<double>{0, 0, 0});
    CHECK(s.nodes == Set{0, 2});
}

TEST_CASE("centralized greedy") {
    CHECK(greedy_centralized(generate_star(5), std::vector<double>{2, 1, 1, 1, 1, 1}).nodes == Set{0});
    CHECK(greedy_centralized(oracle::edgeless(4), std::vector<double>{4, 0, 1, 7}).nodes == Set{0, 1, 2, 3});
    CHECK(greedy_centralized(oracle::path(3), std::vector<double>{3, 1, 2}).nodes == Set{0, 2});
}

TEST_CASE("exact mwis examples") {
    const auto star = generate_star(5);
    CHECK(exact_mwis(star, std::vector<double>{6, 1, 1, 1, 1, 1}).nodes == Set{0});
    CHECK(exact_mwis(star, std::vector<double>{5, 1, 1, 1, 1, 1}).nodes == Set{1, 2, 3, 4, 5});
    CHECK(exact_mwis(oracle::complete(3), std::vector<double>{1, 2, 3}).nodes == Set{2});
    // Equal-weight options {0} and {1}: indicator (0,1) < (1,0).
    CHECK(exact_mwis(oracle::complete(2), std::vector<double>{1, 1}).nodes == Set{1});

    CHECK_THROWS_AS(exact_mwis(oracle::edgeless(41), std::vector<double>(41, 1.0)), SizeLimitError);
    CHECK(exact_mwis(oracle::edgeless(41), std::vector<double>(41, 1.0), 64).nodes.size() == 41);
    CHECK_THROWS_AS(exact_mwis(oracle::path(2), std::vector<double>{-1, 1}), std::invalid_argument);
}

TEST_CASE("baseline utilities") {
    const std::vector<std::int64_t> q{2, 0}, r{3, 5}, zero{0, 0};
    CHECK(baseline_utility(q, r, UtilityKind::product) == UtilityVector{6, 0});
    CHECK(baseline_utility(q, r, UtilityKind::min) == UtilityVector{2, 0});
    CHECK(baseline_utility(zero, r, UtilityKind::product) == UtilityVector{0, 0});
    CHECK(baseline_utility(zero, r, UtilityKind::min) == UtilityVector{0, 0});
    CHECK_THROWS_AS(baseline_utility(q, std::vector<std::int64_t>{1}, UtilityKind::min), std::invalid_argument);
}

TEST_CASE("solver properties on random graphs") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_real_distribution<double> pick_p(0.05, 0.7);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = size(rng);
        const auto g = generate_er(n, pick_p(rng), rng);
        const auto u = oracle::distinct_utilities(n, rng);

        const auto local = lgs(g, u);
        const auto central = greedy_centralized(g, u);
        const auto exact = exact_mwis(g, u);

        CHECK(local.nodes == central.nodes);
        CHECK(oracle::brute_maximal(g, local.nodes));
        CHECK(oracle::brute_independent(g, exact.nodes));
        CHECK(local.rounds_used <= n);

        const double best = oracle::brute_force_mwis(g, u);
        const double we = schedule_weight(u, exact.nodes);
        const double wg = schedule_weight(u, central.nodes);
        CHECK(we == doctest::Approx(best).epsilon(1e-12));
        CHECK(we >= wg - 1e-12);
        CHECK(wg >= *std::max_element(u.begin(), u.end()) - 1e-12);

        // Positive rescaling leaves all three unchanged.
        std::vector<double> scaled = u;
        const double c = scale(rng);
        for (double& x : scaled) x *= c;
        CHECK(lgs(g, scaled).nodes == local.nodes);
        CHECK(greedy_centralized(g, scaled).nodes == central.nodes);
        CHECK(exact_mwis(g, scaled).nodes == exact.nodes);
    }
}

TEST_CASE("exact mwis picks the lexicographically smallest optimal indicator") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<int> size(2, 10);
    std::uniform_int_distribution<int> weight(0, 3);  // small integers force ties
    for (int trial = 0; trial < 200; ++trial) {
        const int n = size(rng);
        const auto g = generate_er(n, 0.3, rng);
        std::vector<double> u(n);
        for (double& x : u) x = weight(rng);
        const auto a = oracle::adjacency(g);
        const double best = oracle::brute_force_mwis(g, u);
        // Reverse-bit order so that comparing masks is comparing indicators node 0 first.
        std::uint32_t best_key = ~0u;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (!oracle::independent_mask(a, mask)) continue;
            double w = 0.0;
            std::uint32_t key = 0;
            for (int i = 0; i < n; ++i) {
                if (mask >> i & 1u) {
                    w += u[i];
                    key |= 1u << (n - 1 - i);
                }
            }
            if (w == best) best_key = std::min(best_key, key);
        }
        Set expect;
        for (int i = 0; i < n; ++i)
            if (best_key >> (n - 1 - i) & 1u) expect.push_back(i);
        CHECK(exact_mwis(g, u).nodes == expect);
    }
}
