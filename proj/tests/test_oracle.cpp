#include <doctest.h>

#include "alid/dataset.hpp"
#include "alid/errors.hpp"
#include "alid/oracle.hpp"
#include "alid/rng.hpp"
#include "alid/subgraph.hpp"

#include <cmath>
#include <vector>

using namespace alid;

namespace {

// m duplicate points at `at`, then m2 duplicates far away, 1-D.
DataSet two_groups(int m1, int m2, float gap = 40.0f) {
    std::vector<float> pts;
    for (int i = 0; i < m1; ++i) pts.push_back(0.0f);
    for (int i = 0; i < m2; ++i) pts.push_back(gap);
    return DataSet(std::move(pts), 1, KernelParams{});
}

DataSet random_points(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> pts(static_cast<std::size_t>(n) * d);
    for (auto& v : pts) v = static_cast<float>(rng.uniform(0.0, 4.0));
    return DataSet(std::move(pts), d, KernelParams{1.0, 2.0});
}

} // namespace

TEST_CASE("dense matrix matches the kernel, is symmetric and zero-diagonal") {
    auto ds = random_points(12, 3, 5);
    auto a = oracle::build_dense(ds);
    for (int i = 0; i < 12; ++i) {
        CHECK(a.at(i, i) == 0.0);
        for (int j = 0; j < 12; ++j) {
            CHECK(a.at(i, j) == a.at(j, i));
            CHECK(a.at(i, j) == doctest::Approx(ds.affinity(i, j)).epsilon(1e-15));
        }
    }
}

TEST_CASE("dense matrix refuses oversized inputs") {
    std::vector<float> pts(5001, 0.0f);
    DataSet ds(std::move(pts), 1, KernelParams{});
    CHECK_THROWS_AS(oracle::build_dense(ds), TooLarge);
}

TEST_CASE("full-range dynamics on a duplicate group reaches uniform weights") {
    for (int m : {2, 3, 5}) {
        auto ds = two_groups(m, 0);
        auto a = oracle::build_dense(ds);
        auto res = oracle::run_iid_full(a, 0);
        CHECK(res.converged);
        CHECK(res.pi == doctest::Approx((m - 1.0) / m).epsilon(1e-12));
        CHECK(res.max_gap <= 1e-7);
        REQUIRE(res.x.size() == static_cast<std::size_t>(m));
        for (double w : res.x.weights) CHECK(w == doctest::Approx(1.0 / m).epsilon(1e-9));
    }
}

TEST_CASE("active mask confines the dynamics and protects the seed") {
    auto ds = two_groups(4, 4, 1.0f); // close groups so cross-affinity matters
    auto a = oracle::build_dense(ds);
    std::vector<std::uint8_t> active(8, 1);
    for (int i = 4; i < 8; ++i) active[i] = 0;
    auto res = oracle::run_iid_full(a, 0, 1e-7, 200000, &active);
    for (auto v : res.x.support) CHECK(v < 4);
    CHECK_THROWS_AS(oracle::run_iid_full(a, 5, 1e-7, 200000, &active), SeedExcluded);
}

TEST_CASE("equilibrium of the dynamics is a fixed point of replicator iteration") {
    auto ds = random_points(40, 2, 13);
    auto a = oracle::build_dense(ds);
    auto res = oracle::run_iid_full(a, 3);
    REQUIRE(res.converged);
    auto moved = oracle::run_replicator(a, res.x, 200);
    // payoffs are equal across the support at equilibrium, so replicator
    // iteration must keep both the support and the density
    double pi_before = 0.0, pi_after = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i)
        for (std::size_t j = 0; j < res.x.size(); ++j)
            pi_before += res.x.weights[i] * res.x.weights[j] *
                         a.at(res.x.support[i], res.x.support[j]);
    for (std::size_t i = 0; i < moved.size(); ++i)
        for (std::size_t j = 0; j < moved.size(); ++j)
            pi_after +=
                moved.weights[i] * moved.weights[j] * a.at(moved.support[i], moved.support[j]);
    CHECK(pi_after == doctest::Approx(pi_before).epsilon(1e-9));
    CHECK(pi_after >= pi_before - 1e-12); // replicator never decreases density
}

TEST_CASE("replicator refuses a zero-payoff start") {
    auto ds = two_groups(1, 1);
    auto a = oracle::build_dense(ds);
    CHECK_THROWS_AS(oracle::run_replicator(a, Subgraph::singleton(0), 10), DegenerateStart);
}

TEST_CASE("exact range query returns the closed ball") {
    DataSet ds({0.f, 1.f, 2.f, 3.f, 10.f}, 1, KernelParams{});
    std::vector<double> center = {1.0};
    auto hits = oracle::exact_range_query(ds, center, 1.0);
    CHECK(hits == std::vector<std::int32_t>{0, 1, 2});
    std::vector<double> bad = {1.0, 2.0};
    CHECK_THROWS_AS(oracle::exact_range_query(ds, bad, 1.0), FormatError);
}

TEST_CASE("dense peeling keeps dense groups and filters loose ones") {
    // group of 5 duplicates (density 0.8) then group of 3 (density 2/3)
    auto ds = two_groups(5, 3);
    auto a = oracle::build_dense(ds);
    auto clusters = oracle::dense_detect_all(ds, a, 0.75);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].label == 0);
    CHECK(clusters[0].pi == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(clusters[0].members.support == std::vector<std::int32_t>{0, 1, 2, 3, 4});

    // with a permissive threshold both groups come out, labels stay dense
    auto both = oracle::dense_detect_all(ds, a, 0.5);
    REQUIRE(both.size() == 2);
    CHECK(both[0].label == 0);
    CHECK(both[1].label == 1);
    CHECK(both[1].pi == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(both[1].members.support == std::vector<std::int32_t>{5, 6, 7});
}
