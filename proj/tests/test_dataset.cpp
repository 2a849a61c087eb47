#include <doctest.h>

#include "alid/dataset.hpp"
#include "alid/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace alid;

namespace {

DataSet make_line(std::vector<float> xs, KernelParams kp = {}) {
    return DataSet(std::move(xs), 1, kp);
}

std::string temp_path(const char* name) {
    return std::string("/tmp/alid_dataset_") + name;
}

} // namespace

TEST_CASE("affinity is exp(-k dist) off the diagonal and exactly zero on it") {
    DataSet ds({0.f, 0.f, 3.f, 4.f}, 2, KernelParams{0.5, 2.0});
    CHECK(ds.distance(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(ds.affinity(0, 1) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
    CHECK(ds.affinity(1, 0) == ds.affinity(0, 1));
    CHECK(ds.affinity(0, 0) == 0.0);
    CHECK(ds.affinity(1, 1) == 0.0);
}

TEST_CASE("Minkowski orders: p=1, p=2 and a fractional-order-free general case") {
    DataSet ds({0.f, 0.f, 1.f, 2.f}, 2, KernelParams{1.0, 1.0});
    CHECK(ds.distance(0, 1) == doctest::Approx(3.0));
    DataSet ds3({0.f, 0.f, 1.f, 2.f}, 2, KernelParams{1.0, 3.0});
    const double want = std::pow(1.0 + 8.0, 1.0 / 3.0);
    CHECK(ds3.distance(0, 1) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("identical points have affinity 1") {
    DataSet ds({2.f, 2.f, 2.f, 2.f}, 2, KernelParams{3.0, 2.0});
    CHECK(ds.affinity(0, 1) == 1.0);
}

TEST_CASE("kernel parameters are validated") {
    CHECK_THROWS_AS(make_line({0.f, 1.f}, KernelParams{0.0, 2.0}), Error);
    CHECK_THROWS_AS(make_line({0.f, 1.f}, KernelParams{-1.0, 2.0}), Error);
    CHECK_THROWS_AS(make_line({0.f, 1.f}, KernelParams{1.0, 0.5}), Error);
}

TEST_CASE("non-finite components are rejected") {
    CHECK_THROWS_AS(make_line({0.f, std::numeric_limits<float>::infinity()}),
                    NonFiniteComponent);
    CHECK_THROWS_AS(make_line({0.f, std::numeric_limits<float>::quiet_NaN()}),
                    NonFiniteComponent);
}

TEST_CASE("out-of-range ids throw") {
    DataSet ds = make_line({0.f, 1.f});
    CHECK_THROWS_AS(ds.affinity(0, 2), IndexOutOfRange);
    CHECK_THROWS_AS(ds.affinity(-1, 0), IndexOutOfRange);
    CHECK_THROWS_AS(ds.distance(0, 5), IndexOutOfRange);
}

TEST_CASE("csv loader parses rows and reports malformed input with line numbers") {
    const auto path = temp_path("ok.csv");
    {
        std::ofstream f(path);
        f << "1.0,2.0\n-3.5,4.25\n0,0\n";
    }
    auto rv = load_vectors_csv(path);
    CHECK(rv.n == 3);
    CHECK(rv.d == 2);
    CHECK(rv.pts[2] == doctest::Approx(-3.5f));

    const auto bad = temp_path("bad.csv");
    {
        std::ofstream f(bad);
        f << "1.0,2.0\n3.0\n";
    }
    try {
        load_vectors_csv(bad);
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }

    const auto junk = temp_path("junk.csv");
    {
        std::ofstream f(junk);
        f << "1.0,abc\n";
    }
    CHECK_THROWS_AS(load_vectors_csv(junk), MalformedRow);

    const auto nan_file = temp_path("nan.csv");
    {
        std::ofstream f(nan_file);
        f << "1.0,2.0\nnan,0\n";
    }
    CHECK_THROWS_AS(load_vectors_csv(nan_file), Error);

    const auto empty = temp_path("empty.csv");
    { std::ofstream f(empty); }
    CHECK_THROWS_AS(load_vectors_csv(empty), EmptyFile);
}

TEST_CASE("binary format round trips and rejects trailing garbage") {
    const auto path = temp_path("rt.bin");
    DataSet ds({1.f, 2.f, 3.f, 4.f, 5.f, 6.f}, 3, KernelParams{});
    ds.write_binary(path);
    auto rv = load_vectors_binary(path);
    REQUIRE(rv.n == 2);
    REQUIRE(rv.d == 3);
    for (int i = 0; i < 6; ++i) CHECK(rv.pts[i] == doctest::Approx(1.0f + i));

    {
        std::ofstream f(path, std::ios::binary | std::ios::app);
        f << "x";
    }
    CHECK_THROWS_AS(load_vectors_binary(path), FormatError);

    const auto missing = temp_path("missing.bin");
    std::remove(missing.c_str());
    CHECK_THROWS_AS(load_vectors_binary(missing), Error);
}

TEST_CASE("median-distance kernel scale on a hand-checked triple") {
    // pairwise distances 1, 2, 3 -> median 2 -> k = 0.5
    RawVectors rv;
    rv.n = 3;
    rv.d = 1;
    rv.pts = {0.f, 1.f, 3.f};
    CHECK(auto_kernel_scale(rv) == doctest::Approx(0.5).epsilon(1e-12));

    RawVectors same;
    same.n = 3;
    same.d = 1;
    same.pts = {1.f, 1.f, 1.f};
    CHECK_THROWS_AS(auto_kernel_scale(same), DegenerateStart);
}

TEST_CASE("kernel counter tracks evaluations and distinct unordered pairs") {
    DataSet ds = make_line({0.f, 1.f, 2.f});
    KernelCounter counter;
    ds.set_counter(&counter);
    ds.affinity(0, 1);
    ds.affinity(1, 0);
    ds.affinity(0, 2);
    ds.affinity(0, 0); // diagonal: no kernel evaluation happens
    CHECK(counter.total_evals() == 3);
    CHECK(counter.distinct_pairs() == 2);
    counter.reset();
    CHECK(counter.total_evals() == 0);
    CHECK(counter.distinct_pairs() == 0);
}

TEST_CASE("affinity_column covers requested rows and zeroes the target slot") {
    DataSet ds = make_line({0.f, 1.f, 2.f, 4.f});
    std::vector<std::int32_t> rows = {0, 1, 2, 3};
    auto col = ds.affinity_column(2, rows);
    REQUIRE(col.values.size() == 4);
    CHECK(col.values[2] == 0.0);
    CHECK(col.values[0] == doctest::Approx(std::exp(-2.0)));
    CHECK(col.values[3] == doctest::Approx(std::exp(-2.0)));
}
