#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace alid {

struct KernelParams {
    double k = 1.0; // scale of the Laplacian kernel e^{-k * dist}
    double p = 2.0; // Minkowski norm order, p >= 1
};

// Optional instrumentation: counts kernel evaluations and the set of distinct
// unordered index pairs they covered. Thread safe; off by default.
class KernelCounter {
public:
    void record(std::int32_t i, std::int32_t j);
    std::uint64_t distinct_pairs() const;
    std::uint64_t total_evals() const;
    void reset();

private:
    mutable std::mutex mu_;
    std::unordered_set<std::uint64_t> pairs_;
    std::uint64_t evals_ = 0;
};

// One on-demand column of the affinity matrix, restricted to `rows`.
struct AffinityColumn {
    std::int32_t target = -1;
    std::vector<std::int32_t> rows;
    std::vector<double> values; // values[t] = affinity(rows[t], target)
};

// Immutable point set with kernel parameters. Points are float32 records
// (matching the on-disk format); all kernel math runs in double.
class DataSet {
public:
    DataSet(std::vector<float> pts, std::int32_t d, KernelParams kp);

    static DataSet from_csv(const std::string& path, KernelParams kp);
    static DataSet from_binary(const std::string& path, KernelParams kp);
    void write_binary(const std::string& path) const;

    std::int64_t size() const { return n_; }
    std::int32_t dim() const { return d_; }
    const KernelParams& kernel() const { return kernel_; }

    std::span<const float> point(std::int32_t i) const {
        return {pts_.data() + static_cast<std::size_t>(i) * d_, static_cast<std::size_t>(d_)};
    }

    void set_counter(KernelCounter* c) { counter_ = c; }
    KernelCounter* counter() const { return counter_; }

    double distance(std::int32_t i, std::int32_t j) const;
    double distance_to(std::int32_t i, const double* center) const;

    // e^{-k * ||v_i - v_j||_p} off the diagonal, exactly 0 when i == j.
    double affinity(std::int32_t i, std::int32_t j) const;

    AffinityColumn affinity_column(std::int32_t target, std::span<const std::int32_t> rows) const;

private:
    void check_index(std::int32_t i) const;

    std::vector<float> pts_;
    std::int64_t n_ = 0;
    std::int32_t d_ = 0;
    KernelParams kernel_;
    KernelCounter* counter_ = nullptr; // not owned
};

// Raw vector file contents, shared by the CSV and binary loaders so kernel
// parameters can be chosen (e.g. the median heuristic) before a DataSet exists.
struct RawVectors {
    std::vector<float> pts;
    std::int64_t n = 0;
    std::int32_t d = 0;
};

RawVectors load_vectors_csv(const std::string& path);
RawVectors load_vectors_binary(const std::string& path);

// 1 / median pairwise distance over an evenly spaced sample of at most 1000
// points. Deterministic; throws DegenerateStart if the median distance is 0.
double auto_kernel_scale(const RawVectors& rv, double p = 2.0);
double auto_kernel_scale(const DataSet& ds);

} // namespace alid
