#pragma once

#include "alid/dataset.hpp"
#include "alid/driver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace alid::synth {

enum class Regime { Proportional, Sublinear, Capped };

Regime regime_from_string(const std::string& s);
std::string to_string(Regime r);

// Planted-cluster generator: `clusters` axis-aligned Gaussians of equal size
// a_star in d dimensions, remaining points uniform noise over the inflated
// bounding box of the cluster points.
struct SynthSpec {
    Regime regime = Regime::Proportional;
    double omega = 1.0;      // Proportional: a_star = floor(omega n / clusters)
    double eta = 0.9;        // Sublinear:    a_star = floor(n^eta / clusters)
    std::int64_t cap = 1000; // Capped:       a_star = floor(cap / clusters)
    std::int64_t n = 1000;
    int clusters = 20;
    int d = 100;
    double cov_min = 0.0;
    double cov_max = 10.0;
    bool overlap = false; // pull some cluster pairs to half the base spacing
    std::uint64_t seed = 0;

    std::int64_t a_star() const; // throws InfeasibleSpec when out of range
};

struct GroundTruth {
    std::vector<std::int32_t> labels; // 0 = noise, 1..clusters
    int n_clusters = 0;
    double mean_rms_radius = 0.0; // average within-cluster RMS spread
};

struct Generated {
    RawVectors vectors;
    GroundTruth truth;
};

Generated generate(const SynthSpec& spec);

void write_truth_json(const std::string& path, const GroundTruth& t);
GroundTruth read_truth_json(const std::string& path);

// Mean over true clusters of the best F1 against any detected support set.
double avg_f(const GroundTruth& truth, const std::vector<ClusterResult>& clusters,
             std::vector<double>* per_cluster = nullptr);

// 1 - (evaluated off-diagonal entries) / (n (n-1)); both orders of a pair
// count as evaluated once the pair has been touched.
double sparse_degree(const KernelCounter& counter, std::int64_t n);

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct BenchPoint {
    std::int64_t n = 0;
    double runtime_s = 0.0;
    std::uint64_t peak_mem_bytes = 0;
    double avg_f = 0.0;
    double sparse_degree = 0.0;
};

struct BenchConfig {
    SynthSpec spec; // n is overridden by each grid entry
    std::vector<std::int64_t> grid = {2000, 4000, 8000, 16000, 32000, 64000};
    // index parameters; r and the bootstrap radius scale with the generated
    // cluster spread, and so does the kernel scale (k = k_over_rho / spread;
    // 0 falls back to the median heuristic). The default keeps within-cluster
    // affinities nearly flat so a planted cluster is recovered as one support.
    int mu = 8;
    int tables = 4;
    double r_scale = 4.5;
    double bootstrap_scale = 1.5;
    double k_over_rho = 0.045;
    AlidConfig alid;
};

struct BenchResult {
    std::vector<BenchPoint> rows;
    double runtime_slope = 0.0;
    double mem_slope = 0.0;
    double index_build_s_total = 0.0;
};

// Generates, indexes and runs the peeling detection for every grid size,
// measuring detection wall time, heap high-water, AVG-F and sparsity.
BenchResult scaling_bench(const BenchConfig& cfg, std::ostream* progress = nullptr);

void write_bench_csv(const std::string& path, const std::vector<BenchPoint>& rows);

} // namespace alid::synth
