#pragma once

#include "alid/dataset.hpp"
#include "alid/subgraph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace alid::oracle {

// Fully materialized affinity matrix. Deliberately simple and independent of
// the localized engine; used as ground truth in tests and small-scale runs.
class DenseAffinity {
public:
    DenseAffinity(std::int64_t n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
    double at(std::int32_t i, std::int32_t j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    double& at(std::int32_t i, std::int32_t j) {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    std::int64_t size() const { return n_; }

private:
    std::int64_t n_;
    std::vector<double> a_;
};

// Guard: n <= 5000 (quadratic memory); throws TooLarge beyond that.
DenseAffinity build_dense(const DataSet& ds);

struct IidResult {
    Subgraph x;
    double pi = 0.0;
    int iters = 0;
    double max_gap = 0.0; // final max |selectable gap| over the active set
    bool converged = false;
};

// Full-range infection-immunization dynamics on the dense matrix, starting
// from a seed vertex. `active`, when given, masks vertices in play (1 = live).
IidResult run_iid_full(const DenseAffinity& a, std::int32_t seed_vertex,
                       double gap_eps = 1e-7, int max_iters = 200000,
                       const std::vector<std::uint8_t>* active = nullptr);

// Discrete replicator dynamics x_i <- x_i (Ax)_i / (x^T A x).
// Throws DegenerateStart when x0's payoff is zero.
Subgraph run_replicator(const DenseAffinity& a, const Subgraph& x0, int iters);

// Brute-force metric range query (closed ball) used to check retrieval.
std::vector<std::int32_t> exact_range_query(const DataSet& ds,
                                            std::span<const double> center,
                                            double radius);

struct DenseCluster {
    std::int64_t label = 0;
    double pi = 0.0;
    Subgraph members;
};

// Peel-and-detect over the dense matrix with the same seed order, threshold
// and pruning rules as the scalable pipeline. Reference for parity checks.
std::vector<DenseCluster> dense_detect_all(const DataSet& ds, const DenseAffinity& a,
                                           double density_threshold,
                                           double gap_eps = 1e-7, int max_iters = 200000);

} // namespace alid::oracle
