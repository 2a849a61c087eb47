#pragma once

#include "alid/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace alid {

// A soft vertex subset: sparse simplex vector over the vertex set.
// support is sorted and unique, weights are positive and sum to 1.
struct Subgraph {
    std::vector<std::int32_t> support;
    std::vector<double> weights;

    static Subgraph singleton(std::int32_t i);

    // Sorts by index, merges duplicates, drops weights below prune_eps,
    // then renormalizes. Throws ZeroDensity if no mass survives.
    static Subgraph from_weights(std::vector<std::int32_t> idx, std::vector<double> w,
                                 double prune_eps = 1e-12);

    std::size_t size() const { return support.size(); }
    double weight_of(std::int32_t i) const;
    bool contains(std::int32_t i) const;

    std::string to_json() const;
    static Subgraph from_json(const std::string& text);
};

// pi(x) = x^T A x
double density(const DataSet& ds, const Subgraph& x);

// pi(y, x) = y^T A x
double cross_payoff(const DataSet& ds, const Subgraph& y, const Subgraph& x);

// pi(y - x, x) = pi(y, x) - pi(x)
double payoff_gap(const DataSet& ds, const Subgraph& y, const Subgraph& x);

} // namespace alid
