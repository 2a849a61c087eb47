#pragma once

#include "alid/dataset.hpp"
#include "alid/subgraph.hpp"

#include <vector>

namespace alid {

// Double-deck hyperball around the weighted center of a subgraph. Points
// strictly inside r_in are guaranteed infective, points outside r_out are
// guaranteed immune; the working radius slides from r_in toward r_out as the
// round counter grows. A bootstrap ball (fixed radius, no payoff information)
// stands in while the subgraph still has zero density.
struct RoiBall {
    std::vector<double> center;
    double lambda_in = 0.0;
    double lambda_out = 0.0;
    double r_in = 0.0;
    double r_out = 0.0;
    bool bootstrap = false;

    double radius_at(int c) const;

    static RoiBall bootstrap_ball(std::vector<double> center, double radius);
};

// Logistic round schedule: 0 < theta(c) < 1, theta(8) = 1/2, increasing in c.
double theta(int c);

std::vector<double> weighted_center(const DataSet& ds, const Subgraph& xhat);

// Throws ZeroDensity when pi(xhat) == 0 (e.g. singleton support).
RoiBall build_ball(const DataSet& ds, const Subgraph& xhat);
// Same, with the density supplied by the caller (already maintained upstream).
RoiBall build_ball(const DataSet& ds, const Subgraph& xhat, double pi_hint);

bool contains(const RoiBall& ball, int c, const DataSet& ds, std::int32_t j);

} // namespace alid
