#include "alid/roi.hpp"

#include "alid/errors.hpp"

#include <cmath>

namespace alid {

double theta(int c) {
    return 1.0 / (1.0 + std::exp(4.0 - static_cast<double>(c) / 2.0));
}

double RoiBall::radius_at(int c) const {
    if (bootstrap) return r_out;
    return r_in + theta(c) * (r_out - r_in);
}

RoiBall RoiBall::bootstrap_ball(std::vector<double> center, double radius) {
    RoiBall b;
    b.center = std::move(center);
    b.r_in = b.r_out = radius;
    b.lambda_in = b.lambda_out = 0.0;
    b.bootstrap = true;
    return b;
}

std::vector<double> weighted_center(const DataSet& ds, const Subgraph& xhat) {
    std::vector<double> c(static_cast<std::size_t>(ds.dim()), 0.0);
    for (std::size_t t = 0; t < xhat.support.size(); ++t) {
        const auto pt = ds.point(xhat.support[t]);
        const double w = xhat.weights[t];
        for (std::int32_t q = 0; q < ds.dim(); ++q) c[q] += w * static_cast<double>(pt[q]);
    }
    return c;
}

RoiBall build_ball(const DataSet& ds, const Subgraph& xhat) {
    return build_ball(ds, xhat, density(ds, xhat));
}

RoiBall build_ball(const DataSet& ds, const Subgraph& xhat, double pi_hint) {
    if (!(pi_hint > 0.0)) throw ZeroDensity("cannot build a ball around a zero-density subgraph");
    RoiBall b;
    b.center = weighted_center(ds, xhat);
    const double k = ds.kernel().k;
    double lin = 0.0, lout = 0.0;
    for (std::size_t t = 0; t < xhat.support.size(); ++t) {
        const double d = ds.distance_to(xhat.support[t], b.center.data());
        lin += xhat.weights[t] * std::exp(-k * d);
        lout += xhat.weights[t] * std::exp(k * d);
    }
    b.lambda_in = lin;
    b.lambda_out = lout;
    b.r_in = std::log(lin / pi_hint) / k;
    b.r_out = std::log(lout / pi_hint) / k;
    return b;
}

bool contains(const RoiBall& ball, int c, const DataSet& ds, std::int32_t j) {
    return ds.distance_to(j, ball.center.data()) <= ball.radius_at(c);
}

} // namespace alid
