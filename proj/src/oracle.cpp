#include "alid/oracle.hpp"

#include "alid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace alid::oracle {

DenseAffinity build_dense(const DataSet& ds) {
    const std::int64_t n = ds.size();
    if (n > 5000) throw TooLarge("dense affinity limited to n <= 5000, got " + std::to_string(n));
    DenseAffinity a(n);
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = i + 1; j < n; ++j) {
            const double v = ds.affinity(i, j);
            a.at(i, j) = v;
            a.at(j, i) = v;
        }
    }
    return a;
}

namespace {

struct DenseState {
    std::vector<double> x;
    std::vector<double> ax;
    std::vector<std::int32_t> support; // sorted indices with x > 0
    double pi = 0.0;
};

void dense_refresh_pi(DenseState& st) {
    double pi = 0.0;
    for (std::int32_t i : st.support) pi += st.x[i] * st.ax[i];
    st.pi = pi;
}

void dense_apply(const DenseAffinity& a, DenseState& st, std::int32_t i, double g) {
    const std::int64_t n = a.size();
    for (std::int64_t t = 0; t < n; ++t) {
        st.x[t] *= (1.0 - g);
        st.ax[t] = st.ax[t] + g * (a.at(static_cast<std::int32_t>(t), i) - st.ax[t]);
    }
    st.x[i] += g;
    // rebuild support, prune dust with exact removal
    std::vector<std::int32_t> supp;
    supp.reserve(st.support.size() + 1);
    std::vector<std::int32_t> seen = st.support;
    if (!std::binary_search(seen.begin(), seen.end(), i)) {
        seen.insert(std::lower_bound(seen.begin(), seen.end(), i), i);
    }
    for (std::int32_t v : seen) {
        if (st.x[v] < 1e-12) {
            const double w = st.x[v];
            if (w > 0.0) {
                for (std::int64_t t = 0; t < n; ++t)
                    st.ax[t] -= w * a.at(static_cast<std::int32_t>(t), v);
            }
            st.x[v] = 0.0;
        } else {
            supp.push_back(v);
        }
    }
    double total = 0.0;
    for (std::int32_t v : supp) total += st.x[v];
    if (!(total > 0.0)) throw ZeroDensity("all mass pruned");
    if (std::abs(total - 1.0) > 1e-15) {
        for (std::int32_t v : supp) st.x[v] /= total;
        for (std::int64_t t = 0; t < n; ++t) st.ax[t] /= total;
    }
    st.support = std::move(supp);
    dense_refresh_pi(st);
}

} // namespace

IidResult run_iid_full(const DenseAffinity& a, std::int32_t seed_vertex, double gap_eps,
                       int max_iters, const std::vector<std::uint8_t>* active) {
    const std::int64_t n = a.size();
    if (seed_vertex < 0 || seed_vertex >= n) throw IndexOutOfRange("seed out of range");
    if (active && !(*active)[seed_vertex]) throw SeedExcluded("seed is not active");

    DenseState st;
    st.x.assign(n, 0.0);
    st.ax.assign(n, 0.0);
    st.x[seed_vertex] = 1.0;
    st.support = {seed_vertex};
    for (std::int32_t t = 0; t < n; ++t) st.ax[t] = a.at(t, seed_vertex);
    st.pi = 0.0;

    IidResult res;
    int it = 0;
    for (; it < max_iters; ++it) {
        // selection: argmax |gap| over infective vertices and immunizable support
        std::int32_t best = -1;
        double best_abs = 0.0;
        bool best_infect = true;
        for (std::int32_t v = 0; v < n; ++v) {
            if (active && !(*active)[v]) continue;
            const double gap = st.ax[v] - st.pi;
            const bool infective = gap > gap_eps;
            const bool immunizable = gap < -gap_eps && st.x[v] > 0.0;
            if (!infective && !immunizable) continue;
            const double mag = std::abs(gap);
            if (mag > best_abs) {
                best_abs = mag;
                best = v;
                best_infect = infective;
            }
        }
        if (best < 0) {
            res.converged = true;
            break;
        }
        const double gap = st.ax[best] - st.pi;
        const double h = st.pi - 2.0 * st.ax[best];
        double g;
        if (best_infect) {
            g = (h < 0.0) ? std::min(gap / (-h), 1.0) : 1.0;
        } else {
            const double w = st.x[best];
            if (w >= 1.0) throw ImmunizeSingleton("cannot immunize a full-weight vertex");
            const double c = w / (w - 1.0);
            const double num = c * gap;
            const double den = c * c * h;
            const double eps = (den < 0.0) ? std::min(-num / den, 1.0) : 1.0;
            g = eps * c;
        }
        dense_apply(a, st, best, g);
    }
    res.iters = it;

    double max_gap = -std::numeric_limits<double>::infinity();
    for (std::int32_t v = 0; v < n; ++v) {
        if (active && !(*active)[v]) continue;
        max_gap = std::max(max_gap, st.ax[v] - st.pi);
    }
    res.max_gap = max_gap;
    res.pi = st.pi;
    std::vector<double> w;
    w.reserve(st.support.size());
    for (std::int32_t v : st.support) w.push_back(st.x[v]);
    res.x = Subgraph::from_weights(st.support, std::move(w));
    return res;
}

Subgraph run_replicator(const DenseAffinity& a, const Subgraph& x0, int iters) {
    const std::int64_t n = a.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t t = 0; t < x0.support.size(); ++t) x[x0.support[t]] = x0.weights[t];
    for (int it = 0; it < iters; ++it) {
        std::vector<double> ax(n, 0.0);
        for (std::int32_t i = 0; i < n; ++i) {
            if (x[i] == 0.0) continue;
            for (std::int32_t j = 0; j < n; ++j) ax[j] += a.at(j, i) * x[i];
        }
        double pi = 0.0;
        for (std::int32_t j = 0; j < n; ++j) pi += x[j] * ax[j];
        if (!(pi > 0.0)) {
            if (it == 0) throw DegenerateStart("replicator start has zero payoff");
            break; // stuck on a zero-payoff face
        }
        for (std::int32_t j = 0; j < n; ++j) x[j] = x[j] * ax[j] / pi;
    }
    std::vector<std::int32_t> supp;
    std::vector<double> w;
    for (std::int32_t j = 0; j < n; ++j) {
        if (x[j] > 0.0) {
            supp.push_back(j);
            w.push_back(x[j]);
        }
    }
    return Subgraph::from_weights(std::move(supp), std::move(w));
}

std::vector<std::int32_t> exact_range_query(const DataSet& ds, std::span<const double> center,
                                            double radius) {
    if (static_cast<std::int32_t>(center.size()) != ds.dim())
        throw FormatError("center dimension mismatch");
    std::vector<std::int32_t> out;
    for (std::int32_t i = 0; i < ds.size(); ++i) {
        if (ds.distance_to(i, center.data()) <= radius) out.push_back(i);
    }
    return out;
}

std::vector<DenseCluster> dense_detect_all(const DataSet& ds, const DenseAffinity& a,
                                           double density_threshold, double gap_eps,
                                           int max_iters) {
    const std::int64_t n = a.size();
    std::vector<std::uint8_t> active(n, 1);
    std::vector<DenseCluster> kept;
    std::int64_t next_label = 0;
    std::int32_t cursor = 0;
    std::int64_t remaining = n;
    while (remaining > 0) {
        while (cursor < n && !active[cursor]) ++cursor;
        if (cursor >= n) break;
        IidResult r = run_iid_full(a, cursor, gap_eps, max_iters, &active);
        for (std::int32_t v : r.x.support) {
            active[v] = 0;
            --remaining;
        }
        if (r.pi >= density_threshold) {
            DenseCluster c;
            c.label = next_label++;
            c.pi = r.pi;
            c.members = r.x;
            kept.push_back(std::move(c));
        }
    }
    (void)ds;
    return kept;
}

} // namespace alid::oracle
