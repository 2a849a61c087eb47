#include "alid/civs.hpp"

#include "alid/errors.hpp"

#include <algorithm>
#include <numeric>

namespace alid {

CandidateSet retrieve_candidates(const DataSet& ds, const LshIndex& index, const Subgraph& xhat,
                                 const RoiBall& ball, int c, const CivsConfig& cfg,
                                 const std::vector<std::uint8_t>* excluded) {
    std::vector<std::int32_t> raw;
    for (std::int32_t s : xhat.support) index.collect_collisions(s, raw);
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    const double radius = ball.radius_at(c);
    CandidateSet out;
    for (std::int32_t j : raw) {
        if (excluded && (*excluded)[static_cast<std::size_t>(j)]) continue;
        if (xhat.contains(j)) continue;
        const double d = ds.distance_to(j, ball.center.data());
        if (d > radius) continue;
        out.ids.push_back(j);
        out.dist.push_back(d);
    }

    std::vector<std::size_t> order(out.ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out.dist[a] != out.dist[b]) return out.dist[a] < out.dist[b];
        return out.ids[a] < out.ids[b];
    });
    const std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(cfg.delta));
    CandidateSet trimmed;
    trimmed.ids.reserve(keep);
    trimmed.dist.reserve(keep);
    for (std::size_t t = 0; t < keep; ++t) {
        trimmed.ids.push_back(out.ids[order[t]]);
        trimmed.dist.push_back(out.dist[order[t]]);
    }
    return trimmed;
}

namespace {

// positions of the sorted subset `items` inside the sorted vector `within`
std::vector<std::size_t> positions_of(const std::vector<std::int32_t>& items,
                                      const std::vector<std::int32_t>& within) {
    std::vector<std::size_t> pos(items.size());
    std::size_t p = 0;
    for (std::size_t q = 0; q < items.size(); ++q) {
        while (p < within.size() && within[p] != items[q]) ++p;
        if (p == within.size()) throw Error("range update lost a vertex");
        pos[q] = p;
    }
    return pos;
}

} // namespace

void update_range(const DataSet& ds, LidState& st, std::span<const std::int32_t> psi) {
    const std::vector<std::int32_t>& alpha = st.x.support;

    std::vector<std::int32_t> fresh(psi.begin(), psi.end());
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    // candidates already in the support carry no new information
    fresh.erase(std::remove_if(fresh.begin(), fresh.end(),
                               [&](std::int32_t j) { return st.x.contains(j); }),
                fresh.end());

    std::vector<std::int32_t> nbeta(alpha.size() + fresh.size());
    std::merge(alpha.begin(), alpha.end(), fresh.begin(), fresh.end(), nbeta.begin());

    const std::vector<std::size_t> alpha_old = positions_of(alpha, st.beta);
    const std::vector<std::size_t> alpha_new = positions_of(alpha, nbeta);
    const std::vector<std::size_t> fresh_new = positions_of(fresh, nbeta);

    std::vector<double> nax(nbeta.size(), 0.0);
    for (std::size_t q = 0; q < alpha.size(); ++q) nax[alpha_new[q]] = st.ax[alpha_old[q]];

    // restrict cached support columns to the surviving rows; leftovers from
    // the previous retrieval are dropped with their cache entries
    std::unordered_map<std::int32_t, std::vector<double>> ncols;
    ncols.reserve(alpha.size());
    for (std::size_t q = 0; q < alpha.size(); ++q) {
        const auto src = st.columns.find(alpha[q]);
        if (src == st.columns.end()) throw Error("support column missing during range update");
        std::vector<double> dst(nbeta.size(), 0.0);
        for (std::size_t q2 = 0; q2 < alpha.size(); ++q2)
            dst[alpha_new[q2]] = src->second[alpha_old[q2]];
        ncols.emplace(alpha[q], std::move(dst));
    }

    // fresh rows: one kernel evaluation per (candidate, support) pair, reused
    // for both the ax row and the support column extension
    for (std::size_t q = 0; q < alpha.size(); ++q) {
        auto& col = ncols[alpha[q]];
        const std::int32_t s = alpha[q];
        const double w = st.x.weights[q];
        for (std::size_t f = 0; f < fresh.size(); ++f) {
            const double a = ds.affinity(fresh[f], s);
            col[fresh_new[f]] = a;
            nax[fresh_new[f]] += a * w;
        }
    }

    st.beta = std::move(nbeta);
    st.ax = std::move(nax);
    st.columns = std::move(ncols);
}

} // namespace alid
