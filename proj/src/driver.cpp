#include "alid/driver.hpp"

#include "alid/errors.hpp"
#include "alid/roi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace alid {

ClusterResult detect_one(const DataSet& ds, const LshIndex& index, const AlidConfig& cfg,
                         std::int32_t seed_vertex, const std::vector<std::uint8_t>* excluded,
                         std::vector<StepReport>* lid_trace) {
    if (excluded && (*excluded)[static_cast<std::size_t>(seed_vertex)])
        throw SeedExcluded("seed " + std::to_string(seed_vertex) + " is excluded");
    if (index.is_removed(seed_vertex))
        throw SeedExcluded("seed " + std::to_string(seed_vertex) + " was removed from the index");

    LidState st = LidState::seed(seed_vertex);
    ClusterResult res;
    for (int c = 1; c <= cfg.max_rounds; ++c) {
        res.rounds_used = c;
        const LidRunResult lr = run_lid(ds, st, cfg.lid, lid_trace);

        RoiBall ball = [&] {
            try {
                return build_ball(ds, st.x, st.pi);
            } catch (const ZeroDensity&) {
                return RoiBall::bootstrap_ball(weighted_center(ds, st.x), cfg.bootstrap_radius);
            }
        }();

        const CandidateSet psi =
            retrieve_candidates(ds, index, st.x, ball, c, cfg.civs, excluded);
        update_range(ds, st, psi.ids);

        double max_gap = -std::numeric_limits<double>::infinity();
        for (std::int32_t j : psi.ids) {
            const std::int64_t p = st.pos_of(j);
            max_gap = std::max(max_gap, st.ax[static_cast<std::size_t>(p)] - st.pi);
        }

        // the working ball must have swept (almost) the whole outer ball
        // before an empty infective set proves anything global
        const bool roi_mature =
            !ball.bootstrap && ball.radius_at(c) >= ball.r_out * (1.0 - 1e-6);
        const bool no_infective = psi.ids.empty() || max_gap <= cfg.lid.gap_eps;

        if (cfg.collect_round_trace) {
            RoundTrace tr;
            tr.c = c;
            tr.bootstrap = ball.bootstrap;
            tr.radius = ball.radius_at(c);
            tr.psi_size = static_cast<int>(psi.ids.size());
            tr.max_psi_gap = psi.ids.empty() ? 0.0 : max_gap;
            tr.support_size = static_cast<int>(st.x.size());
            tr.pi = st.pi;
            tr.lid_iters = lr.iters;
            res.rounds.push_back(tr);
        }

        if (no_infective && roi_mature) {
            res.converged = true;
            break;
        }
    }
    res.density = st.pi;
    res.members = st.x;
    res.support_touched = static_cast<std::int64_t>(st.touched.size());
    res.label = seed_vertex;
    return res;
}

std::vector<ClusterResult> detect_all(const DataSet& ds, LshIndex& index, const AlidConfig& cfg) {
    const std::int64_t n = ds.size();
    std::vector<std::uint8_t> excluded(static_cast<std::size_t>(n), 0);
    std::vector<ClusterResult> kept;
    std::int64_t next_label = 0;
    for (std::int32_t seed = 0; seed < n; ++seed) {
        if (excluded[static_cast<std::size_t>(seed)]) continue;
        ClusterResult r = detect_one(ds, index, cfg, seed, &excluded);
        for (std::int32_t v : r.members.support) excluded[static_cast<std::size_t>(v)] = 1;
        index.remove_points(r.members.support);
        if (r.density >= cfg.density_threshold) {
            r.label = next_label++;
            kept.push_back(std::move(r));
        }
    }
    return kept;
}

void write_clusters_jsonl(const std::string& path, const std::vector<ClusterResult>& clusters) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    for (const ClusterResult& c : clusters) {
        nlohmann::ordered_json j;
        j["label"] = c.label;
        j["density"] = c.density;
        j["support"] = c.members.support;
        j["weights"] = c.members.weights;
        j["converged"] = c.converged;
        out << j.dump() << '\n';
    }
    if (!out) throw FormatError("short write to " + path);
}

std::vector<ClusterResult> read_clusters_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<ClusterResult> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            ClusterResult c;
            c.label = j.at("label").get<std::int64_t>();
            c.density = j.at("density").get<double>();
            c.converged = j.at("converged").get<bool>();
            c.members.support = j.at("support").get<std::vector<std::int32_t>>();
            c.members.weights = j.at("weights").get<std::vector<double>>();
            out.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path + ": " + e.what());
        }
    }
    return out;
}

} // namespace alid
