#pragma once

#include "alid/civs.hpp"
#include "alid/dataset.hpp"
#include "alid/lid.hpp"
#include "alid/lsh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace alid {

struct AlidConfig {
    LidConfig lid;
    CivsConfig civs;
    int max_rounds = 10;            // range growth rounds per detection
    double bootstrap_radius = 0.4;  // working radius before any density exists
    double density_threshold = 0.75;
    bool collect_round_trace = false;
};

struct RoundTrace {
    int c = 0;
    bool bootstrap = false;
    double radius = 0.0;
    int psi_size = 0;
    double max_psi_gap = 0.0;
    int support_size = 0;
    double pi = 0.0;
    int lid_iters = 0;
};

struct ClusterResult {
    std::int64_t label = -1;
    double density = 0.0;
    Subgraph members;
    int rounds_used = 0;
    bool converged = false; // true iff the last round proved no infective candidate remains
    std::int64_t support_touched = 0;
    std::vector<RoundTrace> rounds; // filled when collect_round_trace is set
};

// Grow-and-converge detection from one seed vertex. `excluded` marks vertices
// that may not be retrieved (peeled by earlier detections).
ClusterResult detect_one(const DataSet& ds, const LshIndex& index, const AlidConfig& cfg,
                         std::int32_t seed_vertex,
                         const std::vector<std::uint8_t>* excluded = nullptr,
                         std::vector<StepReport>* lid_trace = nullptr);

// Peeling loop: detect from the smallest unpeeled seed, retire the support,
// keep clusters at or above the density threshold. Labels are dense in
// detection order.
std::vector<ClusterResult> detect_all(const DataSet& ds, LshIndex& index, const AlidConfig& cfg);

void write_clusters_jsonl(const std::string& path, const std::vector<ClusterResult>& clusters);
std::vector<ClusterResult> read_clusters_jsonl(const std::string& path);

} // namespace alid
