#pragma once

#include "alid/dataset.hpp"
#include "alid/lid.hpp"
#include "alid/lsh.hpp"
#include "alid/roi.hpp"
#include "alid/subgraph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace alid {

struct CivsConfig {
    int delta = 800; // cap on fresh candidates admitted per round
};

struct CandidateSet {
    std::vector<std::int32_t> ids;  // sorted by (distance to center, id)
    std::vector<double> dist;       // aligned distances to the ball center
};

// Multi-query collision search from every support point, filtered to the
// working ball, minus the support itself and any excluded vertices. When more
// than delta candidates survive, the delta closest to the center are kept
// (ties broken by smaller id).
CandidateSet retrieve_candidates(const DataSet& ds, const LshIndex& index, const Subgraph& xhat,
                                 const RoiBall& ball, int c, const CivsConfig& cfg,
                                 const std::vector<std::uint8_t>* excluded = nullptr);

// Replaces the working range with support + psi: retrieval leftovers from the
// previous round are dropped, cached support columns are restricted to the
// surviving rows and extended over psi, and ax gains one fresh row per
// candidate. Exactly |psi| * |support| kernel evaluations.
void update_range(const DataSet& ds, LidState& st, std::span<const std::int32_t> psi);

} // namespace alid
