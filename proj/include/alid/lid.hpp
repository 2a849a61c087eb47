#pragma once

#include "alid/dataset.hpp"
#include "alid/subgraph.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace alid {

struct LidConfig {
    int max_iters = 1000;        // step budget per localized run
    double gap_eps = 1e-7;       // payoff gap considered zero below this
    double stability_eps = 1e-9; // stop when one step moves pi less than this
};

enum class MoveKind { Infect, Immunize };

struct Selection {
    std::int32_t index = -1;
    MoveKind kind = MoveKind::Infect;
    double gap = 0.0; // pi(s_i - x, x), sign matches kind
};

struct StepReport {
    int iteration = 0;
    bool converged = false; // no selectable vertex; state untouched
    std::optional<Selection> sel;
    double epsilon = 0.0;          // invasion share
    double coeff = 0.0;            // signed mixing coefficient applied to s_i
    double pi_before = 0.0;
    double delta_pi = 0.0;         // closed-form payoff increase of the invasion
    double pi_after = 0.0;         // pi_before + delta_pi (pre-prune)
    double invader_gap_after = 0.0; // payoff_gap of the invader against the new state
    bool column_fetched = false;
};

// Working state of a localized run: the retrieved range beta (sorted global
// indices), the simplex vector x supported inside beta, the maintained
// product ax = (A restricted to beta x support) * x, and cached affinity
// columns over beta for every vertex that ever needed one.
struct LidState {
    std::vector<std::int32_t> beta;
    Subgraph x;
    std::vector<double> ax;
    std::unordered_map<std::int32_t, std::vector<double>> columns;
    double pi = 0.0;
    std::unordered_set<std::int32_t> touched; // every vertex that ever held weight

    static LidState seed(std::int32_t seed_vertex);

    std::int64_t pos_of(std::int32_t id) const; // -1 if absent
    void validate(const DataSet& ds) const;     // debug invariant checks (O(b^2 d))
};

std::optional<Selection> select_vertex(const LidState& st, const LidConfig& cfg);

// Invasion share for the selected move. Throws ImmunizeSingleton when asked
// to immunize a vertex carrying all the mass.
double invasion_share(const LidState& st, const Selection& sel);

// One infect-or-immunize step. Mutates the state; no-op when converged.
StepReport lid_step(const DataSet& ds, LidState& st, const LidConfig& cfg, int iteration);

struct LidRunResult {
    int iters = 0;
    bool converged = false; // true iff the last selection came back empty
    double pi = 0.0;
};

LidRunResult run_lid(const DataSet& ds, LidState& st, const LidConfig& cfg,
                     std::vector<StepReport>* trace = nullptr);

// Fresh recomputation of ax from the dataset (test aid for drift checks).
std::vector<double> scratch_ax(const DataSet& ds, const LidState& st);

} // namespace alid
