#pragma once

#include "alid/driver.hpp"
#include "alid/lsh.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace alid {

struct TaskList {
    std::vector<std::int32_t> seeds;
};

// Uniform sample (without replacement) from every hash bucket holding more
// than min_bucket live items; duplicates across buckets are dropped, keeping
// first discovery order. Deterministic for a fixed index and rng seed.
TaskList build_tasklist(const LshIndex& index, double sample_rate = 0.2, int min_bucket = 5,
                        std::uint64_t rng_seed = 0);

struct Assignment {
    std::vector<std::int32_t> items;   // sorted
    std::vector<std::int64_t> labels;  // winning cluster per item
    std::vector<double> densities;     // density of the winning cluster
};

struct PalidResult {
    std::vector<ClusterResult> clusters; // threshold-filtered, merged, dense labels
    Assignment assignment;
    std::vector<std::pair<std::int32_t, std::string>> failures; // (seed, error)
};

// Concurrent detection over the tasklist (no peeling), then a deterministic
// reduce: below-threshold results are dropped, identical supports merge, and
// each item keeps its maximum-density cluster (ties to the smaller label).
// The outcome is identical for any worker count.
PalidResult run_palid(const DataSet& ds, const LshIndex& index, const AlidConfig& cfg,
                      int workers, const TaskList& tasks);

void write_assignment_jsonl(const std::string& path, const Assignment& a);
Assignment read_assignment_jsonl(const std::string& path);

} // namespace alid
