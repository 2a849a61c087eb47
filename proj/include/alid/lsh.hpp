#pragma once

#include "alid/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace alid {

struct LshParams {
    int mu = 40;           // projections concatenated per table
    int tables = 50;       // hash tables
    double r = 1.0;        // quantization width of each projection
    std::uint64_t seed = 0;
};

// p-stable (Gaussian) LSH over an indexed point set. Every query is itself an
// indexed point, so hash keys are only needed transiently at build time; the
// index keeps the bucket membership lists plus an inverted point-to-bucket
// map, and supports logical removal with lazy compaction for peeling.
class LshIndex {
public:
    LshIndex(const DataSet& ds, LshParams params);

    const LshParams& params() const { return params_; }
    std::int64_t size() const { return n_; }
    std::int64_t live_count() const { return live_; }
    bool is_removed(std::int32_t i) const;

    // Union of the query point's buckets across tables, excluding the query
    // itself and removed points. Sorted, unique. Throws NotIndexed for a
    // removed or unknown id.
    std::vector<std::int32_t> query(std::int32_t i) const;

    // Raw append variant used by the candidate search (may contain duplicates).
    void collect_collisions(std::int32_t i, std::vector<std::int32_t>& out) const;

    // Logical removal; idempotent. Buckets compact once >25% of their members
    // are dead.
    void remove_points(std::span<const std::int32_t> ids);

    struct BucketStat {
        int table = 0;
        std::int64_t bucket = 0;
        std::int64_t live_size = 0;
    };
    std::vector<BucketStat> bucket_stats() const;

    // Live members of one bucket, in id order.
    std::vector<std::int32_t> bucket_members(int table, std::int64_t bucket) const;

    void save(const std::string& path) const;
    static LshIndex load(const std::string& path, const DataSet& ds);

private:
    LshIndex() = default;
    void check_indexed(std::int32_t i) const;

    LshParams params_;
    std::int64_t n_ = 0;
    std::int32_t d_ = 0;
    std::int64_t live_ = 0;
    std::vector<std::vector<std::vector<std::int32_t>>> buckets_; // [table][ordinal] -> members
    std::vector<std::vector<std::int32_t>> dead_;                 // [table][ordinal] -> dead count
    std::vector<std::int32_t> inverted_;                          // [i * tables + t] -> ordinal
    std::vector<std::uint8_t> removed_;
};

} // namespace alid
