#include "alid/lsh.hpp"

#include "alid/errors.hpp"
#include "alid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace alid {

namespace {

constexpr char kMagic[4] = {'A', 'L', 'S', 'H'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("truncated index file");
    return v;
}

} // namespace

LshIndex::LshIndex(const DataSet& ds, LshParams params) : params_(params) {
    if (params_.mu <= 0 || params_.tables <= 0) throw InfeasibleSpec("mu and tables must be positive");
    if (!(params_.r > 0.0)) throw InfeasibleSpec("projection width r must be positive");
    n_ = ds.size();
    d_ = ds.dim();
    live_ = n_;
    removed_.assign(static_cast<std::size_t>(n_), 0);
    inverted_.assign(static_cast<std::size_t>(n_) * params_.tables, -1);
    buckets_.resize(params_.tables);
    dead_.resize(params_.tables);

    Rng rng(params_.seed);
    const std::size_t proj_len = static_cast<std::size_t>(params_.mu) * d_;
    std::vector<double> proj(proj_len);
    std::vector<double> offs(static_cast<std::size_t>(params_.mu));
    std::vector<std::int64_t> key(static_cast<std::size_t>(params_.mu));

    for (int t = 0; t < params_.tables; ++t) {
        for (double& v : proj) v = rng.next_gaussian();
        for (double& v : offs) v = rng.uniform(0.0, params_.r);

        // transient key -> bucket ordinal map; keys are not kept afterwards
        std::unordered_map<std::string, std::int32_t> ordinal_of;
        ordinal_of.reserve(static_cast<std::size_t>(n_));
        auto& tbuckets = buckets_[t];
        for (std::int64_t i = 0; i < n_; ++i) {
            const auto pt = ds.point(static_cast<std::int32_t>(i));
            for (int m = 0; m < params_.mu; ++m) {
                const double* a = proj.data() + static_cast<std::size_t>(m) * d_;
                double dot = 0.0;
                for (std::int32_t q = 0; q < d_; ++q) dot += a[q] * static_cast<double>(pt[q]);
                key[static_cast<std::size_t>(m)] =
                    static_cast<std::int64_t>(std::floor((dot + offs[static_cast<std::size_t>(m)]) / params_.r));
            }
            std::string kb(reinterpret_cast<const char*>(key.data()), key.size() * sizeof(std::int64_t));
            auto [it, fresh] = ordinal_of.try_emplace(std::move(kb),
                                                      static_cast<std::int32_t>(tbuckets.size()));
            if (fresh) tbuckets.emplace_back();
            tbuckets[static_cast<std::size_t>(it->second)].push_back(static_cast<std::int32_t>(i));
            inverted_[static_cast<std::size_t>(i) * params_.tables + t] = it->second;
        }
        dead_[t].assign(tbuckets.size(), 0);
    }
}

void LshIndex::check_indexed(std::int32_t i) const {
    if (i < 0 || i >= n_) throw NotIndexed("id " + std::to_string(i) + " was never indexed");
    if (removed_[static_cast<std::size_t>(i)])
        throw NotIndexed("id " + std::to_string(i) + " has been removed");
}

void LshIndex::collect_collisions(std::int32_t i, std::vector<std::int32_t>& out) const {
    check_indexed(i);
    for (int t = 0; t < params_.tables; ++t) {
        const std::int32_t b = inverted_[static_cast<std::size_t>(i) * params_.tables + t];
        for (std::int32_t m : buckets_[t][static_cast<std::size_t>(b)]) {
            if (m != i && !removed_[static_cast<std::size_t>(m)]) out.push_back(m);
        }
    }
}

std::vector<std::int32_t> LshIndex::query(std::int32_t i) const {
    std::vector<std::int32_t> out;
    collect_collisions(i, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool LshIndex::is_removed(std::int32_t i) const {
    if (i < 0 || i >= n_) throw NotIndexed("id " + std::to_string(i) + " was never indexed");
    return removed_[static_cast<std::size_t>(i)] != 0;
}

void LshIndex::remove_points(std::span<const std::int32_t> ids) {
    for (std::int32_t i : ids) {
        if (i < 0 || i >= n_) throw NotIndexed("id " + std::to_string(i) + " was never indexed");
        if (removed_[static_cast<std::size_t>(i)]) continue; // idempotent
        removed_[static_cast<std::size_t>(i)] = 1;
        --live_;
        for (int t = 0; t < params_.tables; ++t) {
            const std::int32_t b = inverted_[static_cast<std::size_t>(i) * params_.tables + t];
            auto& bucket = buckets_[t][static_cast<std::size_t>(b)];
            std::int32_t& dead = dead_[t][static_cast<std::size_t>(b)];
            ++dead;
            if (dead * 4 > static_cast<std::int32_t>(bucket.size())) {
                bucket.erase(std::remove_if(bucket.begin(), bucket.end(),
                                            [&](std::int32_t m) {
                                                return removed_[static_cast<std::size_t>(m)] != 0;
                                            }),
                             bucket.end());
                dead = 0;
            }
        }
    }
}

std::vector<LshIndex::BucketStat> LshIndex::bucket_stats() const {
    std::vector<BucketStat> out;
    for (int t = 0; t < params_.tables; ++t) {
        for (std::size_t b = 0; b < buckets_[t].size(); ++b) {
            BucketStat s;
            s.table = t;
            s.bucket = static_cast<std::int64_t>(b);
            s.live_size = static_cast<std::int64_t>(buckets_[t][b].size()) - dead_[t][b];
            out.push_back(s);
        }
    }
    return out;
}

std::vector<std::int32_t> LshIndex::bucket_members(int table, std::int64_t bucket) const {
    if (table < 0 || table >= params_.tables) throw IndexOutOfRange("table out of range");
    if (bucket < 0 || bucket >= static_cast<std::int64_t>(buckets_[table].size()))
        throw IndexOutOfRange("bucket out of range");
    std::vector<std::int32_t> out;
    for (std::int32_t m : buckets_[table][static_cast<std::size_t>(bucket)]) {
        if (!removed_[static_cast<std::size_t>(m)]) out.push_back(m);
    }
    return out;
}

void LshIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(params_.mu));
    put(out, static_cast<std::uint32_t>(params_.tables));
    put(out, params_.r);
    put(out, params_.seed);
    put(out, static_cast<std::uint32_t>(d_));
    put(out, static_cast<std::uint64_t>(n_));
    for (int t = 0; t < params_.tables; ++t) {
        put(out, static_cast<std::uint64_t>(buckets_[t].size()));
        for (const auto& bucket : buckets_[t]) {
            // persist live members only; dead entries are an in-memory artifact
            std::uint64_t live = 0;
            for (std::int32_t m : bucket)
                if (!removed_[static_cast<std::size_t>(m)]) ++live;
            put(out, live);
            for (std::int32_t m : bucket)
                if (!removed_[static_cast<std::size_t>(m)]) put(out, m);
        }
    }
    std::uint64_t removed_count = static_cast<std::uint64_t>(n_ - live_);
    put(out, removed_count);
    for (std::int32_t i = 0; i < n_; ++i)
        if (removed_[static_cast<std::size_t>(i)]) put(out, i);
    if (!out) throw FormatError("short write to " + path);
}

LshIndex LshIndex::load(const std::string& path, const DataSet& ds) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not an index file: " + path);
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw FormatError("unsupported index version " + std::to_string(version));

    LshIndex idx;
    idx.params_.mu = static_cast<int>(get<std::uint32_t>(in));
    idx.params_.tables = static_cast<int>(get<std::uint32_t>(in));
    idx.params_.r = get<double>(in);
    idx.params_.seed = get<std::uint64_t>(in);
    idx.d_ = static_cast<std::int32_t>(get<std::uint32_t>(in));
    idx.n_ = static_cast<std::int64_t>(get<std::uint64_t>(in));
    if (idx.d_ != ds.dim() || idx.n_ != ds.size())
        throw FormatError("index shape does not match the dataset");

    idx.removed_.assign(static_cast<std::size_t>(idx.n_), 0);
    idx.inverted_.assign(static_cast<std::size_t>(idx.n_) * idx.params_.tables, -1);
    idx.buckets_.resize(idx.params_.tables);
    idx.dead_.resize(idx.params_.tables);
    for (int t = 0; t < idx.params_.tables; ++t) {
        const auto nb = get<std::uint64_t>(in);
        idx.buckets_[t].resize(nb);
        idx.dead_[t].assign(nb, 0);
        for (std::uint64_t b = 0; b < nb; ++b) {
            const auto m = get<std::uint64_t>(in);
            auto& bucket = idx.buckets_[t][b];
            bucket.resize(m);
            for (std::uint64_t q = 0; q < m; ++q) {
                bucket[q] = get<std::int32_t>(in);
                if (bucket[q] < 0 || bucket[q] >= idx.n_) throw FormatError("member id out of range");
                idx.inverted_[static_cast<std::size_t>(bucket[q]) * idx.params_.tables + t] =
                    static_cast<std::int32_t>(b);
            }
        }
    }
    const auto removed_count = get<std::uint64_t>(in);
    idx.live_ = idx.n_ - static_cast<std::int64_t>(removed_count);
    for (std::uint64_t q = 0; q < removed_count; ++q) {
        const auto i = get<std::int32_t>(in);
        if (i < 0 || i >= idx.n_) throw FormatError("removed id out of range");
        idx.removed_[static_cast<std::size_t>(i)] = 1;
    }
    return idx;
}

} // namespace alid
