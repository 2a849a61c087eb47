#include "alid/palid.hpp"

#include "alid/errors.hpp"
#include "alid/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

#include <json.hpp>

namespace alid {

TaskList build_tasklist(const LshIndex& index, double sample_rate, int min_bucket,
                        std::uint64_t rng_seed) {
    if (!(sample_rate > 0.0) || sample_rate > 1.0)
        throw InfeasibleSpec("sample rate must be in (0, 1]");
    Rng rng(rng_seed);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(index.size()), 0);
    TaskList tl;
    for (const auto& stat : index.bucket_stats()) {
        if (stat.live_size <= min_bucket) continue;
        std::vector<std::int32_t> members = index.bucket_members(stat.table, stat.bucket);
        const std::size_t want = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(sample_rate * static_cast<double>(members.size()))));
        // partial Fisher-Yates: the first `want` slots are the sample
        for (std::size_t t = 0; t < want && t < members.size(); ++t) {
            const std::size_t pick =
                t + static_cast<std::size_t>(rng.next_below(members.size() - t));
            std::swap(members[t], members[pick]);
            const std::int32_t s = members[t];
            if (!seen[static_cast<std::size_t>(s)]) {
                seen[static_cast<std::size_t>(s)] = 1;
                tl.seeds.push_back(s);
            }
        }
    }
    return tl;
}

PalidResult run_palid(const DataSet& ds, const LshIndex& index, const AlidConfig& cfg,
                      int workers, const TaskList& tasks) {
    if (workers < 1) throw InfeasibleSpec("need at least one worker");
    const std::size_t ntasks = tasks.seeds.size();
    std::vector<std::optional<ClusterResult>> slots(ntasks);
    std::vector<std::string> errors(ntasks);
    std::atomic<std::size_t> cursor{0};

    auto body = [&] {
        for (;;) {
            const std::size_t t = cursor.fetch_add(1);
            if (t >= ntasks) return;
            try {
                slots[t] = detect_one(ds, index, cfg, tasks.seeds[t], nullptr);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }

    PalidResult out;
    // threshold filter happens before any merging or assignment
    std::map<std::vector<std::int32_t>, std::size_t> by_support;
    for (std::size_t t = 0; t < ntasks; ++t) {
        if (!slots[t]) {
            if (!errors[t].empty()) out.failures.emplace_back(tasks.seeds[t], errors[t]);
            continue;
        }
        ClusterResult& r = *slots[t];
        if (r.density < cfg.density_threshold) continue;
        auto [it, fresh] = by_support.try_emplace(r.members.support, out.clusters.size());
        if (fresh) {
            out.clusters.push_back(std::move(r));
        }
        // identical support from another seed merges into the first label
    }
    for (std::size_t t = 0; t < out.clusters.size(); ++t)
        out.clusters[t].label = static_cast<std::int64_t>(t);

    // reduce: per item keep the densest cluster, ties to the smaller label
    std::map<std::int32_t, std::pair<std::int64_t, double>> best;
    for (const ClusterResult& c : out.clusters) {
        for (std::int32_t v : c.members.support) {
            auto it = best.find(v);
            if (it == best.end() || c.density > it->second.second ||
                (c.density == it->second.second && c.label < it->second.first)) {
                best[v] = {c.label, c.density};
            }
        }
    }
    for (const auto& [item, win] : best) {
        out.assignment.items.push_back(item);
        out.assignment.labels.push_back(win.first);
        out.assignment.densities.push_back(win.second);
    }
    return out;
}

void write_assignment_jsonl(const std::string& path, const Assignment& a) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    for (std::size_t t = 0; t < a.items.size(); ++t) {
        nlohmann::ordered_json j;
        j["item"] = a.items[t];
        j["label"] = a.labels[t];
        j["density"] = a.densities[t];
        out << j.dump() << '\n';
    }
    if (!out) throw FormatError("short write to " + path);
}

Assignment read_assignment_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    Assignment a;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            a.items.push_back(j.at("item").get<std::int32_t>());
            a.labels.push_back(j.at("label").get<std::int64_t>());
            a.densities.push_back(j.at("density").get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path + ": " + e.what());
        }
    }
    return a;
}

} // namespace alid
