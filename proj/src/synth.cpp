#include "alid/synth.hpp"

#include "alid/errors.hpp"
#include "alid/memtrack.hpp"
#include "alid/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace alid::synth {

Regime regime_from_string(const std::string& s) {
    if (s == "prop" || s == "proportional") return Regime::Proportional;
    if (s == "sub" || s == "sublinear") return Regime::Sublinear;
    if (s == "cap" || s == "capped") return Regime::Capped;
    throw FormatError("unknown regime '" + s + "' (want prop|sub|cap)");
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Proportional: return "proportional";
    case Regime::Sublinear: return "sublinear";
    case Regime::Capped: return "capped";
    }
    return "?";
}

std::int64_t SynthSpec::a_star() const {
    if (clusters < 1) throw InfeasibleSpec("clusters must be >= 1");
    if (n < 1) throw InfeasibleSpec("n must be >= 1");
    double per = 0.0;
    switch (regime) {
    case Regime::Proportional:
        if (!(omega > 0.0) || omega > 1.0)
            throw InfeasibleSpec("omega must lie in (0, 1]");
        per = omega * static_cast<double>(n) / clusters;
        break;
    case Regime::Sublinear:
        if (!(eta > 0.0) || !(eta < 1.0))
            throw InfeasibleSpec("eta must lie in (0, 1)");
        per = std::pow(static_cast<double>(n), eta) / clusters;
        break;
    case Regime::Capped:
        if (cap < 1) throw InfeasibleSpec("cap must be >= 1");
        per = static_cast<double>(cap) / clusters;
        break;
    }
    const auto a = static_cast<std::int64_t>(std::floor(per));
    if (a < 1)
        throw InfeasibleSpec("cluster size comes out below 1 (n=" + std::to_string(n) + ")");
    if (a * clusters > n)
        throw InfeasibleSpec("clusters would need " + std::to_string(a * clusters) +
                             " points but n=" + std::to_string(n));
    return a;
}

Generated generate(const SynthSpec& spec) {
    const std::int64_t a = spec.a_star();
    const int K = spec.clusters;
    const int d = spec.d;
    if (d < 1) throw InfeasibleSpec("d must be >= 1");
    if (!(spec.cov_min >= 0.0) || !(spec.cov_max >= spec.cov_min))
        throw InfeasibleSpec("need 0 <= cov_min <= cov_max");

    Rng rng(spec.seed);

    // Per-cluster diagonal covariances, then unit-cube means; the means are
    // rescaled so the closest pair sits at 3x the mean RMS cluster radius.
    std::vector<double> var(static_cast<std::size_t>(K) * d);
    for (double& v : var) v = rng.uniform(spec.cov_min, spec.cov_max);

    std::vector<double> mean(static_cast<std::size_t>(K) * d);
    for (double& m : mean) m = rng.uniform(0.0, 1.0);

    double rho_bar = 0.0;
    for (int c = 0; c < K; ++c) {
        double s2 = 0.0;
        for (int q = 0; q < d; ++q) s2 += var[static_cast<std::size_t>(c) * d + q];
        rho_bar += std::sqrt(s2);
    }
    rho_bar /= K;
    if (!(rho_bar > 0.0)) throw InfeasibleSpec("cluster covariances are all zero");

    auto mean_dist = [&](int c1, int c2) {
        double s = 0.0;
        for (int q = 0; q < d; ++q) {
            const double t = mean[static_cast<std::size_t>(c1) * d + q] -
                             mean[static_cast<std::size_t>(c2) * d + q];
            s += t * t;
        }
        return std::sqrt(s);
    };

    if (K > 1) {
        double mnd = -1.0;
        for (int c1 = 0; c1 < K; ++c1)
            for (int c2 = c1 + 1; c2 < K; ++c2) {
                const double dist = mean_dist(c1, c2);
                if (mnd < 0.0 || dist < mnd) mnd = dist;
            }
        if (!(mnd > 0.0)) mnd = 1.0;
        const double scale = 3.0 * rho_bar / mnd;
        for (double& m : mean) m *= scale;
    }

    if (spec.overlap && K > 1) {
        // Pull the first K/4 disjoint pairs to half the base spacing.
        const double target = 1.5 * rho_bar;
        for (int t = 0; t + 1 < K && t / 2 < K / 4; t += 2) {
            const double dist = mean_dist(t, t + 1);
            if (!(dist > 0.0)) continue;
            const double f = target / dist;
            for (int q = 0; q < d; ++q) {
                const std::size_t lo = static_cast<std::size_t>(t) * d + q;
                const std::size_t hi = lo + d;
                mean[hi] = mean[lo] + (mean[hi] - mean[lo]) * f;
            }
        }
    }

    Generated out;
    out.vectors.n = spec.n;
    out.vectors.d = d;
    out.vectors.pts.resize(static_cast<std::size_t>(spec.n) * d);
    out.truth.labels.assign(static_cast<std::size_t>(spec.n), 0);
    out.truth.n_clusters = K;
    out.truth.mean_rms_radius = rho_bar;

    std::vector<double> lo(d, 0.0), hi(d, 0.0);
    std::size_t w = 0;
    for (int c = 0; c < K; ++c) {
        for (std::int64_t i = 0; i < a; ++i) {
            out.truth.labels[w / d] = c + 1;
            for (int q = 0; q < d; ++q, ++w) {
                const std::size_t cq = static_cast<std::size_t>(c) * d + q;
                const double v = mean[cq] + std::sqrt(var[cq]) * rng.next_gaussian();
                out.vectors.pts[w] = static_cast<float>(v);
                if (w / d == 0 || v < lo[q]) lo[q] = v;
                if (w / d == 0 || v > hi[q]) hi[q] = v;
            }
        }
    }

    // Noise fills the cluster bounding box inflated by 20%.
    for (int q = 0; q < d; ++q) {
        const double width = hi[q] - lo[q];
        const double pad = width > 0.0 ? 0.1 * width : 0.5;
        lo[q] -= pad;
        hi[q] += pad;
    }
    const std::int64_t noise = spec.n - a * K;
    for (std::int64_t i = 0; i < noise; ++i)
        for (int q = 0; q < d; ++q, ++w)
            out.vectors.pts[w] = static_cast<float>(rng.uniform(lo[q], hi[q]));

    return out;
}

void write_truth_json(const std::string& path, const GroundTruth& t) {
    nlohmann::ordered_json j;
    j["labels"] = t.labels;
    j["n_clusters"] = t.n_clusters;
    j["mean_rms_radius"] = t.mean_rms_radius;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for write: " + path);
    out << j.dump() << '\n';
}

GroundTruth read_truth_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array())
        throw FormatError(path + ": expected an object with a labels array");
    GroundTruth t;
    t.labels.reserve(j["labels"].size());
    for (const auto& v : j["labels"]) {
        if (!v.is_number_integer()) throw FormatError(path + ": labels must be integers");
        const auto l = v.get<std::int64_t>();
        if (l < 0) throw FormatError(path + ": labels must be >= 0");
        t.labels.push_back(static_cast<std::int32_t>(l));
        t.n_clusters = std::max(t.n_clusters, static_cast<int>(l));
    }
    if (j.contains("n_clusters")) t.n_clusters = j["n_clusters"].get<int>();
    if (j.contains("mean_rms_radius")) t.mean_rms_radius = j["mean_rms_radius"].get<double>();
    return t;
}

double avg_f(const GroundTruth& truth, const std::vector<ClusterResult>& clusters,
             std::vector<double>* per_cluster) {
    const int K = truth.n_clusters;
    if (per_cluster) per_cluster->assign(static_cast<std::size_t>(std::max(K, 0)), 0.0);
    if (K <= 0) return 0.0;

    std::vector<std::vector<std::int32_t>> members(static_cast<std::size_t>(K) + 1);
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        const std::int32_t l = truth.labels[i];
        if (l >= 1 && l <= K) members[static_cast<std::size_t>(l)].push_back(static_cast<std::int32_t>(i));
    }

    double total = 0.0;
    for (int c = 1; c <= K; ++c) {
        const auto& t = members[static_cast<std::size_t>(c)];
        double best = 0.0;
        for (const auto& det : clusters) {
            const auto& s = det.members.support;
            std::size_t ti = 0, si = 0, inter = 0;
            while (ti < t.size() && si < s.size()) {
                if (t[ti] < s[si]) ++ti;
                else if (s[si] < t[ti]) ++si;
                else { ++inter; ++ti; ++si; }
            }
            const double denom = static_cast<double>(t.size() + s.size());
            if (denom > 0.0) best = std::max(best, 2.0 * static_cast<double>(inter) / denom);
        }
        if (per_cluster) (*per_cluster)[static_cast<std::size_t>(c) - 1] = best;
        total += best;
    }
    return total / K;
}

double sparse_degree(const KernelCounter& counter, std::int64_t n) {
    if (n < 2) return 1.0;
    const double all = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double touched = static_cast<double>(counter.distinct_pairs());
    return 1.0 - touched / all;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw InfeasibleSpec("slope fit needs at least two samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw InfeasibleSpec("slope fit needs positive samples");
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto m = static_cast<double>(xs.size());
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw InfeasibleSpec("slope fit is degenerate");
    return (m * sxy - sx * sy) / den;
}

BenchResult scaling_bench(const BenchConfig& cfg, std::ostream* progress) {
    using clock = std::chrono::steady_clock;
    BenchResult out;

    for (const std::int64_t n : cfg.grid) {
        SynthSpec spec = cfg.spec;
        spec.n = n;
        Generated g = generate(spec);
        const double rho = g.truth.mean_rms_radius;

        const double k =
            cfg.k_over_rho > 0.0 ? cfg.k_over_rho / rho : auto_kernel_scale(g.vectors);
        DataSet ds(std::move(g.vectors.pts), g.vectors.d, KernelParams{k, 2.0});
        KernelCounter counter;
        ds.set_counter(&counter);

        auto t0 = clock::now();
        LshIndex index(ds, LshParams{cfg.mu, cfg.tables, cfg.r_scale * rho, spec.seed});
        out.index_build_s_total += std::chrono::duration<double>(clock::now() - t0).count();

        AlidConfig ac = cfg.alid;
        ac.bootstrap_radius = cfg.bootstrap_scale * rho;

        counter.reset();
        mem::reset_peak();
        t0 = clock::now();
        const auto clusters = detect_all(ds, index, ac);
        const double runtime = std::chrono::duration<double>(clock::now() - t0).count();

        BenchPoint row;
        row.n = n;
        row.runtime_s = runtime;
        row.peak_mem_bytes = mem::peak_bytes();
        row.avg_f = avg_f(g.truth, clusters);
        row.sparse_degree = sparse_degree(counter, n);
        out.rows.push_back(row);

        if (progress) {
            *progress << "[bench " << to_string(spec.regime) << "] n=" << n
                      << " clusters=" << clusters.size() << std::fixed << std::setprecision(3)
                      << " runtime_s=" << runtime
                      << " peak_mb=" << static_cast<double>(row.peak_mem_bytes) / (1024.0 * 1024.0)
                      << " avg_f=" << row.avg_f << std::setprecision(6)
                      << " sparse_degree=" << row.sparse_degree << std::defaultfloat << '\n';
            progress->flush();
        }
    }

    if (out.rows.size() >= 2) {
        std::vector<double> xs, rt, mem;
        for (const auto& r : out.rows) {
            xs.push_back(static_cast<double>(r.n));
            rt.push_back(std::max(r.runtime_s, 1e-9));
            mem.push_back(std::max(static_cast<double>(r.peak_mem_bytes), 1.0));
        }
        out.runtime_slope = loglog_slope(xs, rt);
        out.mem_slope = loglog_slope(xs, mem);
    }
    return out;
}

void write_bench_csv(const std::string& path, const std::vector<BenchPoint>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for write: " + path);
    out << "n,runtime_s,peak_mem_bytes,avg_f,sparse_degree\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line << r.n << ',' << std::setprecision(9) << r.runtime_s << ',' << r.peak_mem_bytes
             << ',' << std::setprecision(9) << r.avg_f << ',' << std::setprecision(12)
             << r.sparse_degree;
        out << line.str() << '\n';
    }
}

} // namespace alid::synth
