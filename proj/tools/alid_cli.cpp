#include "alid/civs.hpp"
#include "alid/dataset.hpp"
#include "alid/driver.hpp"
#include "alid/errors.hpp"
#include "alid/lid.hpp"
#include "alid/lsh.hpp"
#include "alid/palid.hpp"
#include "alid/subgraph.hpp"
#include "alid/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

alid::RawVectors load_raw(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return alid::load_vectors_csv(path);
    return alid::load_vectors_binary(path);
}

double resolve_kernel_scale(const std::string& opt, const alid::RawVectors& rv, double p) {
    if (opt == "auto") return alid::auto_kernel_scale(rv, p);
    double k = 0.0;
    try {
        std::size_t used = 0;
        k = std::stod(opt, &used);
        if (used != opt.size()) throw std::invalid_argument(opt);
    } catch (const std::exception&) {
        throw alid::FormatError("--k wants a positive number or 'auto', got '" + opt + "'");
    }
    if (!(k > 0.0)) throw alid::FormatError("--k must be positive");
    return k;
}

void summary(const ordered_json& j) { std::cerr << j.dump() << std::endl; }

struct GenOpts {
    std::string regime = "prop";
    double omega = 1.0;
    double eta = 0.9;
    std::int64_t cap = 1000;
    std::int64_t n = 0;
    int d = 100;
    int clusters = 20;
    double cov_min = 0.0;
    double cov_max = 10.0;
    bool overlap = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string truth;
};

alid::synth::SynthSpec to_spec(const GenOpts& g) {
    alid::synth::SynthSpec spec;
    spec.regime = alid::synth::regime_from_string(g.regime);
    spec.omega = g.omega;
    spec.eta = g.eta;
    spec.cap = g.cap;
    spec.n = g.n;
    spec.d = g.d;
    spec.clusters = g.clusters;
    spec.cov_min = g.cov_min;
    spec.cov_max = g.cov_max;
    spec.overlap = g.overlap;
    spec.seed = g.seed;
    return spec;
}

void add_regime_options(CLI::App* cmd, GenOpts& g) {
    cmd->add_option("--regime", g.regime, "cluster size regime: prop|sub|cap")
        ->required()
        ->check(CLI::IsMember({"prop", "proportional", "sub", "sublinear", "cap", "capped"}));
    cmd->add_option("--omega", g.omega, "proportional regime fraction in (0,1]")
        ->capture_default_str();
    cmd->add_option("--eta", g.eta, "sublinear regime exponent in (0,1)")->capture_default_str();
    cmd->add_option("--cap", g.cap, "capped regime total clustered points")
        ->capture_default_str();
    cmd->add_option("--d", g.d, "dimensionality")->capture_default_str();
    cmd->add_option("--clusters", g.clusters, "number of planted clusters")
        ->capture_default_str();
    cmd->add_option("--cov-min", g.cov_min, "low end of the diagonal covariance range")
        ->capture_default_str();
    cmd->add_option("--cov-max", g.cov_max, "high end of the diagonal covariance range")
        ->capture_default_str();
    cmd->add_flag("--overlap", g.overlap, "pull some cluster pairs to half spacing");
    cmd->add_option("--seed", g.seed, "generator seed")->capture_default_str();
}

struct DetectOpts {
    std::string data;
    std::string index;
    std::string k = "auto";
    double p = 2.0;
    int rounds = 10;
    int iters = 1000;
    int delta = 800;
    double threshold = 0.75;
    double bootstrap_r = 0.4;
    double gap_eps = 1e-7;
    double stability_eps = 1e-9;
    std::string out;
    std::string lid_trace;
    std::int32_t trace_seed = 0;
};

void add_detect_options(CLI::App* cmd, DetectOpts& o) {
    cmd->add_option("--data", o.data, "vector file (.csv or binary)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--index", o.index, "hash index file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k", o.k, "kernel scale (positive number or 'auto')")
        ->capture_default_str();
    cmd->add_option("--p", o.p, "Minkowski norm order, >= 1")->capture_default_str();
    cmd->add_option("--C", o.rounds, "range growth rounds per detection")->capture_default_str();
    cmd->add_option("--T", o.iters, "dynamics step budget per round")->capture_default_str();
    cmd->add_option("--delta", o.delta, "fresh candidates admitted per round")
        ->capture_default_str();
    cmd->add_option("--threshold", o.threshold, "minimum density to keep a cluster")
        ->capture_default_str();
    cmd->add_option("--bootstrap-r", o.bootstrap_r, "working radius while density is zero")
        ->capture_default_str();
    cmd->add_option("--gap-eps", o.gap_eps, "payoff gap treated as zero")
        ->capture_default_str();
    cmd->add_option("--stability-eps", o.stability_eps, "stop when a step moves pi less")
        ->capture_default_str();
    cmd->add_option("--out", o.out, "clusters output (jsonl)")->required();
    cmd->add_option("--lid-trace", o.lid_trace, "write per-step dynamics records here (jsonl)");
    cmd->add_option("--trace-seed", o.trace_seed, "seed vertex the trace follows")
        ->capture_default_str();
}

alid::AlidConfig to_config(const DetectOpts& o) {
    alid::AlidConfig cfg;
    cfg.lid.max_iters = o.iters;
    cfg.lid.gap_eps = o.gap_eps;
    cfg.lid.stability_eps = o.stability_eps;
    cfg.civs.delta = o.delta;
    cfg.max_rounds = o.rounds;
    cfg.bootstrap_radius = o.bootstrap_r;
    cfg.density_threshold = o.threshold;
    return cfg;
}

void write_trace_jsonl(const std::string& path, const std::vector<alid::StepReport>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw alid::FormatError("cannot open for write: " + path);
    for (const auto& r : trace) {
        ordered_json j;
        j["iteration"] = r.iteration;
        j["converged"] = r.converged;
        if (r.sel) {
            j["move"] = r.sel->kind == alid::MoveKind::Infect ? "infect" : "immunize";
            j["vertex"] = r.sel->index;
            j["gap"] = r.sel->gap;
        }
        j["epsilon"] = r.epsilon;
        j["pi_before"] = r.pi_before;
        j["delta_pi"] = r.delta_pi;
        j["pi_after"] = r.pi_after;
        j["invader_gap_after"] = r.invader_gap_after;
        j["column_fetched"] = r.column_fetched;
        out << j.dump() << '\n';
    }
}

int cmd_generate(const GenOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = to_spec(g);
    auto gen = alid::synth::generate(spec);
    alid::DataSet ds(std::move(gen.vectors.pts), gen.vectors.d, alid::KernelParams{});
    ds.write_binary(g.out);
    alid::synth::write_truth_json(g.truth, gen.truth);
    summary({{"cmd", "generate"},
             {"regime", alid::synth::to_string(spec.regime)},
             {"n", spec.n},
             {"d", spec.d},
             {"cluster_size", spec.a_star()},
             {"mean_rms_radius", gen.truth.mean_rms_radius},
             {"out", g.out},
             {"truth", g.truth},
             {"runtime_s", seconds_since(t0)}});
    return 0;
}

int cmd_index(const std::string& data, int mu, int tables, double r, std::uint64_t seed,
              const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rv = load_raw(data);
    alid::DataSet ds(std::move(rv.pts), rv.d, alid::KernelParams{});
    alid::LshIndex index(ds, alid::LshParams{mu, tables, r, seed});
    index.save(out);
    summary({{"cmd", "index"},
             {"n", ds.size()},
             {"d", ds.dim()},
             {"mu", mu},
             {"tables", tables},
             {"r", r},
             {"out", out},
             {"runtime_s", seconds_since(t0)}});
    return 0;
}

int cmd_detect(const DetectOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rv = load_raw(o.data);
    const double k = resolve_kernel_scale(o.k, rv, o.p);
    alid::DataSet ds(std::move(rv.pts), rv.d, alid::KernelParams{k, o.p});
    auto index = alid::LshIndex::load(o.index, ds);
    const auto cfg = to_config(o);

    if (!o.lid_trace.empty()) {
        std::vector<alid::StepReport> trace;
        alid::detect_one(ds, index, cfg, o.trace_seed, nullptr, &trace);
        write_trace_jsonl(o.lid_trace, trace);
    }

    const auto clusters = alid::detect_all(ds, index, cfg);
    alid::write_clusters_jsonl(o.out, clusters);

    int converged = 0;
    for (const auto& c : clusters) converged += c.converged ? 1 : 0;
    summary({{"cmd", "detect"},
             {"n", ds.size()},
             {"k", k},
             {"clusters", clusters.size()},
             {"converged", converged},
             {"out", o.out},
             {"runtime_s", seconds_since(t0)}});
    return 0;
}

int cmd_palid(const DetectOpts& o, int workers, double sample_rate, int min_bucket,
              std::uint64_t tasks_seed, const std::string& assign_path) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rv = load_raw(o.data);
    const double k = resolve_kernel_scale(o.k, rv, o.p);
    alid::DataSet ds(std::move(rv.pts), rv.d, alid::KernelParams{k, o.p});
    const auto index = alid::LshIndex::load(o.index, ds);
    const auto cfg = to_config(o);

    const auto tasks = alid::build_tasklist(index, sample_rate, min_bucket, tasks_seed);
    auto res = alid::run_palid(ds, index, cfg, workers, tasks);
    alid::write_clusters_jsonl(o.out, res.clusters);
    if (!assign_path.empty()) alid::write_assignment_jsonl(assign_path, res.assignment);

    summary({{"cmd", "palid"},
             {"n", ds.size()},
             {"k", k},
             {"workers", workers},
             {"tasks", tasks.seeds.size()},
             {"clusters", res.clusters.size()},
             {"assigned", res.assignment.items.size()},
             {"failures", res.failures.size()},
             {"out", o.out},
             {"runtime_s", seconds_since(t0)}});
    return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& clusters_path) {
    const auto truth = alid::synth::read_truth_json(truth_path);
    const auto clusters = alid::read_clusters_jsonl(clusters_path);
    std::vector<double> per_cluster;
    const double f = alid::synth::avg_f(truth, clusters, &per_cluster);
    ordered_json j;
    j["avg_f"] = f;
    j["per_cluster_f"] = per_cluster;
    j["detected"] = clusters.size();
    j["true_clusters"] = truth.n_clusters;
    std::cout << j.dump() << std::endl;
    summary({{"cmd", "eval"}, {"avg_f", f}, {"detected", clusters.size()}});
    return 0;
}

struct BenchOpts {
    GenOpts gen;
    std::vector<std::int64_t> grid = {2000, 4000, 8000, 16000, 32000, 64000};
    int mu = 8;
    int tables = 4;
    double r_scale = 4.5;
    double bootstrap_scale = 1.5;
    double k_scale = 0.045;
    double threshold = 0.75;
    int delta = 800;
    int rounds = 10;
    int iters = 1000;
    std::string out;
};

int cmd_bench(const BenchOpts& b) {
    alid::synth::BenchConfig cfg;
    cfg.spec = to_spec(b.gen);
    cfg.grid = b.grid;
    cfg.mu = b.mu;
    cfg.tables = b.tables;
    cfg.r_scale = b.r_scale;
    cfg.bootstrap_scale = b.bootstrap_scale;
    cfg.k_over_rho = b.k_scale;
    cfg.alid.density_threshold = b.threshold;
    cfg.alid.civs.delta = b.delta;
    cfg.alid.max_rounds = b.rounds;
    cfg.alid.lid.max_iters = b.iters;

    const auto res = alid::synth::scaling_bench(cfg, &std::cerr);
    alid::synth::write_bench_csv(b.out, res.rows);

    ordered_json meta;
    meta["regime"] = alid::synth::to_string(cfg.spec.regime);
    meta["omega"] = cfg.spec.omega;
    meta["eta"] = cfg.spec.eta;
    meta["cap"] = cfg.spec.cap;
    meta["d"] = cfg.spec.d;
    meta["clusters"] = cfg.spec.clusters;
    meta["seed"] = cfg.spec.seed;
    meta["grid"] = cfg.grid;
    meta["mu"] = cfg.mu;
    meta["tables"] = cfg.tables;
    meta["r_scale"] = cfg.r_scale;
    meta["bootstrap_scale"] = cfg.bootstrap_scale;
    meta["k_over_rho"] = cfg.k_over_rho;
    meta["runtime_slope"] = res.runtime_slope;
    meta["mem_slope"] = res.mem_slope;
    meta["index_build_s_total"] = res.index_build_s_total;
    std::ofstream mf(b.out + ".meta.json", std::ios::binary);
    if (!mf) throw alid::FormatError("cannot open for write: " + b.out + ".meta.json");
    mf << meta.dump(2) << '\n';

    summary({{"cmd", "bench"},
             {"regime", alid::synth::to_string(cfg.spec.regime)},
             {"rows", res.rows.size()},
             {"runtime_slope", res.runtime_slope},
             {"mem_slope", res.mem_slope},
             {"out", b.out}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalable dominant-cluster detection toolkit"};
    app.set_config("--config", "", "read options from an ini/toml file");
    app.require_subcommand(1);

    GenOpts gen_opts;
    auto* gen = app.add_subcommand("generate", "synthesize a planted-cluster dataset");
    add_regime_options(gen, gen_opts);
    gen->add_option("--n", gen_opts.n, "total points")->required()->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_opts.out, "output vector file (binary)")->required();
    gen->add_option("--truth", gen_opts.truth, "ground-truth labels (json)")->required();

    std::string idx_data, idx_out;
    int idx_mu = 40, idx_tables = 50;
    double idx_r = 1.0;
    std::uint64_t idx_seed = 0;
    auto* index = app.add_subcommand("index", "build the hash index for a vector file");
    index->add_option("--data", idx_data, "vector file (.csv or binary)")
        ->required()
        ->check(CLI::ExistingFile);
    index->add_option("--mu", idx_mu, "projections per table")->capture_default_str();
    index->add_option("--tables", idx_tables, "hash tables")->capture_default_str();
    index->add_option("--r", idx_r, "quantization width")
        ->required()
        ->check(CLI::PositiveNumber);
    index->add_option("--seed", idx_seed, "projection seed")->capture_default_str();
    index->add_option("--out", idx_out, "index output file")->required();

    DetectOpts det_opts;
    auto* detect = app.add_subcommand("detect", "peel all dominant clusters from a dataset");
    add_detect_options(detect, det_opts);

    DetectOpts pal_opts;
    int pal_workers = 4, pal_min_bucket = 5;
    double pal_rate = 0.2;
    std::uint64_t pal_tasks_seed = 0;
    std::string pal_assign;
    auto* palid = app.add_subcommand("palid", "concurrent detection over sampled seeds");
    add_detect_options(palid, pal_opts);
    palid->add_option("--workers", pal_workers, "worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    palid->add_option("--sample-rate", pal_rate, "per-bucket seed sampling rate")
        ->capture_default_str();
    palid->add_option("--min-bucket", pal_min_bucket, "skip buckets at or below this size")
        ->capture_default_str();
    palid->add_option("--tasks-seed", pal_tasks_seed, "tasklist sampling seed")
        ->capture_default_str();
    palid->add_option("--assign", pal_assign, "per-item assignment output (jsonl)");

    std::string eval_truth, eval_clusters;
    auto* eval = app.add_subcommand("eval", "score detected clusters against ground truth");
    eval->add_option("--truth", eval_truth, "ground-truth labels (json)")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--clusters", eval_clusters, "clusters file (jsonl)")
        ->required()
        ->check(CLI::ExistingFile);

    BenchOpts bench_opts;
    auto* bench = app.add_subcommand("bench", "scaling benchmark over a size grid");
    add_regime_options(bench, bench_opts.gen);
    bench->add_option("--grid", bench_opts.grid, "comma separated sizes")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--mu", bench_opts.mu, "projections per table")->capture_default_str();
    bench->add_option("--tables", bench_opts.tables, "hash tables")->capture_default_str();
    bench->add_option("--r-scale", bench_opts.r_scale,
                      "quantization width as a multiple of the cluster spread")
        ->capture_default_str();
    bench->add_option("--bootstrap-scale", bench_opts.bootstrap_scale,
                      "bootstrap radius as a multiple of the cluster spread")
        ->capture_default_str();
    bench->add_option("--k-scale", bench_opts.k_scale,
                      "kernel scale as a multiple of 1/spread (0 = median heuristic)")
        ->capture_default_str();
    bench->add_option("--threshold", bench_opts.threshold, "minimum density to keep a cluster")
        ->capture_default_str();
    bench->add_option("--delta", bench_opts.delta, "fresh candidates admitted per round")
        ->capture_default_str();
    bench->add_option("--C", bench_opts.rounds, "range growth rounds per detection")
        ->capture_default_str();
    bench->add_option("--T", bench_opts.iters, "dynamics step budget per round")
        ->capture_default_str();
    bench->add_option("--out", bench_opts.out, "benchmark csv output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_opts);
        if (index->parsed())
            return cmd_index(idx_data, idx_mu, idx_tables, idx_r, idx_seed, idx_out);
        if (detect->parsed()) return cmd_detect(det_opts);
        if (palid->parsed())
            return cmd_palid(pal_opts, pal_workers, pal_rate, pal_min_bucket, pal_tasks_seed,
                             pal_assign);
        if (eval->parsed()) return cmd_eval(eval_truth, eval_clusters);
        if (bench->parsed()) return cmd_bench(bench_opts);
    } catch (const alid::Error& e) {
        std::cerr << ordered_json{{"error", e.what()}}.dump() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << ordered_json{{"error", e.what()}}.dump() << std::endl;
        return 2;
    }
    return 0;
}
