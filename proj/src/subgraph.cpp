#include "alid/subgraph.hpp"

#include "alid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace alid {

Subgraph Subgraph::singleton(std::int32_t i) {
    Subgraph s;
    s.support = {i};
    s.weights = {1.0};
    return s;
}

Subgraph Subgraph::from_weights(std::vector<std::int32_t> idx, std::vector<double> w,
                                double prune_eps) {
    if (idx.size() != w.size()) throw FormatError("support/weight size mismatch");
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return idx[a] < idx[b]; });
    Subgraph out;
    for (std::size_t t : order) {
        if (!std::isfinite(w[t])) throw NonFiniteComponent("non-finite weight");
        if (w[t] < 0.0) throw FormatError("negative weight");
        if (!out.support.empty() && out.support.back() == idx[t]) {
            out.weights.back() += w[t];
        } else {
            out.support.push_back(idx[t]);
            out.weights.push_back(w[t]);
        }
    }
    // prune dust, then renormalize
    std::size_t keep = 0;
    double total = 0.0;
    for (std::size_t t = 0; t < out.support.size(); ++t) {
        if (out.weights[t] >= prune_eps) {
            out.support[keep] = out.support[t];
            out.weights[keep] = out.weights[t];
            total += out.weights[t];
            ++keep;
        }
    }
    out.support.resize(keep);
    out.weights.resize(keep);
    if (keep == 0 || !(total > 0.0)) throw ZeroDensity("no mass left after pruning");
    for (double& v : out.weights) v /= total;
    return out;
}

double Subgraph::weight_of(std::int32_t i) const {
    auto it = std::lower_bound(support.begin(), support.end(), i);
    if (it == support.end() || *it != i) return 0.0;
    return weights[static_cast<std::size_t>(it - support.begin())];
}

bool Subgraph::contains(std::int32_t i) const {
    return std::binary_search(support.begin(), support.end(), i);
}

std::string Subgraph::to_json() const {
    nlohmann::json j;
    j["support"] = support;
    j["weights"] = weights;
    return j.dump();
}

Subgraph Subgraph::from_json(const std::string& text) {
    nlohmann::json j;
    std::vector<std::int32_t> idx;
    std::vector<double> w;
    try {
        j = nlohmann::json::parse(text);
        if (!j.contains("support") || !j.contains("weights"))
            throw FormatError("subgraph JSON needs support and weights");
        idx = j["support"].get<std::vector<std::int32_t>>();
        w = j["weights"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad subgraph JSON: ") + e.what());
    }
    return from_weights(std::move(idx), std::move(w));
}

double density(const DataSet& ds, const Subgraph& x) {
    double s = 0.0;
    for (std::size_t a = 0; a < x.support.size(); ++a) {
        for (std::size_t b = a + 1; b < x.support.size(); ++b) {
            s += 2.0 * x.weights[a] * x.weights[b] * ds.affinity(x.support[a], x.support[b]);
        }
    }
    return s;
}

double cross_payoff(const DataSet& ds, const Subgraph& y, const Subgraph& x) {
    double s = 0.0;
    for (std::size_t a = 0; a < y.support.size(); ++a) {
        for (std::size_t b = 0; b < x.support.size(); ++b) {
            s += y.weights[a] * x.weights[b] * ds.affinity(y.support[a], x.support[b]);
        }
    }
    return s;
}

double payoff_gap(const DataSet& ds, const Subgraph& y, const Subgraph& x) {
    return cross_payoff(ds, y, x) - density(ds, x);
}

} // namespace alid
