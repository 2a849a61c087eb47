#include "alid/lid.hpp"

#include "alid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace alid {

LidState LidState::seed(std::int32_t seed_vertex) {
    LidState st;
    st.beta = {seed_vertex};
    st.x = Subgraph::singleton(seed_vertex);
    st.ax = {0.0};
    st.columns[seed_vertex] = {0.0};
    st.pi = 0.0;
    st.touched.insert(seed_vertex);
    return st;
}

std::int64_t LidState::pos_of(std::int32_t id) const {
    auto it = std::lower_bound(beta.begin(), beta.end(), id);
    if (it == beta.end() || *it != id) return -1;
    return it - beta.begin();
}

void LidState::validate(const DataSet& ds) const {
    if (!std::is_sorted(beta.begin(), beta.end())) throw Error("beta not sorted");
    if (std::adjacent_find(beta.begin(), beta.end()) != beta.end()) throw Error("beta not unique");
    if (ax.size() != beta.size()) throw Error("ax size mismatch");
    double total = 0.0;
    for (std::size_t t = 0; t < x.support.size(); ++t) {
        if (pos_of(x.support[t]) < 0) throw Error("support outside beta");
        if (!(x.weights[t] > 0.0)) throw Error("non-positive weight");
        total += x.weights[t];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("weights do not sum to 1");
    for (std::int32_t s : x.support) {
        if (!columns.count(s)) throw Error("missing cached column for support vertex");
    }
    for (const auto& [id, col] : columns) {
        if (col.size() != beta.size()) throw Error("cached column length mismatch");
        if (pos_of(id) < 0) throw Error("cached column for vertex outside beta");
    }
    const std::vector<double> fresh = scratch_ax(ds, *this);
    for (std::size_t t = 0; t < fresh.size(); ++t) {
        if (std::abs(fresh[t] - ax[t]) > 1e-9) throw Error("ax drifted from scratch recomputation");
    }
}

std::optional<Selection> select_vertex(const LidState& st, const LidConfig& cfg) {
    const double pi = st.pi;
    Selection best;
    double best_abs = 0.0;
    bool found = false;
    std::size_t sp = 0; // walking pointer into sorted support
    for (std::size_t pos = 0; pos < st.beta.size(); ++pos) {
        const std::int32_t id = st.beta[pos];
        double w = 0.0;
        while (sp < st.x.support.size() && st.x.support[sp] < id) ++sp;
        if (sp < st.x.support.size() && st.x.support[sp] == id) w = st.x.weights[sp];
        const double gap = st.ax[pos] - pi;
        const bool infective = gap > cfg.gap_eps;
        const bool immunizable = gap < -cfg.gap_eps && w > 0.0;
        if (!infective && !immunizable) continue;
        const double mag = std::abs(gap);
        if (!found || mag > best_abs) {
            found = true;
            best_abs = mag;
            best.index = id;
            best.kind = infective ? MoveKind::Infect : MoveKind::Immunize;
            best.gap = gap;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

double invasion_share(const LidState& st, const Selection& sel) {
    const std::int64_t pos = st.pos_of(sel.index);
    if (pos < 0) throw IndexOutOfRange("selection outside beta");
    const double gap = sel.gap;
    const double h = st.pi - 2.0 * st.ax[pos]; // pi(s_i - x)
    if (sel.kind == MoveKind::Infect) {
        return (h < 0.0) ? std::min(gap / (-h), 1.0) : 1.0;
    }
    const double w = st.x.weight_of(sel.index);
    if (w >= 1.0) throw ImmunizeSingleton("immunizing the only weighted vertex");
    if (!(w > 0.0)) throw Error("immunize target has no weight");
    const double c = w / (w - 1.0);
    const double num = c * gap;      // pi(co-vertex - x, x) > 0
    const double den = c * c * h;    // pi(co-vertex - x)
    return (den < 0.0) ? std::min(-num / den, 1.0) : 1.0;
}

namespace {

// Removes one support entry with the exact update
// x' = (x - w s_j) / (1 - w), keeping ax and pi consistent.
void remove_support_entry(LidState& st, std::size_t supp_idx) {
    const std::int32_t id = st.x.support[supp_idx];
    const double w = st.x.weights[supp_idx];
    const std::int64_t pos = st.pos_of(id);
    const auto col_it = st.columns.find(id);
    if (col_it == st.columns.end()) throw Error("pruned vertex has no cached column");
    const std::vector<double>& col = col_it->second;
    const double scale = 1.0 - w;
    st.pi = (st.pi - 2.0 * w * st.ax[pos]) / (scale * scale);
    for (std::size_t t = 0; t < st.ax.size(); ++t)
        st.ax[t] = (st.ax[t] - w * col[t]) / scale;
    st.x.support.erase(st.x.support.begin() + supp_idx);
    st.x.weights.erase(st.x.weights.begin() + supp_idx);
    for (double& v : st.x.weights) v /= scale;
}

} // namespace

StepReport lid_step(const DataSet& ds, LidState& st, const LidConfig& cfg, int iteration) {
    StepReport rep;
    rep.iteration = iteration;
    auto sel = select_vertex(st, cfg);
    if (!sel) {
        rep.converged = true;
        rep.pi_before = rep.pi_after = st.pi;
        return rep;
    }
    rep.sel = sel;
    const std::int32_t i = sel->index;
    const std::int64_t pos = st.pos_of(i);
    const double gap = sel->gap;
    const double h = st.pi - 2.0 * st.ax[pos];
    const double eps = invasion_share(st, *sel);
    rep.epsilon = eps;

    double g = eps;
    double w_old_i = 0.0;
    double c_old = 0.0;
    if (sel->kind == MoveKind::Immunize) {
        w_old_i = st.x.weight_of(i);
        c_old = w_old_i / (w_old_i - 1.0);
        g = eps * c_old;
    }
    rep.coeff = g;

    // column of the invader over beta (cached for every past support vertex)
    auto col_it = st.columns.find(i);
    if (col_it == st.columns.end()) {
        AffinityColumn c = ds.affinity_column(i, st.beta);
        col_it = st.columns.emplace(i, std::move(c.values)).first;
        rep.column_fetched = true;
    }
    const std::vector<double>& col = col_it->second;

    // payoff bookkeeping in closed form: pi(z) = pi + 2 g gap + g^2 h
    rep.pi_before = st.pi;
    rep.delta_pi = 2.0 * g * gap + g * g * h;
    rep.pi_after = rep.pi_before + rep.delta_pi;

    const Subgraph x_old = st.x; // for the post-step audit of an immunize move

    // x' = (1 - g) x + g s_i
    bool present = false;
    for (std::size_t t = 0; t < st.x.support.size(); ++t) {
        st.x.weights[t] *= (1.0 - g);
        if (st.x.support[t] == i) {
            st.x.weights[t] += g;
            present = true;
        }
    }
    if (!present) {
        auto it = std::lower_bound(st.x.support.begin(), st.x.support.end(), i);
        const std::size_t at = static_cast<std::size_t>(it - st.x.support.begin());
        st.x.support.insert(it, i);
        st.x.weights.insert(st.x.weights.begin() + at, g);
        st.touched.insert(i);
    }

    // ax' = ax + g (col_i - ax)
    for (std::size_t t = 0; t < st.ax.size(); ++t)
        st.ax[t] += g * (col[t] - st.ax[t]);
    st.pi = rep.pi_after;

    // drop dust (including the exact zero an immunize removal leaves behind)
    for (std::size_t t = st.x.support.size(); t-- > 0;) {
        if (st.x.weights[t] < 1e-12) remove_support_entry(st, t);
    }
    if (st.x.support.empty()) throw ZeroDensity("invasion removed all mass");
    double total = 0.0;
    for (double v : st.x.weights) total += v;
    if (std::abs(total - 1.0) > 1e-12) {
        for (double& v : st.x.weights) v /= total;
        for (double& v : st.ax) v /= total;
        st.pi /= total * total;
    }

    // payoff gap of the invader against the updated state
    if (sel->kind == MoveKind::Infect) {
        rep.invader_gap_after = st.ax[st.pos_of(i)] - st.pi;
    } else {
        double pi_xold_xnew = 0.0;
        for (std::size_t t = 0; t < x_old.support.size(); ++t) {
            const std::int64_t p = st.pos_of(x_old.support[t]);
            pi_xold_xnew += x_old.weights[t] * st.ax[p];
        }
        const double pi_y_xnew =
            c_old * (st.ax[st.pos_of(i)] - pi_xold_xnew) + pi_xold_xnew;
        rep.invader_gap_after = pi_y_xnew - st.pi;
    }
    return rep;
}

LidRunResult run_lid(const DataSet& ds, LidState& st, const LidConfig& cfg,
                     std::vector<StepReport>* trace) {
    LidRunResult res;
    for (int t = 0; t < cfg.max_iters; ++t) {
        StepReport rep = lid_step(ds, st, cfg, t);
        if (trace) trace->push_back(rep);
        if (rep.converged) {
            res.converged = true;
            break;
        }
        ++res.iters;
        if (std::abs(rep.delta_pi) < cfg.stability_eps) break;
    }
    res.pi = st.pi;
    return res;
}

std::vector<double> scratch_ax(const DataSet& ds, const LidState& st) {
    std::vector<double> out(st.beta.size(), 0.0);
    for (std::size_t t = 0; t < st.beta.size(); ++t) {
        double s = 0.0;
        for (std::size_t q = 0; q < st.x.support.size(); ++q)
            s += st.x.weights[q] * ds.affinity(st.beta[t], st.x.support[q]);
        out[t] = s;
    }
    return out;
}

} // namespace alid
