#include "alid/dataset.hpp"

#include "alid/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace alid {

namespace {

std::uint64_t pair_key(std::int32_t i, std::int32_t j) {
    const std::uint32_t a = static_cast<std::uint32_t>(std::min(i, j));
    const std::uint32_t b = static_cast<std::uint32_t>(std::max(i, j));
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

void KernelCounter::record(std::int32_t i, std::int32_t j) {
    if (i == j) return;
    std::lock_guard<std::mutex> lk(mu_);
    ++evals_;
    pairs_.insert(pair_key(i, j));
}

std::uint64_t KernelCounter::distinct_pairs() const {
    std::lock_guard<std::mutex> lk(mu_);
    return pairs_.size();
}

std::uint64_t KernelCounter::total_evals() const {
    std::lock_guard<std::mutex> lk(mu_);
    return evals_;
}

void KernelCounter::reset() {
    std::lock_guard<std::mutex> lk(mu_);
    pairs_.clear();
    evals_ = 0;
}

DataSet::DataSet(std::vector<float> pts, std::int32_t d, KernelParams kp)
    : pts_(std::move(pts)), d_(d), kernel_(kp) {
    if (d_ <= 0) throw FormatError("dimension must be positive");
    if (pts_.size() % static_cast<std::size_t>(d_) != 0)
        throw FormatError("point buffer size is not a multiple of the dimension");
    n_ = static_cast<std::int64_t>(pts_.size() / static_cast<std::size_t>(d_));
    if (!(kernel_.k > 0.0) || !std::isfinite(kernel_.k))
        throw FormatError("kernel scale k must be positive and finite");
    if (!(kernel_.p >= 1.0) || !std::isfinite(kernel_.p))
        throw FormatError("norm order p must be >= 1");
    for (float v : pts_) {
        if (!std::isfinite(v)) throw NonFiniteComponent("non-finite vector component");
    }
}

void DataSet::check_index(std::int32_t i) const {
    if (i < 0 || i >= n_) throw IndexOutOfRange("vertex index out of range");
}

double DataSet::distance(std::int32_t i, std::int32_t j) const {
    check_index(i);
    check_index(j);
    const float* a = pts_.data() + static_cast<std::size_t>(i) * d_;
    const float* b = pts_.data() + static_cast<std::size_t>(j) * d_;
    if (kernel_.p == 2.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d_; ++t) {
            const double dlt = static_cast<double>(a[t]) - static_cast<double>(b[t]);
            s += dlt * dlt;
        }
        return std::sqrt(s);
    }
    if (kernel_.p == 1.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d_; ++t)
            s += std::abs(static_cast<double>(a[t]) - static_cast<double>(b[t]));
        return s;
    }
    double s = 0.0;
    for (std::int32_t t = 0; t < d_; ++t)
        s += std::pow(std::abs(static_cast<double>(a[t]) - static_cast<double>(b[t])), kernel_.p);
    return std::pow(s, 1.0 / kernel_.p);
}

double DataSet::distance_to(std::int32_t i, const double* center) const {
    check_index(i);
    const float* a = pts_.data() + static_cast<std::size_t>(i) * d_;
    if (kernel_.p == 2.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d_; ++t) {
            const double dlt = static_cast<double>(a[t]) - center[t];
            s += dlt * dlt;
        }
        return std::sqrt(s);
    }
    if (kernel_.p == 1.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d_; ++t)
            s += std::abs(static_cast<double>(a[t]) - center[t]);
        return s;
    }
    double s = 0.0;
    for (std::int32_t t = 0; t < d_; ++t)
        s += std::pow(std::abs(static_cast<double>(a[t]) - center[t]), kernel_.p);
    return std::pow(s, 1.0 / kernel_.p);
}

double DataSet::affinity(std::int32_t i, std::int32_t j) const {
    if (i == j) {
        check_index(i);
        return 0.0;
    }
    const double d = distance(i, j);
    if (counter_) counter_->record(i, j);
    return std::exp(-kernel_.k * d);
}

AffinityColumn DataSet::affinity_column(std::int32_t target, std::span<const std::int32_t> rows) const {
    check_index(target);
    AffinityColumn col;
    col.target = target;
    col.rows.assign(rows.begin(), rows.end());
    col.values.resize(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        col.values[t] = affinity(rows[t], target);
    return col;
}

RawVectors load_vectors_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    RawVectors rv;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<float> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc()) {
                throw MalformedRow("line " + std::to_string(lineno) + ": cannot parse float");
            }
            if (!std::isfinite(v)) {
                throw NonFiniteComponent("line " + std::to_string(lineno) + ": non-finite component");
            }
            row.push_back(static_cast<float>(v));
            p = next;
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p < end) {
                if (*p != ',') throw MalformedRow("line " + std::to_string(lineno) + ": expected comma");
                ++p;
            }
        }
        if (row.empty()) throw MalformedRow("line " + std::to_string(lineno) + ": empty row");
        if (rv.d == 0) {
            rv.d = static_cast<std::int32_t>(row.size());
        } else if (static_cast<std::int32_t>(row.size()) != rv.d) {
            throw MalformedRow("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(rv.d) + " fields, got " + std::to_string(row.size()));
        }
        rv.pts.insert(rv.pts.end(), row.begin(), row.end());
        ++rv.n;
    }
    if (rv.n == 0) throw EmptyFile("no data rows in " + path);
    return rv;
}

RawVectors load_vectors_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::uint32_t d32 = 0;
    std::uint64_t n64 = 0;
    in.read(reinterpret_cast<char*>(&d32), sizeof(d32));
    in.read(reinterpret_cast<char*>(&n64), sizeof(n64));
    if (!in) throw FormatError("truncated header in " + path);
    if (d32 == 0) throw FormatError("zero dimension in " + path);
    if (n64 == 0) throw EmptyFile("no records in " + path);
    RawVectors rv;
    rv.d = static_cast<std::int32_t>(d32);
    rv.n = static_cast<std::int64_t>(n64);
    rv.pts.resize(static_cast<std::size_t>(rv.n) * rv.d);
    in.read(reinterpret_cast<char*>(rv.pts.data()),
            static_cast<std::streamsize>(rv.pts.size() * sizeof(float)));
    if (!in) throw FormatError("truncated records in " + path);
    char extra = 0;
    if (in.read(&extra, 1)) throw FormatError("trailing bytes in " + path);
    for (float v : rv.pts) {
        if (!std::isfinite(v)) throw NonFiniteComponent("non-finite component in " + path);
    }
    return rv;
}

DataSet DataSet::from_csv(const std::string& path, KernelParams kp) {
    RawVectors rv = load_vectors_csv(path);
    return DataSet(std::move(rv.pts), rv.d, kp);
}

DataSet DataSet::from_binary(const std::string& path, KernelParams kp) {
    RawVectors rv = load_vectors_binary(path);
    return DataSet(std::move(rv.pts), rv.d, kp);
}

void DataSet::write_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    const std::uint32_t d32 = static_cast<std::uint32_t>(d_);
    const std::uint64_t n64 = static_cast<std::uint64_t>(n_);
    out.write(reinterpret_cast<const char*>(&d32), sizeof(d32));
    out.write(reinterpret_cast<const char*>(&n64), sizeof(n64));
    out.write(reinterpret_cast<const char*>(pts_.data()),
              static_cast<std::streamsize>(pts_.size() * sizeof(float)));
    if (!out) throw FormatError("short write to " + path);
}

namespace {

double sample_distance(const float* a, const float* b, std::int32_t d, double p) {
    if (p == 2.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d; ++t) {
            const double dlt = static_cast<double>(a[t]) - static_cast<double>(b[t]);
            s += dlt * dlt;
        }
        return std::sqrt(s);
    }
    if (p == 1.0) {
        double s = 0.0;
        for (std::int32_t t = 0; t < d; ++t)
            s += std::abs(static_cast<double>(a[t]) - static_cast<double>(b[t]));
        return s;
    }
    double s = 0.0;
    for (std::int32_t t = 0; t < d; ++t)
        s += std::pow(std::abs(static_cast<double>(a[t]) - static_cast<double>(b[t])), p);
    return std::pow(s, 1.0 / p);
}

} // namespace

double auto_kernel_scale(const RawVectors& rv, double p) {
    if (rv.n < 2) throw DegenerateStart("need at least two points for the median heuristic");
    const std::int64_t m = std::min<std::int64_t>(rv.n, 1000);
    std::vector<std::int64_t> ids(m);
    for (std::int64_t t = 0; t < m; ++t) ids[t] = t * rv.n / m; // evenly spaced, deterministic
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (std::int64_t i = 0; i < m; ++i) {
        const float* a = rv.pts.data() + static_cast<std::size_t>(ids[i]) * rv.d;
        for (std::int64_t j = i + 1; j < m; ++j) {
            const float* b = rv.pts.data() + static_cast<std::size_t>(ids[j]) * rv.d;
            dists.push_back(sample_distance(a, b, rv.d, p));
        }
    }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    const double med = dists[mid];
    if (!(med > 0.0)) throw DegenerateStart("median pairwise distance is zero");
    return 1.0 / med;
}

double auto_kernel_scale(const DataSet& ds) {
    RawVectors rv;
    rv.n = ds.size();
    rv.d = ds.dim();
    rv.pts.assign(ds.point(0).data(), ds.point(0).data() + static_cast<std::size_t>(rv.n) * rv.d);
    return auto_kernel_scale(rv, ds.kernel().p);
}

} // namespace alid
