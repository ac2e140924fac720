#include "sheetlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sheetlab/parallel.hpp"
#include "sheetlab/rng.hpp"

namespace sheetlab {

Grid Grid::uniform(const GridSpec& spec) {
    spec.validate();
    std::vector<std::vector<double>> axes;
    for (int n : spec.points_per_axis) {
        std::vector<double> g(n);
        if (n == 1) {
            g[0] = spec.lower;
        } else {
            const double step = (spec.upper - spec.lower) / (n - 1);
            for (int i = 0; i < n; ++i) g[i] = spec.lower + step * i;
            g[n - 1] = spec.upper;
        }
        axes.push_back(std::move(g));
    }
    return from_axes(std::move(axes));
}

Grid Grid::from_axes(std::vector<std::vector<double>> axes) {
    if (axes.empty()) throw std::invalid_argument("grid needs at least one axis");
    Grid g;
    g.total_ = 1;
    for (const auto& ax : axes) {
        if (ax.empty()) throw std::invalid_argument("grid axis is empty");
        if (!(ax.front() >= 0.0))
            throw std::invalid_argument("grid coordinates must be >= 0");
        for (std::size_t i = 1; i < ax.size(); ++i)
            if (!(ax[i] > ax[i - 1]))
                throw std::invalid_argument("grid axis must be strictly increasing");
        g.total_ *= ax.size();
    }
    g.axes_ = std::move(axes);
    return g;
}

ParamPoint Grid::point(std::size_t flat) const {
    ParamPoint p(dim());
    std::size_t rem = flat;
    for (int k = dim() - 1; k >= 0; --k) {
        const std::size_t n = axes_[k].size();
        p[k] = axes_[k][rem % n];
        rem /= n;
    }
    return p;
}

std::size_t Grid::flat_index(const std::vector<int>& multi) const {
    if (static_cast<int>(multi.size()) != dim())
        throw std::invalid_argument("multi-index dimension mismatch");
    std::size_t flat = 0;
    for (int k = 0; k < dim(); ++k) {
        if (multi[k] < 0 || multi[k] >= static_cast<int>(axes_[k].size()))
            throw std::out_of_range("multi-index out of range");
        flat = flat * axes_[k].size() + multi[k];
    }
    return flat;
}

std::optional<std::size_t> Grid::find_index(const ParamPoint& p) const {
    if (static_cast<int>(p.size()) != dim()) return std::nullopt;
    std::vector<int> multi(dim());
    for (int k = 0; k < dim(); ++k) {
        const auto& ax = axes_[k];
        const double tol = 1e-9 * std::max(1.0, std::abs(p[k]));
        auto it = std::lower_bound(ax.begin(), ax.end(), p[k] - tol);
        if (it == ax.end() || std::abs(*it - p[k]) > tol) return std::nullopt;
        multi[k] = static_cast<int>(it - ax.begin());
    }
    return flat_index(multi);
}

// One axis pass: for each of the total/n lines along the axis, cumulative-sum
// the sqrt(increment)-scaled entries. Lines are independent, so the parallel
// and serial passes produce identical bits.
namespace {

struct AxisPass {
    std::size_t count;    // number of lines
    std::size_t stride;   // step between consecutive entries of a line
    std::size_t n;        // entries per line
};

AxisPass axis_pass(const Grid& grid, int k) {
    AxisPass p;
    p.n = grid.axis(k).size();
    p.stride = 1;
    for (int j = k + 1; j < grid.dim(); ++j) p.stride *= grid.axis(j).size();
    p.count = grid.total() / p.n;
    return p;
}

inline std::size_t line_base(const AxisPass& p, std::size_t line) {
    const std::size_t outer = line / p.stride;
    const std::size_t inner = line % p.stride;
    return outer * (p.n * p.stride) + inner;
}

void line_cumsum(double* v, const std::vector<double>& axis, std::size_t stride) {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        acc += std::sqrt(axis[i] - prev) * v[i * stride];
        v[i * stride] = acc;
        prev = axis[i];
    }
}

}  // namespace

void apply_min_kernel_transform(const Grid& grid, std::span<double> values) {
    if (values.size() != grid.total())
        throw std::invalid_argument("value buffer does not match the grid");
    for (int k = 0; k < grid.dim(); ++k) {
        const AxisPass p = axis_pass(grid, k);
        const auto& ax = grid.axis(k);
        double* base = values.data();
        parallel_for(p.count, [&, base](std::size_t line) {
            line_cumsum(base + line_base(p, line), ax, p.stride);
        });
    }
}

void apply_min_kernel_transform_serial(const Grid& grid,
                                       std::span<double> values) {
    if (values.size() != grid.total())
        throw std::invalid_argument("value buffer does not match the grid");
    for (int k = 0; k < grid.dim(); ++k) {
        const AxisPass p = axis_pass(grid, k);
        for (std::size_t line = 0; line < p.count; ++line)
            line_cumsum(values.data() + line_base(p, line), grid.axis(k), p.stride);
    }
}

FieldSample sample_sheet(const Grid& grid, int d, std::uint64_t seed,
                         std::uint64_t replicate) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    FieldSample s;
    s.grid = grid;
    s.d = d;
    s.seed = seed;
    s.values.assign(d, std::vector<double>(grid.total()));
    NormalStream stream(seed, replicate);
    for (int c = 0; c < d; ++c)
        for (auto& v : s.values[c]) v = stream();
    for (int c = 0; c < d; ++c)
        apply_min_kernel_transform(grid, std::span<double>(s.values[c]));
    return s;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("truncated field file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ofstream& out, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& in) {
    std::uint64_t v = get_u64(in);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

}  // namespace

void write_binary(const FieldSample& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write field file: " + path);
    put_u64(out, s.grid.dim());
    put_u64(out, s.d);
    for (int k = 0; k < s.grid.dim(); ++k) put_u64(out, s.grid.axis(k).size());
    put_u64(out, s.seed);
    for (const auto& coord : s.values)
        for (double v : coord) put_f64(out, v);
}

RawFieldFile read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    RawFieldFile f;
    f.n = get_u64(in);
    f.d = get_u64(in);
    if (f.n < 1 || f.n > 64 || f.d < 1 || f.d > 1024)
        throw std::runtime_error("implausible field file header");
    std::uint64_t total = 1;
    for (std::uint64_t k = 0; k < f.n; ++k) {
        f.counts.push_back(get_u64(in));
        total *= f.counts.back();
    }
    f.seed = get_u64(in);
    f.values.assign(f.d, {});
    for (auto& coord : f.values) {
        coord.resize(total);
        for (auto& v : coord) v = get_f64(in);
    }
    return f;
}

void write_csv(const FieldSample& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    for (int k = 0; k < s.grid.dim(); ++k) out << (k ? "," : "") << "t" << (k + 1);
    for (int c = 0; c < s.d; ++c) out << ",B" << (c + 1);
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < s.grid.total(); ++i) {
        const ParamPoint p = s.grid.point(i);
        for (int k = 0; k < s.grid.dim(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            out << (k ? "," : "") << buf;
        }
        for (int c = 0; c < s.d; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", s.values[c][i]);
            out << "," << buf;
        }
        out << "\n";
    }
}

double bridge_coefficient(const ParamPoint& s, const ParamPoint& t) {
    if (s.size() != t.size() || s.empty())
        throw std::invalid_argument("point dimension mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (!(s[j] >= 0.0) || !(t[j] >= 0.0))
            throw std::invalid_argument("coordinates must be >= 0");
        const double num = std::min(s[j], t[j]);
        if (num == 0.0 && s[j] == 0.0) continue;  // 0/0 = 1 by convention
        prod *= num / s[j];
    }
    return prod;
}

BridgeSample bridge_sample(const FieldSample& base, const ParamPoint& s) {
    if (static_cast<int>(s.size()) != base.grid.dim())
        throw std::invalid_argument("anchor dimension mismatch");
    BridgeSample out{s, base};
    const bool pinned =
        std::any_of(s.begin(), s.end(), [](double c) { return c == 0.0; });
    if (pinned) return out;  // B(s) = 0, bridge equals the base field

    const auto anchor_idx = base.grid.find_index(s);
    if (!anchor_idx)
        throw std::invalid_argument("bridge anchor must be a grid point");
    const std::size_t total = base.grid.total();
    for (int c = 0; c < base.d; ++c) {
        const double bs = base.values[c][*anchor_idx];
        auto& v = out.field.values[c];
        parallel_for(total, [&](std::size_t i) {
            v[i] -= bridge_coefficient(s, base.grid.point(i)) * bs;
        });
    }
    return out;
}

double bridge_cross_cov(const ParamPoint& s, const ParamPoint& t,
                        const ParamPoint& u, const OrderMask& pi) {
    if (!leq(u, s, pi) || !leq(s, t, pi))
        throw std::invalid_argument(
            "requires u preceding s preceding t under the mask");
    return sheet_cov(t, u) - bridge_coefficient(s, t) * sheet_cov(s, u);
}

double bridge_var(const ParamPoint& s, const ParamPoint& t) {
    const double c = bridge_coefficient(s, t);
    double pt = 1.0, ps = 1.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        pt *= t[j];
        ps *= s[j];
    }
    return pt - c * c * ps;
}

Bracket bridge_var_bounds(int n, double a, double b, double dist) {
    if (n < 1 || !(a > 0.0) || !(b > a) || !(dist >= 0.0))
        throw std::invalid_argument("requires n >= 1, 0 < a < b, dist >= 0");
    Bracket out;
    out.lower = std::pow(a, n - 1) * dist / (2.0 * n);
    out.upper = n * std::pow(b, n - 1) * dist;
    return out;
}

double ball_estimate_constant(int n, double a, double b) {
    if (n < 1 || !(a > 0.0) || !(b > a))
        throw std::invalid_argument("requires n >= 1 and 0 < a < b");
    // upper side: P <= eps sqrt(2/(pi sigma_min^2)), sigma_min^2 = a^(n-1) r/(2n)
    const double upper_a = std::sqrt(4.0 * n / (M_PI * std::pow(a, n - 1)));
    // lower side: erf(x) >= (2/sqrt(pi)) x exp(-x^2) at x = eps/(sigma_max
    // sqrt 2), sigma_max^2 = n b^(n-1) r, gives the claimed form for any A in
    // [sqrt(pi n b^(n-1) / 2), 2 n b^(n-1)].
    const double lower_a = std::sqrt(M_PI * n * std::pow(b, n - 1) / 2.0);
    const double cap = 2.0 * n * std::pow(b, n - 1);
    const double a_const = std::max(upper_a, lower_a);
    if (a_const > cap)
        throw std::invalid_argument(
            "variance bracket too wide for a single ball-estimate constant");
    return a_const;
}

std::vector<CornerPath> corner_processes(const FieldSample& s, int coord) {
    if (coord < 0 || coord >= s.d)
        throw std::invalid_argument("coordinate index out of range");
    const int n = s.grid.dim();
    const double a = s.grid.axis(0).front();
    for (int k = 1; k < n; ++k)
        if (s.grid.axis(k).front() != a)
            throw std::invalid_argument("grid corner must be (a,...,a)");
    if (!(a > 0.0))
        throw std::invalid_argument("corner coordinate must be > 0");
    const double scale = std::pow(a, 0.5 * (n - 1));
    std::vector<int> corner_multi(n, 0);
    const double corner_val =
        s.values[coord][s.grid.flat_index(corner_multi)];
    std::vector<CornerPath> out(n);
    for (int k = 0; k < n; ++k) {
        const auto& ax = s.grid.axis(k);
        auto multi = corner_multi;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            multi[k] = static_cast<int>(i);
            out[k].r.push_back(ax[i] - a);
            out[k].x.push_back(
                (s.values[coord][s.grid.flat_index(multi)] - corner_val) / scale);
        }
    }
    return out;
}

CloudSampler::CloudSampler(std::vector<ParamPoint> points)
    : CloudSampler(std::move(points), KernelFn(sheet_cov)) {}

CloudSampler::CloudSampler(std::vector<ParamPoint> points,
                           const KernelFn& kernel)
    : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("empty point cloud");
    Eigen::MatrixXd k = cov_matrix(points_, kernel);
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success)
        throw NearSingularError(
            "point-cloud covariance is not positive definite "
            "(duplicate or degenerate points?)");
    factor_ = llt.matrixL();
}

Eigen::MatrixXd CloudSampler::sample(int d, std::uint64_t seed,
                                     std::uint64_t replicate) const {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    const auto m = static_cast<Eigen::Index>(points_.size());
    NormalStream stream(seed, replicate);
    Eigen::MatrixXd z(m, d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index i = 0; i < m; ++i) z(i, c) = stream();
    return (factor_ * z).transpose();
}

}  // namespace sheetlab
