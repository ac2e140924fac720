#include "sheetlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "sheetlab/parallel.hpp"

namespace sheetlab {

void DiscreteMeasure::validate() const {
    support.validate();
    if (weights.size() != support.size())
        throw std::invalid_argument("weight/support size mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < -1e-15) throw std::invalid_argument("negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::uniform(DiscreteSet f) {
    f.validate();
    DiscreteMeasure mu;
    const std::size_t m = f.size();
    mu.support = std::move(f);
    mu.weights.assign(m, 1.0 / static_cast<double>(m));
    return mu;
}

DiscreteMeasure DiscreteMeasure::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measure csv: " + path);
    DiscreteMeasure mu;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> vals;
        double v;
        while (ls >> v) vals.push_back(v);
        if (vals.empty()) {
            if (lineno == 1) continue;  // header row
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed row");
        }
        if (vals.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": need coordinates and a weight");
        mu.weights.push_back(vals.back());
        vals.pop_back();
        if (mu.support.points.empty())
            mu.support.dim = static_cast<int>(vals.size());
        mu.support.points.push_back(std::move(vals));
    }
    mu.validate();
    return mu;
}

void DiscreteMeasure::to_csv(const std::string& path) const {
    validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write measure csv: " + path);
    for (int k = 0; k < support.dim; ++k) out << "t" << (k + 1) << ",";
    out << "weight\n";
    char buf[64];
    for (std::size_t i = 0; i < support.size(); ++i) {
        for (double c : support.points[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", weights[i]);
        out << buf << "\n";
    }
}

std::uint64_t DiscreteMeasure::hash() const {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&h](double x) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& p : support.points)
        for (double c : p) mix(c);
    for (double w : weights) mix(w);
    return h;
}

KernelSpec KernelSpec::riesz(double alpha, DiagonalPolicy policy,
                             double cell_size) {
    KernelSpec k;
    k.alpha = alpha;
    k.policy = policy;
    k.cell_size = cell_size;
    k.validate();
    return k;
}

KernelSpec KernelSpec::radial(std::function<double(double)> f,
                              DiagonalPolicy policy, double cell_size) {
    KernelSpec k;
    k.alpha = std::numeric_limits<double>::quiet_NaN();
    k.f = std::move(f);
    k.policy = policy;
    k.cell_size = cell_size;
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    if (!f && !(alpha > 0.0))
        throw std::invalid_argument("Riesz exponent must be > 0");
    if (policy == DiagonalPolicy::cell_average && !(cell_size > 0.0))
        throw std::invalid_argument("cell_average needs a positive cell size");
}

double KernelSpec::eval(double r) const {
    if (!(r > 0.0))
        throw std::invalid_argument("kernel evaluated at nonpositive distance");
    return f ? f(r) : std::pow(r, -alpha);
}

double KernelSpec::diagonal() const {
    if (policy == DiagonalPolicy::exclude) return 0.0;
    const double h = cell_size;
    if (!f) {
        // mean Riesz kernel between two uniform points of a 1-D cell: exact
        // for alpha < 1, half-cell separation where the average diverges
        if (alpha < 1.0)
            return 2.0 * std::pow(h, -alpha) / ((1.0 - alpha) * (2.0 - alpha));
        return std::pow(0.5 * h, -alpha);
    }
    // midpoint quadrature of (2/h^2) (h - r) f(r) on dyadic blocks toward
    // r = 0; the grading keeps integrable singularities accurate
    const int blocks = 48, nodes = 16;
    double acc = 0.0;
    double hi = h;
    for (int b = 0; b < blocks; ++b) {
        const double lo = hi * 0.5;
        const double dr = (hi - lo) / nodes;
        for (int i = 0; i < nodes; ++i) {
            const double r = lo + (i + 0.5) * dr;
            acc += (h - r) * f(r) * dr;
        }
        hi = lo;
    }
    return 2.0 * acc / (h * h);
}

std::string KernelSpec::policy_name() const {
    return policy == DiagonalPolicy::exclude ? "exclude" : "cell_average";
}

static double dist(const ParamPoint& a, const ParamPoint& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

// row potential sum_{j != i} w_j k(r_ij); shared by energy and Frank-Wolfe
static double row_potential(const std::vector<ParamPoint>& pts,
                            const std::vector<double>& w, const KernelSpec& k,
                            std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == i) continue;
        const double r = dist(pts[i], pts[j]);
        if (r == 0.0)
            throw std::invalid_argument("coincident support points");
        acc += w[j] * k.eval(r);
    }
    return acc;
}

double energy(const DiscreteMeasure& mu, const KernelSpec& kernel) {
    mu.validate();
    kernel.validate();
    const auto& pts = mu.support.points;
    const double diag = kernel.diagonal();
    return parallel_sum(pts.size(), [&](std::size_t i) {
        return mu.weights[i] * (row_potential(pts, mu.weights, kernel, i) +
                                mu.weights[i] * diag);
    });
}

double energy_serial(const DiscreteMeasure& mu, const KernelSpec& kernel) {
    mu.validate();
    kernel.validate();
    const auto& pts = mu.support.points;
    const double diag = kernel.diagonal();
    return serial_sum(pts.size(), [&](std::size_t i) {
        return mu.weights[i] * (row_potential(pts, mu.weights, kernel, i) +
                                mu.weights[i] * diag);
    });
}

CapacityResult capacity(const DiscreteSet& f, const KernelSpec& kernel,
                        const FrankWolfeOptions& opt) {
    f.validate();
    kernel.validate();
    const std::size_t m = f.size();
    const auto& pts = f.points;
    const double diag = kernel.diagonal();

    std::vector<double> w;
    if (opt.start.empty()) {
        w.assign(m, 1.0 / static_cast<double>(m));
    } else {
        if (opt.start.size() != m)
            throw std::invalid_argument("start vector size mismatch");
        w = opt.start;
        double s = 0.0;
        for (double x : w) {
            if (x < 0.0) throw std::invalid_argument("start weights must be >= 0");
            s += x;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("start weights must sum to 1");
    }

    // column of the kernel matrix, diagonal included per policy
    auto column = [&](std::size_t v) {
        std::vector<double> col(m);
        parallel_for(m, [&](std::size_t i) {
            col[i] = (i == v) ? diag : kernel.eval(dist(pts[i], pts[v]));
        });
        return col;
    };

    // potentials P_i = (K w)_i
    auto full_potentials = [&]() {
        std::vector<double> p(m);
        parallel_for(m, [&](std::size_t i) {
            p[i] = row_potential(pts, w, kernel, i) + w[i] * diag;
        });
        return p;
    };

    std::vector<double> p = full_potentials();
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a[i] * b[i];
        return s;
    };

    const int max_iters =
        opt.max_iters > 0 ? opt.max_iters : static_cast<int>(50 * m);
    CapacityResult out;
    out.alpha = kernel.f ? std::numeric_limits<double>::quiet_NaN()
                         : kernel.alpha;
    out.size = m;
    out.diagonal_policy = kernel.policy_name();

    double e = dot(w, p);
    int iter = 0;
    double gap = 0.0;
    bool converged = false;
    for (; iter < max_iters; ++iter) {
        // lowest-index argmin / active argmax of the potentials
        std::size_t fw = 0, away = m;
        for (std::size_t i = 1; i < m; ++i)
            if (p[i] < p[fw]) fw = i;
        for (std::size_t i = 0; i < m; ++i)
            if (w[i] > 0.0 && (away == m || p[i] > p[away])) away = i;

        gap = 2.0 * (e - p[fw]);
        if (gap < opt.tol * (1.0 + std::abs(e))) {
            converged = true;
            break;
        }
        const double away_gap = 2.0 * (p[away] - e);

        const bool use_away = (m > 1) && away_gap > gap && w[away] < 1.0;
        const std::size_t v = use_away ? away : fw;
        const std::vector<double> col = column(v);
        const double kvv = col[v];
        const double curved = kvv - 2.0 * p[v] + e;  // d^T K d for both cases

        if (!use_away) {
            double gmax = 1.0;
            double step = (curved > 0.0) ? gap / (2.0 * curved) : gmax;
            step = std::clamp(step, 0.0, gmax);
            for (std::size_t i = 0; i < m; ++i)
                w[i] = (1.0 - step) * w[i] + (i == v ? step : 0.0);
            for (std::size_t i = 0; i < m; ++i)
                p[i] = (1.0 - step) * p[i] + step * col[i];
        } else {
            const double gmax = w[v] / (1.0 - w[v]);
            double step = (curved > 0.0) ? away_gap / (2.0 * curved) : gmax;
            step = std::clamp(step, 0.0, gmax);
            for (std::size_t i = 0; i < m; ++i)
                w[i] = (1.0 + step) * w[i] - (i == v ? step : 0.0);
            w[v] = std::max(w[v], 0.0);
            for (std::size_t i = 0; i < m; ++i)
                p[i] = (1.0 + step) * p[i] - step * col[i];
        }
        if ((iter & 0x1ff) == 0x1ff) p = full_potentials();  // kill drift
        e = dot(w, p);
    }

    out.energy = std::max(e, 0.0);
    out.capacity = out.energy > 0.0
                       ? 1.0 / out.energy
                       : std::numeric_limits<double>::infinity();
    out.gap = gap;
    out.iterations = iter;
    out.converged = converged || m == 1;
    out.minimizer.support = f;
    out.minimizer.weights = std::move(w);
    return out;
}

CriterionIntegral f_criterion_integral(const std::function<double(double)>& f,
                                       int n, int d) {
    if (!f) throw std::invalid_argument("needs a scale function");
    if (n < 1 || d < 1) throw std::invalid_argument("requires N, d >= 1");
    const double expo = n - 0.5 * d - 1.0;
    CriterionIntegral out;
    double prev_block = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 48; ++k) {
        const double hi = std::pow(2.0, -k);
        const double lo = 0.5 * hi;
        // 16-node midpoint rule on [lo, hi]
        double block = 0.0;
        const double dr = (hi - lo) / 16;
        for (int i = 0; i < 16; ++i) {
            const double t = lo + (i + 0.5) * dr;
            block += f(t) * std::pow(t, expo) * dr;
        }
        out.value += block;
        if (k > 8 && block >= 0.999 * prev_block) {
            out.finite = false;  // dyadic blocks stopped decaying
            return out;
        }
        prev_block = block;
    }
    out.finite = out.value < 1e12;
    return out;
}

double frostman_constant(const DiscreteMeasure& mu, double exponent) {
    mu.validate();
    if (!(exponent > 0.0)) throw std::invalid_argument("exponent must be > 0");
    const auto& pts = mu.support.points;
    const std::size_t m = pts.size();

    std::vector<ParamPoint> sites = pts;
    if (m <= 512) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                ParamPoint mid(pts[i].size());
                for (std::size_t k = 0; k < mid.size(); ++k)
                    mid[k] = 0.5 * (pts[i][k] + pts[j][k]);
                sites.push_back(std::move(mid));
            }
    }

    std::vector<double> best(sites.size());
    parallel_for(sites.size(), [&](std::size_t s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double r = dist(sites[s], pts[j]);
            if (r == 0.0) continue;  // the site's own atom
            acc += mu.weights[j] * std::pow(r, -exponent);
        }
        best[s] = acc;
    });
    return *std::max_element(best.begin(), best.end());
}

DimensionFit box_dimension(const DiscreteSet& f,
                           const std::vector<double>& scales) {
    f.validate();
    if (scales.size() < 3)
        throw std::invalid_argument("needs at least 3 scales");
    double lo = *std::min_element(scales.begin(), scales.end());
    double hi = *std::max_element(scales.begin(), scales.end());
    if (!(lo > 0.0) || hi / lo < 10.0)
        throw std::invalid_argument("scales must span at least one decade");

    DimensionFit fit;
    fit.scales = scales;
    std::sort(fit.scales.rbegin(), fit.scales.rend());
    for (double h : fit.scales) {
        std::unordered_set<std::string> boxes;
        std::string key;
        for (const auto& p : f.points) {
            key.clear();
            for (double c : p) {
                const auto b = static_cast<long long>(std::floor(c / h));
                key.append(reinterpret_cast<const char*>(&b), sizeof b);
            }
            boxes.insert(key);
        }
        fit.counts.push_back(boxes.size());
    }

    const std::size_t n = fit.scales.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(1.0 / fit.scales[i]);
        ys[i] = std::log(static_cast<double>(fit.counts[i]));
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.dimension = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = my + fit.dimension * (xs[i] - mx);
        rss += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

DiscreteSet make_interval(double a, double b, int m) {
    if (!(a >= 0.0) || !(b > a) || m < 1)
        throw std::invalid_argument("requires 0 <= a < b and m >= 1");
    DiscreteSet f;
    f.dim = 1;
    const double h = (b - a) / m;
    for (int i = 0; i < m; ++i) f.points.push_back({a + (i + 0.5) * h});
    return f;
}

static std::vector<double> cantor_midpoints(int level, double ratio) {
    if (level < 0 || level > 20)
        throw std::invalid_argument("cantor level out of range");
    if (!(ratio > 0.0) || !(ratio < 0.5))
        throw std::invalid_argument("cantor ratio must lie in (0, 1/2)");
    std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
    for (int k = 0; k < level; ++k) {
        std::vector<std::pair<double, double>> next;
        next.reserve(iv.size() * 2);
        for (auto [x, y] : iv) {
            const double len = (y - x) * ratio;
            next.push_back({x, x + len});
            next.push_back({y - len, y});
        }
        iv = std::move(next);
    }
    std::vector<double> mids;
    mids.reserve(iv.size());
    for (auto [x, y] : iv) mids.push_back(0.5 * (x + y));
    return mids;
}

DiscreteSet make_cantor(int level, double ratio, double a, double b) {
    if (!(a >= 0.0) || !(b > a))
        throw std::invalid_argument("requires 0 <= a < b");
    DiscreteSet f;
    f.dim = 1;
    for (double m : cantor_midpoints(level, ratio))
        f.points.push_back({a + (b - a) * m});
    return f;
}

DiscreteSet make_cantor_product(int level, double ratio, double a, double b) {
    if (!(a >= 0.0) || !(b > a))
        throw std::invalid_argument("requires 0 <= a < b");
    const auto mids = cantor_midpoints(level, ratio);
    DiscreteSet f;
    f.dim = 2;
    for (double x : mids)
        for (double y : mids)
            f.points.push_back({a + (b - a) * x, a + (b - a) * y});
    return f;
}

DiscreteSet make_cube(const GridSpec& spec) {
    spec.validate();
    DiscreteSet f;
    f.dim = spec.dim();
    std::vector<std::vector<double>> axes;
    for (int n : spec.points_per_axis) {
        std::vector<double> g(n);
        if (n == 1) {
            g[0] = spec.lower;
        } else {
            const double step = (spec.upper - spec.lower) / (n - 1);
            for (int i = 0; i < n; ++i) g[i] = spec.lower + step * i;
        }
        axes.push_back(std::move(g));
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        ParamPoint p(f.dim);
        for (int k = 0; k < f.dim; ++k) p[k] = axes[k][idx[k]];
        f.points.push_back(std::move(p));
        int k = f.dim - 1;
        while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return f;
}

}  // namespace sheetlab
