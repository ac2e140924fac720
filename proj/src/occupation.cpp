#include "sheetlab/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "sheetlab/parallel.hpp"

namespace sheetlab {

std::size_t SpatialGrid::cells() const {
    std::size_t n = 1;
    for (int c : counts) n *= c;
    return n;
}

std::vector<double> SpatialGrid::center(std::size_t flat) const {
    std::vector<double> x(dim());
    std::size_t rem = flat;
    for (int k = dim() - 1; k >= 0; --k) {
        x[k] = origin[k] + (static_cast<double>(rem % counts[k]) + 0.5) * h;
        rem /= counts[k];
    }
    return x;
}

void SpatialGrid::validate() const {
    if (origin.empty() || origin.size() != counts.size())
        throw std::invalid_argument("spatial grid origin/counts mismatch");
    if (!(h > 0.0)) throw std::invalid_argument("spatial cell size must be > 0");
    for (int c : counts)
        if (c < 1) throw std::invalid_argument("spatial grid counts must be >= 1");
}

static void check_values(const SupportValues& values,
                         const std::vector<double>& weights) {
    if (values.rows() < 1 || values.cols() < 1)
        throw std::invalid_argument("empty value matrix");
    if (static_cast<std::size_t>(values.cols()) != weights.size())
        throw std::invalid_argument("support/value size mismatch");
}

double occupation_density(const SupportValues& values,
                          const std::vector<double>& weights,
                          const std::vector<double>& x, double eps) {
    check_values(values, weights);
    if (static_cast<Eigen::Index>(x.size()) != values.rows())
        throw std::invalid_argument("x dimension mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    const int d = static_cast<int>(values.rows());
    double acc = 0.0;
    for (Eigen::Index s = 0; s < values.cols(); ++s) {
        bool in_box = true;
        for (int c = 0; c < d && in_box; ++c)
            in_box = std::abs(values(c, s) - x[c]) <= eps;
        if (in_box) acc += weights[s];
    }
    return acc / std::pow(2.0 * eps, d);
}

SupportValues support_values(const FieldSample& sample,
                             const DiscreteMeasure& mu) {
    mu.validate();
    if (mu.support.dim != sample.grid.dim())
        throw std::invalid_argument("support/sample dimension mismatch");
    SupportValues v(sample.d, mu.support.size());
    for (std::size_t s = 0; s < mu.support.size(); ++s) {
        const auto idx = sample.grid.find_index(mu.support.points[s]);
        if (!idx)
            throw std::invalid_argument(
                "measure support must consist of sample grid points");
        for (int c = 0; c < sample.d; ++c) v(c, s) = sample.values[c][*idx];
    }
    return v;
}

double occupation_density(const FieldSample& sample, const DiscreteMeasure& mu,
                          const std::vector<double>& x, double eps) {
    return occupation_density(support_values(sample, mu), mu.weights, x, eps);
}

SpatialGrid fit_spatial_grid(const std::vector<SupportValues>& replicates,
                             double eps, double h) {
    if (replicates.empty()) throw std::invalid_argument("no replicates");
    if (!(eps > 0.0) || !(h > 0.0))
        throw std::invalid_argument("eps and h must be > 0");
    const int d = static_cast<int>(replicates.front().rows());
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const auto& v : replicates) {
        if (v.rows() != d) throw std::invalid_argument("replicate d mismatch");
        for (int c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], v.row(c).minCoeff());
            hi[c] = std::max(hi[c], v.row(c).maxCoeff());
        }
    }
    SpatialGrid g;
    g.h = h;
    g.origin.resize(d);
    g.counts.resize(d);
    for (int c = 0; c < d; ++c) {
        g.origin[c] = h * (std::floor((lo[c] - eps) / h) - 1.0);
        g.counts[c] =
            static_cast<int>(std::ceil((hi[c] + eps - g.origin[c]) / h)) + 1;
    }
    g.validate();
    return g;
}

OccupationEstimate local_time_field(const std::vector<SupportValues>& replicates,
                                    const std::vector<double>& weights,
                                    const SpatialGrid& grid, double eps,
                                    std::uint64_t seed, std::uint64_t mu_hash) {
    grid.validate();
    if (replicates.empty()) throw std::invalid_argument("no replicates");
    if (!(2.0 * eps >= grid.h))
        throw std::invalid_argument("eps must be at least half the cell size");
    OccupationEstimate est;
    est.grid = grid;
    est.eps = eps;
    est.seed = seed;
    est.mu_hash = mu_hash;
    est.fields.resize(replicates.size());
    const std::size_t cells = grid.cells();
    for (std::size_t r = 0; r < replicates.size(); ++r) {
        check_values(replicates[r], weights);
        auto& field = est.fields[r];
        field.resize(cells);
        const auto& v = replicates[r];
        parallel_for(cells, [&](std::size_t i) {
            field[i] = occupation_density(v, weights, grid.center(i), eps);
        });
    }
    return est;
}

void write_occupation_csv(const OccupationEstimate& est,
                          const std::string& csv_path,
                          const std::string& sidecar_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write csv: " + csv_path);
    for (int k = 0; k < est.grid.dim(); ++k)
        out << (k ? "," : "") << "x" << (k + 1);
    for (std::size_t r = 0; r < est.fields.size(); ++r) out << ",rep" << r;
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < est.grid.cells(); ++i) {
        const auto x = est.grid.center(i);
        for (int k = 0; k < est.grid.dim(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", x[k]);
            out << (k ? "," : "") << buf;
        }
        for (const auto& field : est.fields) {
            std::snprintf(buf, sizeof buf, "%.17g", field[i]);
            out << "," << buf;
        }
        out << "\n";
    }

    nlohmann::json j;
    j["epsilon"] = est.eps;
    j["h"] = est.grid.h;
    j["seed"] = est.seed;
    j["mu_hash"] = est.mu_hash;
    j["origin"] = est.grid.origin;
    j["counts"] = est.grid.counts;
    j["replicates"] = est.fields.size();
    std::ofstream side(sidecar_path);
    if (!side) throw std::runtime_error("cannot write sidecar: " + sidecar_path);
    side << j.dump(2) << "\n";
}

OdfResult odf_check(const SupportValues& values,
                    const std::vector<double>& weights,
                    const std::function<double(const std::vector<double>&)>& f,
                    double eps, double h) {
    check_values(values, weights);
    if (!f) throw std::invalid_argument("needs a test function");
    const int d = static_cast<int>(values.rows());
    OdfResult out;
    std::vector<double> x(d);
    for (Eigen::Index s = 0; s < values.cols(); ++s) {
        for (int c = 0; c < d; ++c) x[c] = values(c, s);
        out.lhs += weights[s] * f(x);
    }
    const SpatialGrid grid = fit_spatial_grid({values}, eps, h);
    const OccupationEstimate est =
        local_time_field({values}, weights, grid, eps, 0, 0);
    const double cell_vol = std::pow(h, d);
    const auto& field = est.fields.front();
    for (std::size_t i = 0; i < grid.cells(); ++i)
        if (field[i] != 0.0) out.rhs += f(grid.center(i)) * field[i] * cell_vol;
    return out;
}

TheoryExponents theory_exponents(int n, int d, double dim_f) {
    if (n < 1 || d < 1) throw std::invalid_argument("requires N, d >= 1");
    if (!(dim_f > 0.5 * d))
        throw std::invalid_argument(
            "dimension must exceed d/2 (no occupation density below that)");
    TheoryExponents out;
    out.gamma = 0.5 * std::min(1.0, 2.0 * dim_f - d);
    out.eta_max = std::min(1.0, (2.0 / (n + 1)) * (dim_f - 0.5 * d));
    out.tau = (dim_f - 0.5 * d) / (2.0 * dim_f + n * (d + 1) + 1.0);
    return out;
}

HolderFit holder_modulus(const OccupationEstimate& est, std::size_t replicate) {
    if (replicate >= est.fields.size())
        throw std::invalid_argument("replicate index out of range");
    est.grid.validate();
    const auto& field = est.fields[replicate];
    const int d = est.grid.dim();
    const int min_count =
        *std::min_element(est.grid.counts.begin(), est.grid.counts.end());
    // dyadic lags 1, 2, 4, ... cells; need two decades of them
    std::vector<int> lags;
    for (int lag = 1; lag < min_count; lag *= 2) lags.push_back(lag);
    if (lags.empty() || lags.back() < 100)
        throw std::invalid_argument(
            "grid too small for two decades of spatial lags");

    HolderFit fit;
    for (int lag : lags) {
        double best = 0.0;
        for (std::size_t i = 0; i < est.grid.cells(); ++i) {
            // offsets along each axis; row-major strides
            std::size_t stride = 1;
            for (int k = d - 1; k >= 0; --k) {
                const std::size_t along =
                    (i / stride) % static_cast<std::size_t>(est.grid.counts[k]);
                if (along + lag < static_cast<std::size_t>(est.grid.counts[k])) {
                    const double diff =
                        std::abs(field[i + lag * stride] - field[i]);
                    best = std::max(best, diff);
                }
                stride *= est.grid.counts[k];
            }
        }
        if (best > 0.0) {
            fit.lags.push_back(lag * est.grid.h);
            fit.moduli.push_back(best);
        }
    }
    if (fit.lags.size() < 3)
        throw std::invalid_argument("not enough nonzero moduli to fit");
    double mx = 0.0, my = 0.0;
    const std::size_t n = fit.lags.size();
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(fit.lags[i]);
        my += std::log(fit.moduli[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(fit.lags[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(fit.moduli[i]) - my);
    }
    fit.exponent = sxy / sxx;
    return fit;
}

namespace {

// Distinct occupied voxels of a d-dimensional point cloud. For d <= 3 with
// voxel indices inside +-2^20 the three indices pack into one 64-bit key
// (21 bits each, offset binary); otherwise raw-byte string keys are used.
// Both paths count exactly; the packed one avoids a per-point allocation.
template <class Getter>
std::size_t voxel_count(int d, std::size_t m, double voxel, Getter&& get) {
    constexpr long long kRange = 1LL << 20;
    if (d <= 3) {
        std::unordered_set<std::uint64_t> occupied;
        occupied.reserve(m);
        bool fits = true;
        for (std::size_t s = 0; s < m && fits; ++s) {
            std::uint64_t key = 0;
            for (int c = 0; c < d; ++c) {
                const auto b =
                    static_cast<long long>(std::floor(get(c, s) / voxel));
                if (b < -kRange || b >= kRange) {
                    fits = false;
                    break;
                }
                key = (key << 21) | static_cast<std::uint64_t>(b + kRange);
            }
            if (fits) occupied.insert(key);
        }
        if (fits) return occupied.size();
    }
    std::unordered_set<std::string> occupied;
    occupied.reserve(m);
    std::string key;
    for (std::size_t s = 0; s < m; ++s) {
        key.clear();
        for (int c = 0; c < d; ++c) {
            const auto b = static_cast<long long>(std::floor(get(c, s) / voxel));
            key.append(reinterpret_cast<const char*>(&b), sizeof b);
        }
        occupied.insert(key);
    }
    return occupied.size();
}

}  // namespace

double image_measure(const SupportValues& values, double voxel) {
    if (!(voxel > 0.0)) throw std::invalid_argument("voxel must be > 0");
    if (values.rows() < 1) throw std::invalid_argument("empty value matrix");
    const int d = static_cast<int>(values.rows());
    const auto n = voxel_count(
        d, static_cast<std::size_t>(values.cols()), voxel,
        [&values](int c, std::size_t s) {
            return values(c, static_cast<Eigen::Index>(s));
        });
    return static_cast<double>(n) * std::pow(voxel, d);
}

double image_measure(const FieldSample& sample, double voxel) {
    if (!(voxel > 0.0)) throw std::invalid_argument("voxel must be > 0");
    if (sample.d < 1) throw std::invalid_argument("empty sample");
    const auto n = voxel_count(
        sample.d, sample.grid.total(), voxel,
        [&sample](int c, std::size_t s) { return sample.values[c][s]; });
    return static_cast<double>(n) * std::pow(voxel, sample.d);
}

namespace {

// largest Chebyshev radius (in cells) around `flat` inside the passing mask
int chebyshev_radius(const SpatialGrid& grid, const std::vector<char>& mask,
                     std::size_t flat) {
    const int d = grid.dim();
    std::vector<int> center(d);
    std::size_t rem = flat;
    for (int k = d - 1; k >= 0; --k) {
        center[k] = static_cast<int>(rem % grid.counts[k]);
        rem /= grid.counts[k];
    }
    int radius = 0;
    for (;; ++radius) {
        // does the box of radius (radius + 1) still pass?
        const int r = radius + 1;
        for (int k = 0; k < d; ++k)
            if (center[k] - r < 0 || center[k] + r >= grid.counts[k])
                return radius;
        std::vector<int> idx(d, -r);
        bool ok = true;
        while (ok) {
            std::size_t f = 0;
            bool on_shell = false;
            for (int k = 0; k < d; ++k) {
                f = f * grid.counts[k] + (center[k] + idx[k]);
                on_shell = on_shell || std::abs(idx[k]) == r;
            }
            if (on_shell && !mask[f]) ok = false;
            int k = d - 1;
            while (k >= 0 && ++idx[k] > r) idx[k--] = -r;
            if (k < 0) break;
        }
        if (!ok) return radius;
    }
}

}  // namespace

std::vector<InteriorBall> interior_detect(
    const std::vector<OccupationEstimate>& per_rotation, double threshold_frac) {
    if (!(threshold_frac > 0.0) || !(threshold_frac < 1.0))
        throw std::invalid_argument("threshold fraction must lie in (0, 1)");
    std::vector<InteriorBall> out;
    for (std::size_t rot = 0; rot < per_rotation.size(); ++rot) {
        const auto& est = per_rotation[rot];
        est.grid.validate();
        if (est.fields.empty())
            throw std::invalid_argument("estimate has no replicate fields");
        const std::size_t cells = est.grid.cells();
        std::vector<char> mask(cells, 1);
        for (const auto& field : est.fields) {
            const double thr =
                threshold_frac * *std::max_element(field.begin(), field.end());
            for (std::size_t i = 0; i < cells; ++i)
                if (!(field[i] > thr)) mask[i] = 0;
        }
        InteriorBall ball;
        ball.rotation = static_cast<int>(rot);
        int best_r = -1;
        std::size_t best_cell = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (!mask[i]) continue;
            const int r = chebyshev_radius(est.grid, mask, i);
            if (r > best_r) {
                best_r = r;
                best_cell = i;
            }
        }
        if (best_r >= 0) {
            ball.found = true;
            ball.center = est.grid.center(best_cell);
            ball.radius = (best_r + 0.5) * est.grid.h;
        }
        out.push_back(std::move(ball));
    }
    return out;
}

std::vector<std::vector<double>> merge_detections(
    const std::vector<InteriorBall>& balls) {
    std::vector<std::vector<double>> candidates;
    for (const auto& b : balls) {
        if (!b.found) continue;
        bool covered = false;
        for (const auto& c : candidates) {
            double cheb = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                cheb = std::max(cheb, std::abs(c[k] - b.center[k]));
            if (cheb <= b.radius) {
                covered = true;
                break;
            }
        }
        if (!covered) candidates.push_back(b.center);
    }
    return candidates;
}

double detection_coverage(const std::vector<InteriorBall>& balls,
                          const std::vector<std::vector<double>>& candidates) {
    if (balls.empty()) return 0.0;
    std::size_t covered = 0;
    for (const auto& b : balls) {
        if (!b.found) continue;
        for (const auto& c : candidates) {
            double cheb = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                cheb = std::max(cheb, std::abs(c[k] - b.center[k]));
            if (cheb <= b.radius) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(balls.size());
}

}  // namespace sheetlab
