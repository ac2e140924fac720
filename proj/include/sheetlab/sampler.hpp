#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sheetlab/gauss.hpp"
#include "sheetlab/order.hpp"

namespace sheetlab {

// Product grid with per-axis strictly increasing nonnegative coordinates.
// Flat storage is row-major: the last axis varies fastest.
class Grid {
  public:
    static Grid uniform(const GridSpec& spec);
    static Grid from_axes(std::vector<std::vector<double>> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t total() const { return total_; }
    const std::vector<double>& axis(int k) const { return axes_[k]; }

    ParamPoint point(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& multi) const;
    // Grid-point lookup with per-coordinate tolerance 1e-9 * max(1, |g|).
    std::optional<std::size_t> find_index(const ParamPoint& p) const;

  private:
    std::vector<std::vector<double>> axes_;
    std::size_t total_ = 0;
};

// In-place application of the sheet's exact sampling operator: along every
// axis, scale by sqrt of the coordinate increments and cumulative-sum. This
// is the tensor product of the per-axis lower-triangular factors of the 1-D
// min kernel; applied to iid standard normals it yields the sheet exactly.
// Never materializes a dense total x total matrix.
void apply_min_kernel_transform(const Grid& grid, std::span<double> values);
// Plain-loop reference kept for testing; output is bit-identical.
void apply_min_kernel_transform_serial(const Grid& grid,
                                       std::span<double> values);

// One realization of the d-coordinate sheet on a grid. Bit-identical for a
// given (grid, d, seed) regardless of worker count.
struct FieldSample {
    Grid grid;
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> values;  // d arrays, grid.total() each

    double value(int coord, std::size_t flat) const {
        return values[coord][flat];
    }
};

// replicate selects an independent stream derived from (seed, replicate).
FieldSample sample_sheet(const Grid& grid, int d, std::uint64_t seed,
                         std::uint64_t replicate = 0);

// Binary layout: u64 N, d, per-axis counts, seed (little endian), then one
// row-major little-endian f64 array per coordinate.
void write_binary(const FieldSample& s, const std::string& path);
struct RawFieldFile {
    std::uint64_t n = 0, d = 0, seed = 0;
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<double>> values;
};
RawFieldFile read_binary(const std::string& path);

// CSV layout: header t1..tN,B1..Bd, one grid point per row (row-major order).
void write_csv(const FieldSample& s, const std::string& path);

// prod_j min(s_j, t_j) / s_j with 0/0 = 1.
double bridge_coefficient(const ParamPoint& s, const ParamPoint& t);

// Bridged field B_s(t) = B(t) - C(s,t) B(s). The anchor must be a grid point
// unless it has a zero coordinate (then B(s) = 0 and the bridge is the base).
struct BridgeSample {
    ParamPoint anchor;
    FieldSample field;
};
BridgeSample bridge_sample(const FieldSample& base, const ParamPoint& s);

// E[B_s(t) B(u)] for u preceding s preceding t under the mask; 0 in exact
// arithmetic, returned for residual checks.
double bridge_cross_cov(const ParamPoint& s, const ParamPoint& t,
                        const ParamPoint& u, const OrderMask& pi);

// Var B_s(t) = prod t - C(s,t)^2 prod s.
double bridge_var(const ParamPoint& s, const ParamPoint& t);

// For s, t in [a, b]^N with s preceding t under some axis mask:
//   a^(N-1) |s-t| / (2N)  <=  Var B_s(t)  <=  N b^(N-1) |s-t|,
// |.| Euclidean. The upper side is the unconditional increment bound; the
// conditional variance can exceed b^(N-1)|s-t| alone (s=(1,1), t=(2,2), b=2
// gives 3 > 2 sqrt 2), so the extra factor N is not droppable.
Bracket bridge_var_bounds(int n, double a, double b, double dist);

// Constant A for the small-ball sandwich of P{|B_s(t)| <= eps}:
//   (1/A) exp(-eps^2 / (A r)) eps / sqrt(r)  <=  P  <=  A eps / sqrt(r),
// r = |s - t|. Derived from the variance bracket; throws if the bracket is
// too wide for a single constant to serve both sides.
double ball_estimate_constant(int n, double a, double b);

// Rescaled axis paths out of the grid corner (a,...,a):
//   X_k(r) = (B(a,..,a+r,..,a) - B(corner)) / a^((N-1)/2), Var X_k(r) = r.
struct CornerPath {
    std::vector<double> r;  // offsets along the axis
    std::vector<double> x;
};
std::vector<CornerPath> corner_processes(const FieldSample& s, int coord = 0);

// Exact Gaussian sampling on an arbitrary finite point cloud through one
// Cholesky factor of the kernel matrix, shared across replicates. This is
// the path for rotated sets, which are not product grids.
class CloudSampler {
  public:
    CloudSampler(std::vector<ParamPoint> points, const KernelFn& kernel);
    CloudSampler(std::vector<ParamPoint> points);  // sheet kernel

    std::size_t size() const { return points_.size(); }
    const std::vector<ParamPoint>& points() const { return points_; }

    // d x m matrix of field values, streams derived from (seed, replicate).
    Eigen::MatrixXd sample(int d, std::uint64_t seed,
                           std::uint64_t replicate) const;

  private:
    std::vector<ParamPoint> points_;
    Eigen::MatrixXd factor_;
};

}  // namespace sheetlab
