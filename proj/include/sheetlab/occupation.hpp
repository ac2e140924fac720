#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sheetlab/potential.hpp"
#include "sheetlab/sampler.hpp"

namespace sheetlab {

// Uniform cell grid in value space R^d. Cell i covers
// [origin + i h, origin + (i+1) h) per axis; centers at origin + (i+1/2) h.
struct SpatialGrid {
    std::vector<double> origin;
    double h = 0.0;
    std::vector<int> counts;

    int dim() const { return static_cast<int>(origin.size()); }
    std::size_t cells() const;
    std::vector<double> center(std::size_t flat) const;
    void validate() const;
};

// Field values of one replicate at the measure's support: row c = coordinate
// process c, column s = support atom s.
using SupportValues = Eigen::MatrixXd;

// l_mu^eps(x) = sum_s w_s 1{ max_c |B_c(s) - x_c| <= eps } / (2 eps)^d.
double occupation_density(const SupportValues& values,
                          const std::vector<double>& weights,
                          const std::vector<double>& x, double eps);

// Convenience over a grid sample: the measure's support must consist of grid
// points of the sample.
double occupation_density(const FieldSample& sample, const DiscreteMeasure& mu,
                          const std::vector<double>& x, double eps);
SupportValues support_values(const FieldSample& sample,
                             const DiscreteMeasure& mu);

// Grid that covers every replicate's value range inflated by eps + h, with
// h-aligned origin.
SpatialGrid fit_spatial_grid(const std::vector<SupportValues>& replicates,
                             double eps, double h);

// Per-replicate occupation fields on a shared spatial grid. Replicate fields
// are never averaged. Requires 2 eps >= h (the box must be resolvable).
struct OccupationEstimate {
    SpatialGrid grid;
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t mu_hash = 0;
    std::vector<std::vector<double>> fields;  // one per replicate
};

OccupationEstimate local_time_field(const std::vector<SupportValues>& replicates,
                                    const std::vector<double>& weights,
                                    const SpatialGrid& grid, double eps,
                                    std::uint64_t seed, std::uint64_t mu_hash);

// CSV: x1..xd then one column per replicate; JSON sidecar carries
// {epsilon, h, seed, mu_hash, origin, counts, replicates}.
void write_occupation_csv(const OccupationEstimate& est,
                          const std::string& csv_path,
                          const std::string& sidecar_path);

// Occupation-density formula check for one replicate:
//   lhs = sum_s w_s f(B(s)),  rhs = sum_cells f(center) l^eps(center) h^d.
struct OdfResult {
    double lhs = 0.0;
    double rhs = 0.0;
};
OdfResult odf_check(const SupportValues& values,
                    const std::vector<double>& weights,
                    const std::function<double(const std::vector<double>&)>& f,
                    double eps, double h);

// Exponents attached to a parameter set of Hausdorff dimension dimF > d/2:
// gamma: midpoint of the admissible interval (0, min(1, 2 dimF - d));
// eta_max: best spatial Holder exponent min(1, (2/(N+1)) (dimF - d/2));
// tau: joint space-level modulus exponent
//   (dimF - d/2) / (2 dimF + N (d+1) + 1).
struct TheoryExponents {
    double gamma = 0.0;
    double eta_max = 0.0;
    double tau = 0.0;
};
TheoryExponents theory_exponents(int n, int d, double dim_f);

// Log-log slope of the max occupation increment against dyadic lags; needs
// lags spanning two decades. One-sided diagnostic: a slope well below 0
// would indicate blowup of the estimated field.
struct HolderFit {
    double exponent = 0.0;
    std::vector<double> lags;
    std::vector<double> moduli;
};
HolderFit holder_modulus(const OccupationEstimate& est, std::size_t replicate);

// Voxel-counting measure of the value point cloud: distinct occupied voxels
// times voxel^d.
double image_measure(const SupportValues& values, double voxel);
double image_measure(const FieldSample& sample, double voxel);

// Largest passing Chebyshev ball per rotation. A cell passes when every
// replicate field of that estimate exceeds its own threshold
// (threshold_frac times the field's spatial max) at the cell.
struct InteriorBall {
    int rotation = 0;
    bool found = false;
    std::vector<double> center;
    double radius = 0.0;
};
std::vector<InteriorBall> interior_detect(
    const std::vector<OccupationEstimate>& per_rotation,
    double threshold_frac = 0.1);

// Merge overlapping detections into a finite candidate list of centers.
std::vector<std::vector<double>> merge_detections(
    const std::vector<InteriorBall>& balls);

// Fraction of detected balls containing at least one candidate, over all
// rotations (missing detections count as uncovered).
double detection_coverage(const std::vector<InteriorBall>& balls,
                          const std::vector<std::vector<double>>& candidates);

}  // namespace sheetlab
