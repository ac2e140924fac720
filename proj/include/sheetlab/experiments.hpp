#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sheetlab/gauss.hpp"
#include "sheetlab/occupation.hpp"
#include "sheetlab/order.hpp"
#include "sheetlab/potential.hpp"
#include "sheetlab/report.hpp"

namespace sheetlab {

// Image-measure refinement trend: samples the sheet on finer and finer
// discretizations of a parameter set while shrinking the voxel, and checks
// that the voxel measure of the image stabilizes (when the set's dimension
// exceeds d/2) or decays (when it falls below d/2), in the pooled means and
// in at least 95% of replicate batches. The capacity of the discretized set
// at exponent d/2 is computed per refinement level and must trend the same
// way. set_kind: "interval" (N=1), "square", or "cantor_product" (N=2).
ExperimentReport exp_kahane(int n, int d, const std::string& set_kind,
                            int replicates,
                            const std::vector<double>& voxel_schedule,
                            std::uint64_t seed, double ratio = 0.2,
                            int base_level = 4);

// Point-hitting probabilities P{some field value within eps of x} across an
// eps schedule, with the second-moment lower bound computed from the same
// samples (the bound holds sample-wise by the Cauchy-Schwarz inequality).
// A nested companion subset sharing each realization checks that the
// capacity ordering of the two sets matches the hit-frequency ordering in
// every replicate batch.
ExperimentReport exp_level_hitting(int n, int d, const DiscreteSet& f,
                                   const std::vector<double>& x,
                                   const std::vector<double>& eps_schedule,
                                   int replicates, std::uint64_t seed);

// Two-point joint small-ball probabilities, computed exactly through the
// conditional (anchored-bridge) factorization and 1-D quadrature, divided by
// the envelope (min((2 eps)^2 / |t-s|^(1/2), 1))^d. Reports the largest
// ratio as the empirical envelope constant and checks it stays within a
// factor 2 when eps is halved twice.
ExperimentReport exp_joint_bound(int n, int d, const GridSpec& grid,
                                 const std::vector<double>& x, double eps,
                                 int pairs, std::uint64_t seed);

// On a small product grid: checks that projecting onto the past of s and
// then of t equals projecting onto the past of the meet (order-commutation
// of the conditioning operators), and that the maximal second moment
// sup_t E[(proj_t Z)^2] stays below 4^N E[Z^2] with a 3-standard-error
// margin. pi_bits = -1 runs every axis mask.
ExperimentReport exp_commutation(int n, const GridSpec& grid, int pi_bits,
                                 int trials, std::uint64_t seed);

// Anchored-bridge identities on random ordered triples of the grid's box:
// orthogonality of the bridge to the anchor's past (zero cross-covariance to
// 1e-12), the variance bracket against Euclidean separation, the two-sided
// small-ball sandwich with the bracket-derived constant, and the
// zero-coordinate anchor convention.
ExperimentReport exp_bridge_suite(int n, const GridSpec& grid, int trials,
                                  std::uint64_t seed);

// Interior-point detection for the image of f under a rotation cover: one
// realization per replicate on the union of all rotated copies, one
// occupation field per rotation from that shared realization, detected balls
// merged into a candidate list. Requires dim_f > d/2.
ExperimentReport exp_interior(int n, int d, const DiscreteSet& f, double dim_f,
                              int rotation_count, int replicates,
                              std::uint64_t seed);

// Weighted self-intersection field of one Brownian path on a product of time
// blocks: per replicate, samples the path on the union of block grids, forms
// the field on the product grid, and runs interior detection on its
// occupation estimate. Also verifies the sectorial lower bound for the
// field's conditional variances on random configurations (no sampling).
ExperimentReport exp_mountford(const SelfIntersectionSpec& spec, int d,
                               int replicates, std::uint64_t seed);

// Shared CLI-facing knobs; unset fields fall back to per-experiment
// defaults. Every resolved value is echoed in the report's parameter map.
struct ExperimentSettings {
    std::optional<int> n;
    std::optional<int> d;
    std::optional<int> replicates;
    std::optional<int> trials;
    std::optional<int> points;      // per-axis set resolution
    std::optional<int> level;       // Cantor construction level
    std::optional<int> rotations;
    std::optional<int> pairs;
    std::optional<int> pi;          // axis mask bits, -1 = all
    std::optional<double> eps;
    std::optional<double> ratio;    // Cantor contraction ratio
    std::optional<std::string> set_kind;
    std::vector<double> voxels;     // empty = default schedule
    std::uint64_t seed = 1;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
};

// Stable, alphabetical list of runnable experiments.
const std::vector<ExperimentInfo>& experiment_registry();

// Dispatch by registry name; throws std::invalid_argument for unknown names.
ExperimentReport run_experiment(const std::string& name,
                                const ExperimentSettings& settings);

}  // namespace sheetlab
