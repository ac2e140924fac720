#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sheetlab/order.hpp"

namespace sheetlab {

// Probability measure on a finite support.
struct DiscreteMeasure {
    DiscreteSet support;
    std::vector<double> weights;

    void validate() const;  // weights >= -1e-15, sum within 1e-12 of 1
    static DiscreteMeasure uniform(DiscreteSet f);

    // CSV: header t1..tN,weight then one atom per row.
    static DiscreteMeasure from_csv(const std::string& path);
    void to_csv(const std::string& path) const;

    // FNV-1a over the raw bytes of coordinates and weights.
    std::uint64_t hash() const;
};

// How the i = j terms of the energy double sum are handled. `exclude` drops
// them (default; downward-biased, degenerate as an exact minimization
// objective). `cell_average` charges each atom the mean kernel over a 1-D
// cell of the given size, the self-energy of the piece of the underlying set
// the atom stands for; this keeps the quadratic form positive definite.
enum class DiagonalPolicy { exclude, cell_average };

struct KernelSpec {
    double alpha = 0.5;                 // Riesz exponent r^-alpha
    std::function<double(double)> f;    // generic radial kernel, overrides alpha
    DiagonalPolicy policy = DiagonalPolicy::exclude;
    double cell_size = 0.0;             // required for cell_average

    static KernelSpec riesz(double alpha,
                            DiagonalPolicy policy = DiagonalPolicy::exclude,
                            double cell_size = 0.0);
    static KernelSpec radial(std::function<double(double)> f,
                             DiagonalPolicy policy = DiagonalPolicy::exclude,
                             double cell_size = 0.0);

    void validate() const;
    double eval(double r) const;   // r > 0
    double diagonal() const;       // self-interaction term, 0 for exclude
    std::string policy_name() const;
};

// sum_{i != j} w_i w_j k(|s_i - s_j|) + sum_i w_i^2 * diagonal().
// Throws on coincident support points. The parallel path and the serial
// reference accumulate in the same order and agree bitwise.
double energy(const DiscreteMeasure& mu, const KernelSpec& kernel);
double energy_serial(const DiscreteMeasure& mu, const KernelSpec& kernel);

struct FrankWolfeOptions {
    double tol = 1e-8;           // stop when gap < tol * (1 + |energy|)
    int max_iters = 0;           // 0 = 50 * support size
    std::vector<double> start;   // empty = uniform weights
};

struct CapacityResult {
    double alpha = 0.0;          // NaN for generic kernels
    std::size_t size = 0;
    double energy = 0.0;         // minimized energy I*
    double capacity = 0.0;       // 1 / I*, +inf sentinel when I* = 0
    double gap = 0.0;            // final duality gap
    int iterations = 0;
    bool converged = false;
    std::string diagonal_policy;
    DiscreteMeasure minimizer;
};

// Minimizes w^T K w over the probability simplex by Frank-Wolfe with away
// steps and exact line search; ties in vertex selection break to the lowest
// index. Deterministic for fixed inputs.
CapacityResult capacity(const DiscreteSet& f, const KernelSpec& kernel,
                        const FrankWolfeOptions& opt = {});

// Convergence test of the scale-function criterion integral
//   int_0^1 f(t) t^(N - d/2 - 1) dt
// by dyadic-block quadrature toward 0. finite = false means the blocks fail
// to decay (the integral diverges and the associated capacity degenerates).
struct CriterionIntegral {
    double value = 0.0;
    bool finite = true;
};
CriterionIntegral f_criterion_integral(const std::function<double(double)>& f,
                                       int n, int d);

// max over candidate sites x (support atoms and pairwise midpoints) of
// sum_{t != x} w_t |x - t|^-exponent.
double frostman_constant(const DiscreteMeasure& mu, double exponent);

struct DimensionFit {
    double dimension = 0.0;
    double residual = 0.0;                  // RMS residual of the log-log fit
    std::vector<double> scales;
    std::vector<std::size_t> counts;        // occupied closed boxes per scale
};

// Least-squares slope of log(box count) against log(1/h). Needs >= 3 scales
// spanning at least one decade.
DimensionFit box_dimension(const DiscreteSet& f,
                           const std::vector<double>& scales);

// Reference sets. Interval atoms sit at cell centers; Cantor sets are the
// level-k construction with left/right pieces scaled by `ratio`, one atom at
// each subinterval midpoint, affinely mapped onto [a, b].
DiscreteSet make_interval(double a, double b, int m);
DiscreteSet make_cantor(int level, double ratio, double a, double b);
DiscreteSet make_cantor_product(int level, double ratio, double a, double b);
DiscreteSet make_cube(const GridSpec& spec);

}  // namespace sheetlab
