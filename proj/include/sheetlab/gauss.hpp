#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sheetlab/order.hpp"

namespace sheetlab {

// Numerical slack used by every bound assertion: 1e-10 * (1 + |value|).
inline double bound_slack(double v) { return 1e-10 * (1.0 + std::abs(v)); }

// prod_k min(s_k, t_k). Zero coordinates are legal and give 0.
double sheet_cov(const ParamPoint& s, const ParamPoint& t);

// E[(B(u) - B(v))^2] = prod u + prod v - 2 prod min(u, v).
double incremental_variance(const ParamPoint& u, const ParamPoint& v);

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};

// Two-sided bracket for the increment variance of points in [a, b]^N:
//   a^(N-1) |u-v| / sqrt(N)  <=  E (B(u)-B(v))^2  <=  N b^(N-1) |u-v|.
Bracket increment_bounds(const ParamPoint& u, const ParamPoint& v, double a,
                         double b);

// Finite linear combination sum_i c_i B(p_i) of one coordinate process.
struct LinComb {
    std::vector<ParamPoint> points;
    std::vector<double> coeffs;

    static LinComb value(ParamPoint p);
    static LinComb increment(ParamPoint u, ParamPoint v);  // B(u) - B(v)
    void validate() const;
};

using KernelFn =
    std::function<double(const ParamPoint&, const ParamPoint&)>;

// Covariance matrix of the sheet (or a caller-supplied kernel) at `pts`.
Eigen::MatrixXd cov_matrix(const std::vector<ParamPoint>& pts);
Eigen::MatrixXd cov_matrix(const std::vector<ParamPoint>& pts,
                           const KernelFn& kernel);

// Conditioning matrix is numerically singular: duplicate conditioners, a zero
// eigenvalue, or condition number beyond 1e12. The fix is a coarser
// conditioning set, never silent regularization.
class NearSingularError : public std::runtime_error {
  public:
    explicit NearSingularError(const std::string& what)
        : std::runtime_error(what) {}
};

// Var(target | field at conditioners) by Schur complement on the joint
// covariance. Empty conditioner list gives the unconditional variance.
// Points must have strictly positive coordinates (a zero coordinate pins the
// field to 0 and the joint law degenerates).
double cond_var(const LinComb& target,
                const std::vector<ParamPoint>& conditioners);
double cond_var(const LinComb& target,
                const std::vector<ParamPoint>& conditioners,
                const KernelFn& kernel);

// Brownian-motion conditional variances of X(t) - X(s) given X at the s_i.
// Interior case, conditioners on both sides of both endpoints:
//   s1 <= s <= s2 <= s3 <= t <= s4 (s1 < s2, s3 < s4).
double bm_cond_var_case1(double s1, double s, double s2, double s3, double t,
                         double s4);
// Shared-gap case, s and t between consecutive conditioners:
//   s1 <= s <= t <= s2 (s1 < s2).
double bm_cond_var_case2(double s1, double s, double t, double s2);

// Sectorial lower bound for Var(B(u) | B(t^1)..B(t^n)), points in [a, inf)^N:
//   (a^(N-1) / 2) * sum_k min( min_j |u_k - t^j_k|, u_k - a ).
// The per-axis gap is capped by the distance to the corner coordinate: the
// axis processes out of (a,..,a) start at a known zero value, which acts as
// one more conditioning time. Without the cap the bound is false (N = 1,
// u = 0.6, single conditioner at 1.3: variance 0.323 < half of 0.7).
double lnd_lower_bound(const ParamPoint& u,
                       const std::vector<ParamPoint>& conditioners, double a);

// Increment variant for Var(B(u) - B(v) | ...), with the same per-axis cap:
//   (a^(N-1)/2) * sum_k min( g_k(u) + g_k(v), |u_k - v_k| ),
//   g_k(x) = min( min_j |x_k - t^j_k|, x_k - a ).
double lnd_increment_lower_bound(const ParamPoint& u, const ParamPoint& v,
                                 const std::vector<ParamPoint>& conditioners,
                                 double a);

// det Cov(B(p_1),...,B(p_n)) as Var(B(p_1)) * prod_j Var(B(p_j) | earlier),
// the numerically stable route. det_cov_direct is the dense cross-check.
double det_cov_chain(const std::vector<ParamPoint>& pts);
double det_cov_direct(const std::vector<ParamPoint>& pts);

// Weighted sum S(t) = sum_j r_j X(t_j) of one Brownian path evaluated in
// disjoint time blocks [a_j, b_j]; every block length must fit inside every
// inter-block gap.
struct SelfIntersectionSpec {
    std::vector<double> r;
    std::vector<std::pair<double, double>> blocks;

    int order() const { return static_cast<int>(r.size()); }
    void validate() const;
    void require_in_blocks(const ParamPoint& t, const char* what) const;
};

// Cov(S(s), S(t)) = sum_{j,k} r_j r_k min(s_j, t_k).
double si_cov(const SelfIntersectionSpec& spec, const ParamPoint& s,
              const ParamPoint& t);
KernelFn si_kernel(const SelfIntersectionSpec& spec);

// Lower bound for Var(S(u) | S(t^1)..S(t^n)) with every point in the blocks:
//   (min_k r_k^2 / (2N)) * sum_k min( min_j |u_k - t^j_k|, u_k ).
// The u_k cap plays the role of the known zero value of the underlying path
// at time 0; the block-separation constraint handles the cross-axis
// conditioning times.
double si_lnd_bound(const SelfIntersectionSpec& spec, const ParamPoint& u,
                    const std::vector<ParamPoint>& conditioners);

// P{|Y| <= eps} and P{|Y - x| <= eps} for Y ~ N(0, sigma^2), exact via erf.
double centered_ball_prob(double sigma, double eps);
double shifted_ball_prob(double sigma, double x, double eps);

// Lower bound for P{|Y - x| <= eps} when |x| <= alpha * sigma:
//   exp(-alpha^2/2 - alpha*beta) * P{|Y| <= eps}   if eps <= beta * sigma,
//   sqrt(2/pi) * beta * exp(-(alpha+beta)^2 / 2)   otherwise.
double gaussian_shift_bound(double sigma, double alpha, double beta, double x,
                            double eps);

// Integrand of the finite-dimensional capacity criterion for a general field:
//   prod_j cond_vars[j]^(-gamma) / detcov^(d/2), gamma in (0, 1).
double general_field_integrand(const std::vector<double>& cond_vars,
                               double detcov, double gamma, int d);

}  // namespace sheetlab
