#include "sheetlab/gauss.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace sheetlab {

static void require_same_dim(const ParamPoint& s, const ParamPoint& t) {
    if (s.size() != t.size() || s.empty())
        throw std::invalid_argument("point dimension mismatch");
}

double sheet_cov(const ParamPoint& s, const ParamPoint& t) {
    require_same_dim(s, t);
    double prod = 1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k] >= 0.0) || !(t[k] >= 0.0))
            throw std::invalid_argument("coordinates must be >= 0");
        prod *= std::min(s[k], t[k]);
    }
    return prod;
}

double incremental_variance(const ParamPoint& u, const ParamPoint& v) {
    require_same_dim(u, v);
    double pu = 1.0, pv = 1.0, pm = 1.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(u[k] >= 0.0) || !(v[k] >= 0.0))
            throw std::invalid_argument("coordinates must be >= 0");
        pu *= u[k];
        pv *= v[k];
        pm *= std::min(u[k], v[k]);
    }
    return pu + pv - 2.0 * pm;
}

static double norm2(const ParamPoint& u, const ParamPoint& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
    return std::sqrt(s);
}

Bracket increment_bounds(const ParamPoint& u, const ParamPoint& v, double a,
                         double b) {
    require_same_dim(u, v);
    if (!(a > 0.0) || !(b > a))
        throw std::invalid_argument("requires 0 < a < b");
    for (std::size_t k = 0; k < u.size(); ++k)
        if (u[k] < a || u[k] > b || v[k] < a || v[k] > b)
            throw std::invalid_argument("points must lie in [a, b]^N");
    const int n = static_cast<int>(u.size());
    const double dist = norm2(u, v);
    Bracket out;
    out.lower = std::pow(a, n - 1) * dist / std::sqrt(double(n));
    out.upper = n * std::pow(b, n - 1) * dist;
    return out;
}

LinComb LinComb::value(ParamPoint p) {
    LinComb c;
    c.points.push_back(std::move(p));
    c.coeffs.push_back(1.0);
    return c;
}

LinComb LinComb::increment(ParamPoint u, ParamPoint v) {
    LinComb c;
    c.points.push_back(std::move(u));
    c.points.push_back(std::move(v));
    c.coeffs = {1.0, -1.0};
    return c;
}

void LinComb::validate() const {
    if (points.empty() || points.size() != coeffs.size())
        throw std::invalid_argument("linear combination needs matching points/coeffs");
    for (const auto& p : points)
        if (p.size() != points.front().size() || p.empty())
            throw std::invalid_argument("linear combination mixes dimensions");
}

Eigen::MatrixXd cov_matrix(const std::vector<ParamPoint>& pts) {
    return cov_matrix(pts, KernelFn(sheet_cov));
}

Eigen::MatrixXd cov_matrix(const std::vector<ParamPoint>& pts,
                           const KernelFn& kernel) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            k(i, j) = k(j, i) = kernel(pts[i], pts[j]);
    return k;
}

static void require_positive_coords(const std::vector<ParamPoint>& pts,
                                    const char* what) {
    for (const auto& p : pts)
        for (double c : p)
            if (!(c > 0.0))
                throw std::invalid_argument(
                    std::string(what) +
                    ": coordinates must be > 0 (a zero coordinate pins the field)");
}

double cond_var(const LinComb& target,
                const std::vector<ParamPoint>& conditioners) {
    return cond_var(target, conditioners, KernelFn(sheet_cov));
}

double cond_var(const LinComb& target,
                const std::vector<ParamPoint>& conditioners,
                const KernelFn& kernel) {
    target.validate();
    require_positive_coords(target.points, "cond_var target");
    require_positive_coords(conditioners, "cond_var conditioner");
    for (const auto& t : conditioners)
        if (t.size() != target.points.front().size())
            throw std::invalid_argument("conditioner dimension mismatch");
    {
        std::set<ParamPoint> seen;
        for (const auto& t : conditioners)
            if (!seen.insert(t).second)
                throw NearSingularError(
                    "duplicate conditioner point makes the covariance singular");
    }

    double var_t = 0.0;
    for (std::size_t i = 0; i < target.points.size(); ++i)
        for (std::size_t j = 0; j < target.points.size(); ++j)
            var_t += target.coeffs[i] * target.coeffs[j] *
                     kernel(target.points[i], target.points[j]);
    if (conditioners.empty()) return std::max(var_t, 0.0);

    const auto m = static_cast<Eigen::Index>(conditioners.size());
    Eigen::MatrixXd sigma = cov_matrix(conditioners, kernel);
    Eigen::VectorXd cross(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < target.points.size(); ++i)
            c += target.coeffs[i] * kernel(target.points[i], conditioners[j]);
        cross[j] = c;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw NearSingularError(
            "conditioning covariance has condition number > 1e12; "
            "coarsen the conditioning set");

    const Eigen::VectorXd w = eig.eigenvectors().transpose() * cross;
    double explained = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
        explained += w[j] * w[j] / eig.eigenvalues()[j];
    return std::max(var_t - explained, 0.0);
}

double bm_cond_var_case1(double s1, double s, double s2, double s3, double t,
                         double s4) {
    if (!(s1 >= 0.0) || !(s1 <= s) || !(s <= s2) || !(s2 <= s3) || !(s3 <= t) ||
        !(t <= s4) || !(s1 < s2) || !(s3 < s4))
        throw std::invalid_argument(
            "requires 0 <= s1 <= s <= s2 <= s3 <= t <= s4 with s1<s2, s3<s4");
    return (s2 - s) * (s - s1) / (s2 - s1) + (s4 - t) * (t - s3) / (s4 - s3);
}

double bm_cond_var_case2(double s1, double s, double t, double s2) {
    if (!(s1 >= 0.0) || !(s1 <= s) || !(s <= t) || !(t <= s2) || !(s1 < s2))
        throw std::invalid_argument(
            "requires 0 <= s1 <= s <= t <= s2 with s1 < s2");
    const double gap = s2 - s1;
    return (t - s) * (gap - (t - s)) / gap;
}

static void require_above_corner(const ParamPoint& p, double a, int dim) {
    if (static_cast<int>(p.size()) != dim)
        throw std::invalid_argument("point dimension mismatch");
    for (double c : p)
        if (c < a)
            throw std::invalid_argument("point lies below the corner [a, inf)^N");
}

static double min_axis_gap(const std::vector<ParamPoint>& conds, int k,
                           double uk) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : conds) m = std::min(m, std::abs(uk - t[k]));
    return m;
}

double lnd_lower_bound(const ParamPoint& u,
                       const std::vector<ParamPoint>& conditioners, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("corner a must be > 0");
    if (conditioners.empty())
        throw std::invalid_argument("needs at least one conditioner");
    const int n = static_cast<int>(u.size());
    require_above_corner(u, a, n);
    for (const auto& t : conditioners) require_above_corner(t, a, n);
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
        sum += std::min(min_axis_gap(conditioners, k, u[k]), u[k] - a);
    return 0.5 * std::pow(a, n - 1) * sum;
}

double lnd_increment_lower_bound(const ParamPoint& u, const ParamPoint& v,
                                 const std::vector<ParamPoint>& conditioners,
                                 double a) {
    if (!(a > 0.0)) throw std::invalid_argument("corner a must be > 0");
    if (conditioners.empty())
        throw std::invalid_argument("needs at least one conditioner");
    const int n = static_cast<int>(u.size());
    require_above_corner(u, a, n);
    require_above_corner(v, a, n);
    for (const auto& t : conditioners) require_above_corner(t, a, n);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double both =
            std::min(min_axis_gap(conditioners, k, u[k]), u[k] - a) +
            std::min(min_axis_gap(conditioners, k, v[k]), v[k] - a);
        sum += std::min(both, std::abs(u[k] - v[k]));
    }
    return 0.5 * std::pow(a, n - 1) * sum;
}

double det_cov_chain(const std::vector<ParamPoint>& pts) {
    if (pts.empty()) throw std::invalid_argument("needs at least one point");
    require_positive_coords(pts, "det_cov point");
    {
        std::set<ParamPoint> seen;
        for (const auto& p : pts)
            if (!seen.insert(p).second)
                throw std::invalid_argument("duplicate point gives det 0");
    }
    double det = sheet_cov(pts[0], pts[0]);
    std::vector<ParamPoint> earlier{pts[0]};
    for (std::size_t j = 1; j < pts.size(); ++j) {
        det *= cond_var(LinComb::value(pts[j]), earlier);
        earlier.push_back(pts[j]);
    }
    return det;
}

double det_cov_direct(const std::vector<ParamPoint>& pts) {
    if (pts.empty()) throw std::invalid_argument("needs at least one point");
    return cov_matrix(pts).determinant();
}

void SelfIntersectionSpec::validate() const {
    if (r.empty() || r.size() != blocks.size())
        throw std::invalid_argument("weights/blocks size mismatch");
    for (double w : r)
        if (w == 0.0) throw std::invalid_argument("weights must be nonzero");
    double prev_b = 0.0;
    for (const auto& [a, b] : blocks) {
        if (!(a > prev_b) || !(b > a))
            throw std::invalid_argument("blocks must satisfy 0 < a1 < b1 < a2 < ...");
        prev_b = b;
    }
    // every block length must fit inside every gap between consecutive blocks
    double max_len = 0.0, min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        max_len = std::max(max_len, blocks[j].second - blocks[j].first);
        if (j + 1 < blocks.size())
            min_gap = std::min(min_gap, blocks[j + 1].first - blocks[j].second);
    }
    if (blocks.size() > 1 && max_len > min_gap)
        throw std::invalid_argument("a block is longer than an inter-block gap");
}

void SelfIntersectionSpec::require_in_blocks(const ParamPoint& t,
                                             const char* what) const {
    if (static_cast<int>(t.size()) != order())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    for (std::size_t j = 0; j < t.size(); ++j)
        if (t[j] < blocks[j].first || t[j] > blocks[j].second)
            throw std::invalid_argument(std::string(what) +
                                        ": coordinate outside its block");
}

double si_cov(const SelfIntersectionSpec& spec, const ParamPoint& s,
              const ParamPoint& t) {
    spec.validate();
    spec.require_in_blocks(s, "si_cov s");
    spec.require_in_blocks(t, "si_cov t");
    double sum = 0.0;
    for (int j = 0; j < spec.order(); ++j)
        for (int k = 0; k < spec.order(); ++k)
            sum += spec.r[j] * spec.r[k] * std::min(s[j], t[k]);
    return sum;
}

KernelFn si_kernel(const SelfIntersectionSpec& spec) {
    spec.validate();
    return [spec](const ParamPoint& s, const ParamPoint& t) {
        return si_cov(spec, s, t);
    };
}

double si_lnd_bound(const SelfIntersectionSpec& spec, const ParamPoint& u,
                    const std::vector<ParamPoint>& conditioners) {
    spec.validate();
    spec.require_in_blocks(u, "si_lnd u");
    if (conditioners.empty())
        throw std::invalid_argument("needs at least one conditioner");
    for (const auto& t : conditioners) spec.require_in_blocks(t, "si_lnd conditioner");
    const int n = spec.order();
    double rmin2 = std::numeric_limits<double>::infinity();
    for (double w : spec.r) rmin2 = std::min(rmin2, w * w);
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
        sum += std::min(min_axis_gap(conditioners, k, u[k]), u[k]);
    return rmin2 / (2.0 * n) * sum;
}

double centered_ball_prob(double sigma, double eps) {
    if (!(sigma > 0.0) || !(eps >= 0.0))
        throw std::invalid_argument("requires sigma > 0 and eps >= 0");
    return std::erf(eps / (sigma * std::sqrt(2.0)));
}

static double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double shifted_ball_prob(double sigma, double x, double eps) {
    if (!(sigma > 0.0) || !(eps >= 0.0))
        throw std::invalid_argument("requires sigma > 0 and eps >= 0");
    return normal_cdf((x + eps) / sigma) - normal_cdf((x - eps) / sigma);
}

double gaussian_shift_bound(double sigma, double alpha, double beta, double x,
                            double eps) {
    if (!(sigma > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("requires sigma, alpha, beta, eps > 0");
    if (std::abs(x) > alpha * sigma)
        throw std::invalid_argument("requires |x| <= alpha * sigma");
    if (eps <= beta * sigma)
        return std::exp(-0.5 * alpha * alpha - alpha * beta) *
               centered_ball_prob(sigma, eps);
    const double ab = alpha + beta;
    return std::sqrt(2.0 / M_PI) * beta * std::exp(-0.5 * ab * ab);
}

double general_field_integrand(const std::vector<double>& cond_vars,
                               double detcov, double gamma, int d) {
    if (cond_vars.empty()) throw std::invalid_argument("needs conditional variances");
    if (!(detcov > 0.0)) throw std::invalid_argument("detcov must be > 0");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    double prod = 1.0;
    for (double v : cond_vars) {
        if (!(v > 0.0))
            throw std::invalid_argument("conditional variances must be > 0");
        prod *= std::pow(v, -gamma);
    }
    return prod / std::pow(detcov, 0.5 * d);
}

}  // namespace sheetlab
