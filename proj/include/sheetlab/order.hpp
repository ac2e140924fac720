#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sheetlab {

// Point of the parameter orthant [0, inf)^N.
using ParamPoint = std::vector<double>;

void require_point(const ParamPoint& p, int dim, const char* what);

// Subset of the N axes. Axis k belongs to the mask iff bit k is set. The mask
// selects which coordinates are compared with <= (the rest use >=).
struct OrderMask {
    std::uint32_t bits = 0;
    int dim = 0;

    OrderMask() = default;
    OrderMask(std::uint32_t b, int n);

    bool contains(int axis) const { return (bits >> axis) & 1u; }

    static OrderMask full(int n);                // all axes: the usual order
    static std::vector<OrderMask> all(int n);    // all 2^N masks
};

// a precedes b under the mask: <= on mask axes, >= off them. Ties count as
// membership in both directions.
bool leq(const ParamPoint& a, const ParamPoint& b, const OrderMask& pi);

// The canonical mask with a preceding b: axes where a[k] <= b[k].
OrderMask find_mask(const ParamPoint& a, const ParamPoint& b);

// Masked meet: min on mask axes, max off them. Idempotent, commutative, and
// the largest lower bound for the masked order.
ParamPoint meet(const ParamPoint& a, const ParamPoint& b, const OrderMask& pi);

// Uniform product grid over [lower, upper]^N.
struct GridSpec {
    double lower = 0.0;
    double upper = 1.0;
    std::vector<int> points_per_axis;

    int dim() const { return static_cast<int>(points_per_axis.size()); }
    void validate() const;
};

// Finite list of distinct nonnegative points, typically read from a set file.
struct DiscreteSet {
    int dim = 0;
    std::vector<ParamPoint> points;

    std::size_t size() const { return points.size(); }
    void validate() const;

    // Line-oriented text: one point per line, whitespace-separated
    // coordinates, '#' starts a comment, blank lines ignored.
    static DiscreteSet from_file(const std::string& path);
    void to_file(const std::string& path) const;
};

// Thrown when a rotation maps a set point outside the nonnegative orthant.
class RotationRangeError : public std::runtime_error {
  public:
    RotationRangeError(const ParamPoint& image, int axis);
    ParamPoint image;  // offending image point
    int axis;          // first negative coordinate
};

// Orthogonality (max |R^T R - I| <= 1e-10) and det = +1 to the same slop.
void require_rotation(const Eigen::MatrixXd& r);

// Image set {R t}. Throws RotationRangeError if any image coordinate is
// negative; the identity is always admissible for nonnegative sets.
DiscreteSet apply_rotation(const Eigen::MatrixXd& r, const DiscreteSet& f);

// Up to `count` rotations keeping f inside the orthant, identity first.
// N = 2 samples angles uniformly on [-pi, pi); N >= 3 samples Haar-ish via QR
// of a Gaussian matrix with sign and determinant correction. Candidates that
// push f outside the orthant are rejected; gives up after a fixed attempt
// budget, so fewer than `count` may come back (never zero: identity stays).
std::vector<Eigen::MatrixXd> rotation_cover(int count, const DiscreteSet& f,
                                            std::uint64_t seed);

// Rotation lists persist as JSON: {"N": n, "rotations": [row-major nested
// arrays]}.
void save_rotations(const std::string& path,
                    const std::vector<Eigen::MatrixXd>& rs);
std::vector<Eigen::MatrixXd> load_rotations(const std::string& path);

}  // namespace sheetlab
