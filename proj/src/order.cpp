#include "sheetlab/order.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sheetlab/rng.hpp"

namespace sheetlab {

void require_point(const ParamPoint& p, int dim, const char* what) {
    if (static_cast<int>(p.size()) != dim) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                    std::to_string(dim) + ", got " +
                                    std::to_string(p.size()));
    }
    for (double c : p)
        if (!(c >= 0.0))
            throw std::invalid_argument(std::string(what) +
                                        ": coordinates must be >= 0");
}

OrderMask::OrderMask(std::uint32_t b, int n) : bits(b), dim(n) {
    if (n < 1 || n > 31) throw std::invalid_argument("mask dimension out of range");
    if (b >> n) throw std::invalid_argument("mask has bits beyond the dimension");
}

OrderMask OrderMask::full(int n) {
    return OrderMask((n >= 31) ? 0u : ((1u << n) - 1u), n);
}

std::vector<OrderMask> OrderMask::all(int n) {
    if (n < 1 || n > 20)
        throw std::invalid_argument("mask enumeration limited to N <= 20");
    std::vector<OrderMask> out;
    out.reserve(std::size_t(1) << n);
    for (std::uint32_t b = 0; b < (1u << n); ++b) out.emplace_back(b, n);
    return out;
}

static void check_pair(const ParamPoint& a, const ParamPoint& b,
                       const OrderMask& pi) {
    if (a.size() != b.size() ||
        static_cast<int>(a.size()) != pi.dim)
        throw std::invalid_argument("point/mask dimension mismatch");
}

bool leq(const ParamPoint& a, const ParamPoint& b, const OrderMask& pi) {
    check_pair(a, b, pi);
    for (int k = 0; k < pi.dim; ++k) {
        if (pi.contains(k) ? (a[k] > b[k]) : (a[k] < b[k])) return false;
    }
    return true;
}

OrderMask find_mask(const ParamPoint& a, const ParamPoint& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("point dimension mismatch");
    std::uint32_t bits = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] <= b[k]) bits |= (1u << k);
    return OrderMask(bits, static_cast<int>(a.size()));
}

ParamPoint meet(const ParamPoint& a, const ParamPoint& b, const OrderMask& pi) {
    check_pair(a, b, pi);
    ParamPoint m(a.size());
    for (int k = 0; k < pi.dim; ++k)
        m[k] = pi.contains(k) ? std::min(a[k], b[k]) : std::max(a[k], b[k]);
    return m;
}

void GridSpec::validate() const {
    if (points_per_axis.empty())
        throw std::invalid_argument("grid needs at least one axis");
    if (!(lower >= 0.0) || !(upper > lower))
        throw std::invalid_argument("grid requires 0 <= lower < upper");
    for (int n : points_per_axis)
        if (n < 1) throw std::invalid_argument("grid axis needs >= 1 points");
}

void DiscreteSet::validate() const {
    if (dim < 1) throw std::invalid_argument("set dimension must be >= 1");
    std::set<ParamPoint> seen;
    for (const auto& p : points) {
        require_point(p, dim, "set point");
        if (!seen.insert(p).second)
            throw std::invalid_argument("set contains a duplicate point");
    }
}

DiscreteSet DiscreteSet::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open set file: " + path);
    DiscreteSet out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        ParamPoint p;
        double c;
        while (ls >> c) p.push_back(c);
        if (!ls.eof())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed coordinate");
        if (p.empty()) continue;
        if (out.points.empty()) out.dim = static_cast<int>(p.size());
        if (static_cast<int>(p.size()) != out.dim)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": inconsistent dimension");
        out.points.push_back(std::move(p));
    }
    if (out.points.empty())
        throw std::runtime_error("set file has no points: " + path);
    out.validate();
    return out;
}

void DiscreteSet::to_file(const std::string& path) const {
    validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write set file: " + path);
    out << "# " << points.size() << " points, dimension " << dim << "\n";
    char buf[64];
    for (const auto& p : points) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            out << (k ? " " : "") << buf;
        }
        out << "\n";
    }
}

RotationRangeError::RotationRangeError(const ParamPoint& img, int ax)
    : std::runtime_error("rotation leaves the nonnegative orthant at axis " +
                         std::to_string(ax)),
      image(img),
      axis(ax) {}

void require_rotation(const Eigen::MatrixXd& r) {
    if (r.rows() != r.cols() || r.rows() < 1)
        throw std::invalid_argument("rotation must be square");
    const auto n = r.rows();
    double ortho = (r.transpose() * r - Eigen::MatrixXd::Identity(n, n))
                       .cwiseAbs()
                       .maxCoeff();
    if (ortho > 1e-10)
        throw std::invalid_argument("matrix is not orthogonal");
    if (std::abs(r.determinant() - 1.0) > 1e-10)
        throw std::invalid_argument("matrix is not a proper rotation (det != 1)");
}

DiscreteSet apply_rotation(const Eigen::MatrixXd& r, const DiscreteSet& f) {
    require_rotation(r);
    if (r.rows() != f.dim)
        throw std::invalid_argument("rotation/set dimension mismatch");
    DiscreteSet out;
    out.dim = f.dim;
    out.points.reserve(f.points.size());
    Eigen::VectorXd v(f.dim);
    for (const auto& p : f.points) {
        for (int k = 0; k < f.dim; ++k) v[k] = p[k];
        Eigen::VectorXd w = r * v;
        ParamPoint q(f.dim);
        for (int k = 0; k < f.dim; ++k) {
            if (w[k] < 0.0) throw RotationRangeError(ParamPoint(w.data(), w.data() + f.dim), k);
            q[k] = w[k];
        }
        out.points.push_back(std::move(q));
    }
    return out;
}

static bool keeps_orthant(const Eigen::MatrixXd& r, const DiscreteSet& f) {
    Eigen::VectorXd v(f.dim);
    for (const auto& p : f.points) {
        for (int k = 0; k < f.dim; ++k) v[k] = p[k];
        if (((r * v).array() < 0.0).any()) return false;
    }
    return true;
}

std::vector<Eigen::MatrixXd> rotation_cover(int count, const DiscreteSet& f,
                                            std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("rotation count must be >= 1");
    f.validate();
    const int n = f.dim;
    std::vector<Eigen::MatrixXd> out;
    out.push_back(Eigen::MatrixXd::Identity(n, n));

    if (n == 1 || count == 1) return out;

    std::mt19937_64 eng = replicate_engine(seed, 0x726f74ULL);
    std::uniform_real_distribution<double> uangle(-M_PI, M_PI);
    std::normal_distribution<double> normal;

    const int max_attempts = 512 * count;
    for (int attempt = 0; attempt < max_attempts &&
                          static_cast<int>(out.size()) < count;
         ++attempt) {
        Eigen::MatrixXd r(n, n);
        if (n == 2) {
            double phi = uangle(eng);
            r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
        } else {
            Eigen::MatrixXd g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = normal(eng);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            r = qr.householderQ();
            // sign fix: make the QR factorization unique (R diagonal > 0)
            Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
            for (int j = 0; j < n; ++j)
                if (rr(j, j) < 0.0) r.col(j) *= -1.0;
            // determinant correction onto the rotation component
            if (r.determinant() < 0.0) r.col(0) *= -1.0;
        }
        if (keeps_orthant(r, f)) out.push_back(std::move(r));
    }
    return out;
}

void save_rotations(const std::string& path,
                    const std::vector<Eigen::MatrixXd>& rs) {
    if (rs.empty()) throw std::invalid_argument("no rotations to save");
    nlohmann::json j;
    j["N"] = rs.front().rows();
    auto arr = nlohmann::json::array();
    for (const auto& r : rs) {
        require_rotation(r);
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
            auto row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < r.cols(); ++k) row.push_back(r(i, k));
            rows.push_back(std::move(row));
        }
        arr.push_back(std::move(rows));
    }
    j["rotations"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write rotations: " + path);
    out << j.dump(2) << "\n";
}

std::vector<Eigen::MatrixXd> load_rotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rotations: " + path);
    nlohmann::json j;
    in >> j;
    const int n = j.at("N").get<int>();
    std::vector<Eigen::MatrixXd> out;
    for (const auto& rows : j.at("rotations")) {
        Eigen::MatrixXd r(n, n);
        if (static_cast<int>(rows.size()) != n)
            throw std::runtime_error("rotation row count mismatch");
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n)
                throw std::runtime_error("rotation column count mismatch");
            for (int k = 0; k < n; ++k) r(i, k) = rows[i][k].get<double>();
        }
        require_rotation(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace sheetlab
