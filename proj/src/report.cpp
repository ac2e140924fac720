#include "sheetlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sheetlab {

bool ExperimentReport::all_satisfied() const {
    for (const auto& b : bounds_checked)
        if (!b.satisfied) return false;
    return true;
}

void ExperimentReport::add_estimate(const std::string& label, double value,
                                    double se) {
    estimates.push_back({label, value, se});
}

void ExperimentReport::add_bound(const std::string& label, bool satisfied,
                                 double slack) {
    bounds_checked.push_back({label, satisfied, slack});
}

nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["parameters"] = r.parameters;
    auto est = nlohmann::json::array();
    for (const auto& e : r.estimates)
        est.push_back({{"label", e.label}, {"value", e.value}, {"se", e.se}});
    j["estimates"] = std::move(est);
    auto bounds = nlohmann::json::array();
    for (const auto& b : r.bounds_checked)
        bounds.push_back({{"label", b.label},
                          {"satisfied", b.satisfied},
                          {"slack", b.slack}});
    j["bounds_checked"] = std::move(bounds);
    j["seed"] = r.seed;
    return j;
}

void write_report_json(const ExperimentReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << report_json(r).dump(2) << "\n";
}

void write_report_csv(const ExperimentReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report csv: " + path);
    out << "name,record,label,value,se,satisfied,slack\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& e : r.estimates)
        out << r.name << ",estimate," << e.label << "," << num(e.value) << ","
            << num(e.se) << ",,\n";
    for (const auto& b : r.bounds_checked)
        out << r.name << ",bound," << b.label << ",,,"
            << (b.satisfied ? "true" : "false") << "," << num(b.slack) << "\n";
}

std::string report_summary(const ExperimentReport& r) {
    std::ostringstream os;
    os << "experiment " << r.name << " (seed " << r.seed << ")\n";
    for (const auto& e : r.estimates) {
        os << "  " << e.label << " = " << e.value;
        if (e.se > 0.0) os << " +- " << e.se;
        os << "\n";
    }
    for (const auto& b : r.bounds_checked)
        os << "  [" << (b.satisfied ? "ok" : "VIOLATED") << "] " << b.label
           << " (slack " << b.slack << ")\n";
    os << "  bounds " << (r.all_satisfied() ? "all satisfied" : "VIOLATED")
       << ", runtime " << r.runtime_seconds << " s\n";
    return os.str();
}

nlohmann::json capacity_json(const CapacityResult& r) {
    nlohmann::json j;
    if (std::isnan(r.alpha))
        j["alpha"] = nullptr;
    else
        j["alpha"] = r.alpha;
    j["size"] = r.size;
    j["energy"] = r.energy;
    if (std::isinf(r.capacity))
        j["capacity"] = "inf";
    else
        j["capacity"] = r.capacity;
    j["gap"] = r.gap;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["diagonal_policy"] = r.diagonal_policy;
    return j;
}

void write_capacity_json(const CapacityResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write capacity record: " + path);
    out << capacity_json(r).dump(2) << "\n";
}

}  // namespace sheetlab
