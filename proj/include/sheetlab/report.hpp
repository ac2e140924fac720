#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheetlab/potential.hpp"

namespace sheetlab {

struct Estimate {
    std::string label;
    double value = 0.0;
    double se = 0.0;  // standard error; 0 for exact quantities
};

struct BoundCheck {
    std::string label;
    bool satisfied = false;
    double slack = 0.0;  // margin by which the bound holds (negative = violated)
};

// One experiment run. Everything except runtime_seconds is a pure function of
// (name, parameters, seed); runtime stays out of the serialized report so
// reruns are byte-identical.
struct ExperimentReport {
    std::string name;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<Estimate> estimates;
    std::vector<BoundCheck> bounds_checked;
    std::uint64_t seed = 0;
    double runtime_seconds = 0.0;

    bool all_satisfied() const;
    void add_estimate(const std::string& label, double value, double se = 0.0);
    void add_bound(const std::string& label, bool satisfied, double slack);
};

nlohmann::json report_json(const ExperimentReport& r);
void write_report_json(const ExperimentReport& r, const std::string& path);
// Flat rows: name,record,label,value,se,satisfied,slack.
void write_report_csv(const ExperimentReport& r, const std::string& path);
// Human-readable block, the only place runtime_seconds appears.
std::string report_summary(const ExperimentReport& r);

nlohmann::json capacity_json(const CapacityResult& r);
void write_capacity_json(const CapacityResult& r, const std::string& path);

}  // namespace sheetlab
