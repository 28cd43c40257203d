#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rdlab {

// one named time series; envelope holds the fitted model evaluated on the
// same times and may be left empty
struct Series {
    std::string name;
    std::string quantity;
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> envelope;
};

struct FitRow {
    std::string series;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool log_correction = false;
};

struct CheckResult {
    std::string name;
    std::string claim;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string scenario;
    std::string config_digest;
    std::string config_text;
    double wall_seconds = 0.0;
    std::vector<Series> series;
    std::vector<FitRow> fits;
    std::vector<CheckResult> checks;
    std::map<std::string, double> scalars;

    bool all_pass() const;
};

std::string fnv1a_hex(std::string_view bytes);

// digest of the report content with wall time zeroed; equal configs and
// seeds must reproduce it bit for bit
std::string determinism_digest(const Report& r);

// writes report.json, <series>.csv per series, and plot.gp into dir
void emit(const Report& r, const std::string& dir);

} // namespace rdlab
