#pragma once

#include "rdlab/dynamics.hpp"
#include "rdlab/report.hpp"
#include "rdlab/structures.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rdlab {

struct ProfileSpec {
    std::string name;
    std::map<std::string, double> params;
};

// Complete description of one run. parse_config starts from the scenario's
// default_config and overrides whatever the file provides, so the effective
// config is always fully explicit; its canonical serialization is stored in
// text, embedded in the report, and hashed for the report digest.
struct ScenarioConfig {
    std::string scenario;
    std::uint64_t seed = 20260816ull;
    Params params;
    double length = 400.0;
    int n = 8192;
    Bc bc = Bc::periodic;
    ProfileSpec profile;
    double horizon = 2000.0;
    std::vector<double> output_times;
    std::map<std::string, double> tolerances;
    std::map<std::string, double> extras;
    std::string text;
};

std::vector<std::string> list_scenarios();

ScenarioConfig default_config(const std::string& scenario);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// canonical serialization: sorted keys, resolved output times, everything
// explicit; parse_config(config_text(cfg)) reproduces cfg exactly
std::string config_text(const ScenarioConfig& cfg);

State make_profile(const ProfileSpec& spec, const Grid1D& g, std::uint64_t seed);

// Refinement study for the discrete balance residual of one structure kind:
// halving dt should halve it, halving dx should quarter it.
struct BalanceOrders {
    double order_dt = 0.0;
    double order_dx = 0.0;
    double res_dt_coarse = 0.0, res_dt_fine = 0.0;
    double res_dx_coarse = 0.0, res_dx_fine = 0.0;
};

BalanceOrders balance_order_study(EdsKind kind, const Params& p, std::uint64_t seed);

Report run_scenario(const ScenarioConfig& cfg);

// independent jobs on a small pool; reports come back in input order
std::vector<Report> run_many(const std::vector<ScenarioConfig>& cfgs, int threads);

} // namespace rdlab
