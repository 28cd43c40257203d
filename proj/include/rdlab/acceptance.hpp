#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rdlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> detail;
};

// The full acceptance battery, in order. The two long decay runs are shared
// by later criteria; their cost is charged to criteria 1 and 2. Criteria with
// a stated wall budget fail when they exceed it, whatever the measurements say.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 20260816ull);

} // namespace rdlab
