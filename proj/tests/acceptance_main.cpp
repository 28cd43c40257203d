// Acceptance battery runner. One line per criterion, nonzero exit on any failure.
#include "rdlab/acceptance.hpp"

#include <cstdio>

int main() {
    const auto results = rdlab::run_acceptance();
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %2d %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds);
        for (const auto& d : r.detail)
            std::printf("        %s\n", d.c_str());
        all = all && r.pass;
    }
    std::printf("%s: %zu criteria\n", all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                results.size());
    return all ? 0 : 1;
}
