#include "rdlab/acceptance.hpp"
#include "rdlab/errors.hpp"
#include "rdlab/report.hpp"
#include "rdlab/scenario.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace {

int print_acceptance(const std::vector<rdlab::CriterionResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
        for (const auto& line : r.detail)
            std::printf("    %s\n", line.c_str());
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILURES present");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the reaction-diffusion pair A <-> 2B on the line"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    if (const char* env = std::getenv("RDLAB_OUT"); env && *env)
        out_dir = env;
    std::uint64_t seed = 20260816ull;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0)
        threads = 1;

    app.add_option("--out", out_dir, "directory for run artifacts (env RDLAB_OUT)");
    app.add_option("--seed", seed, "override the seed of every loaded config");
    app.add_option("--threads", threads, "worker threads for config batches");

    auto* run = app.add_subcommand("run", "run scenario configs and emit reports");
    std::vector<std::string> config_paths;
    run->add_option("config", config_paths, "json config files or scenario names")->required();

    auto* suite = app.add_subcommand("suite", "run a named battery");
    std::string suite_name;
    suite->add_option("name", suite_name, "battery name: acceptance")->required();

    auto* list = app.add_subcommand("list", "list available names");
    std::string list_what = "scenarios";
    list->add_option("what", list_what, "what to list: scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            if (list_what != "scenarios") {
                std::fprintf(stderr, "error: nothing to list under '%s'\n", list_what.c_str());
                return 2;
            }
            for (const auto& name : rdlab::list_scenarios())
                std::printf("%s\n", name.c_str());
            return 0;
        }

        if (suite->parsed()) {
            if (suite_name != "acceptance") {
                std::fprintf(stderr, "error: unknown suite '%s'\n", suite_name.c_str());
                return 2;
            }
            return print_acceptance(rdlab::run_acceptance(seed));
        }

        // run: each positional is a json file on disk or a scenario run at its defaults
        const auto known = rdlab::list_scenarios();
        std::vector<rdlab::ScenarioConfig> cfgs;
        for (const auto& path : config_paths) {
            rdlab::ScenarioConfig cfg =
                std::find(known.begin(), known.end(), path) != known.end()
                    ? rdlab::default_config(path)
                    : rdlab::load_config(path);
            if (app.count("--seed")) {
                cfg.seed = seed;
                cfg.text = rdlab::config_text(cfg);
            }
            cfgs.push_back(std::move(cfg));
        }
        const auto reports = rdlab::run_many(cfgs, threads);
        bool all = true;
        std::map<std::string, int> used;
        for (const auto& rep : reports) {
            std::string dir = out_dir + "/" + rep.scenario;
            if (int c = ++used[rep.scenario]; c > 1)
                dir += "-" + std::to_string(c);
            rdlab::emit(rep, dir);
            std::printf("%-22s %s  %6.1f s  %zu checks  -> %s\n", rep.scenario.c_str(),
                        rep.all_pass() ? "PASS" : "FAIL", rep.wall_seconds, rep.checks.size(),
                        dir.c_str());
            for (const auto& c : rep.checks)
                if (!c.pass)
                    std::printf("    FAIL %s (measured %g): %s\n", c.name.c_str(), c.measured,
                                c.claim.c_str());
            all = all && rep.all_pass();
        }
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
