// Command-line front end: solve / verify / sweep over JSON experiment
// configs. Exit codes: 0 all certificates pass, 1 at least one certificate
// failed, 2 input error, 3 solver failure.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraclap/report.hpp"

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    // wall-clock goes to stderr only, so report files stay byte-identical
    ~Timer() {
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        std::fprintf(stderr, "elapsed: %.1f ms\n", ms);
    }
};

int summarize(const fraclap::RunReport& rr) {
    if (rr.report.contains("certificates")) {
        for (const auto& c : rr.report.at("certificates"))
            std::fprintf(stderr, "certificate %-18s %s\n",
                         c.at("name").get<std::string>().c_str(),
                         c.at("pass").get<bool>() ? "pass" : "FAIL");
    }
    return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclap: fractional Laplacian singular semilinear solver"};
    app.require_subcommand(1);

    std::string config_path, solution_path;
    std::vector<std::string> sweep_paths;

    auto* solve = app.add_subcommand("solve", "solve the problem and certify the solution");
    solve->add_option("config", config_path, "JSON config file")->required();

    auto* verify = app.add_subcommand("verify", "re-run certificates on a stored solution");
    verify->add_option("config", config_path, "JSON config file")->required();
    verify->add_option("solution", solution_path, "solution.csv to check")->required();

    auto* sweep = app.add_subcommand("sweep", "batch runs over configs differing in s/q/mesh");
    sweep->add_option("configs", sweep_paths, "JSON config files")->required();

    CLI11_PARSE(app, argc, argv);
    Timer timer;

    try {
        if (solve->parsed()) {
            const fraclap::ExperimentConfig cfg = fraclap::load_config(config_path);
            if (cfg.s >= 0.5) std::fprintf(stderr, "flag: outside paper regime (s >= 1/2)\n");
            return summarize(fraclap::run_solve(cfg));
        }
        if (verify->parsed()) {
            const fraclap::ExperimentConfig cfg = fraclap::load_config(config_path);
            return summarize(fraclap::run_verify(cfg, solution_path));
        }
        std::vector<fraclap::ExperimentConfig> cfgs;
        for (const auto& p : sweep_paths) cfgs.push_back(fraclap::load_config(p));
        return summarize(fraclap::run_sweep(cfgs));
    } catch (const fraclap::ConfigError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const fraclap::SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    }
}
