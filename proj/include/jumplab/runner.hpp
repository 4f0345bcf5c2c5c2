#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/config.hpp"
#include "jumplab/report.hpp"
#include "jumplab/suites.hpp"

namespace jumplab {

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<int> workers;
    std::vector<std::string> suites;  // nonempty: replaces the configured suites
};

struct RunResult {
    int exit_code = 0;  // 0 all assertions pass, 1 assertion failure
    std::vector<std::string> failures;
    std::vector<std::string> written;
};

// Loads the config, runs the configured suites, writes ratios.csv /
// checks.csv / manifest.json into out_dir. Config problems throw
// ConfigError; assertion failures are reported in the result.
inline RunResult run_experiment(const std::string& config_path, const std::string& out_dir,
                                const RunOverrides& overrides = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    nlohmann::json j = detail::read_json_file(config_path);
    if (j.is_object()) {
        if (overrides.seed) j["mc"]["seed"] = *overrides.seed;
        if (overrides.replicas) j["mc"]["replicas"] = *overrides.replicas;
        if (overrides.workers) j["mc"]["workers"] = *overrides.workers;
        if (!overrides.suites.empty()) j["suites"] = overrides.suites;
    }
    const ExperimentConfig cfg = config_from_json(j);

    std::filesystem::create_directories(out_dir);
    RunResult result;
    std::vector<CheckRow> checks;

    for (const auto& suite : cfg.suites) {
        if (suite == "ratios") {
            auto outcome = run_ratios_suite(cfg);
            const auto path = (std::filesystem::path(out_dir) / "ratios.csv").string();
            write_ratios_csv(path, outcome.rows);
            result.written.push_back(path);
            result.failures.insert(result.failures.end(), outcome.failures.begin(),
                                   outcome.failures.end());
            continue;
        }
        CheckOutcome outcome;
        if (suite == "hilbert")
            outcome = run_hilbert_suite(cfg);
        else if (suite == "bdg")
            outcome = run_bdg_suite(cfg);
        else if (suite == "davis")
            outcome = run_davis_suite(cfg);
        else if (suite == "lemma")
            outcome = run_lemma_suite(cfg);
        else if (suite == "oracle")
            outcome = run_oracle_suite(cfg);
        else if (suite == "optimizer")
            outcome = run_optimizer_suite(cfg);
        else if (suite == "duality")
            outcome = run_duality_suite(cfg);
        checks.insert(checks.end(), outcome.rows.begin(), outcome.rows.end());
        result.failures.insert(result.failures.end(), outcome.failures.begin(),
                               outcome.failures.end());
    }

    if (!checks.empty()) {
        const auto path = (std::filesystem::path(out_dir) / "checks.csv").string();
        write_checks_csv(path, checks);
        result.written.push_back(path);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();
    write_manifest(manifest_path, j, wall);
    result.written.push_back(manifest_path);

    result.exit_code = result.failures.empty() ? 0 : 1;
    return result;
}

}  // namespace jumplab
