#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumplab/runner.hpp"

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("JUMPLAB_OUT")) return env;
    return "out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jumplab: compensated random-measure integrals, regime norms, and "
                 "maximal-inequality verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = default_out_dir();
    std::uint64_t seed = 0;
    std::size_t replicas = 0;
    int workers = 0;
    std::vector<std::string> suites;

    auto* run = app.add_subcommand("run", "run the configured verification suites");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default $JUMPLAB_OUT or ./out)");
    auto* seed_opt = run->add_option("--seed", seed, "override mc.seed");
    auto* replicas_opt = run->add_option("--replicas", replicas, "override mc.replicas");
    auto* workers_opt = run->add_option("--workers", workers, "override mc.workers");
    run->add_option("--suite", suites, "run only these suites (repeatable)");

    auto* validate = app.add_subcommand("validate", "check a config without running");
    std::string validate_path;
    validate->add_option("--config", validate_path, "experiment config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const auto diagnostics = jumplab::validate_config(validate_path);
            for (const auto& d : diagnostics)
                std::cerr << validate_path << ": " << d.key << ": " << d.message << "\n";
            if (diagnostics.empty()) std::cout << "config ok\n";
            return diagnostics.empty() ? 0 : 2;
        }

        jumplab::RunOverrides overrides;
        if (seed_opt->count() > 0) overrides.seed = seed;
        if (replicas_opt->count() > 0) overrides.replicas = replicas;
        if (workers_opt->count() > 0) overrides.workers = workers;
        overrides.suites = suites;

        const auto result = jumplab::run_experiment(config_path, out_dir, overrides);
        for (const auto& path : result.written) std::cout << "wrote " << path << "\n";
        for (const auto& failure : result.failures) std::cerr << "FAIL " << failure << "\n";
        if (result.exit_code == 0)
            std::cout << "all configured assertions pass\n";
        else
            std::cerr << result.failures.size() << " assertion(s) failed\n";
        return result.exit_code;
    } catch (const jumplab::ConfigError& e) {
        std::cerr << "config error: " << e.key << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
