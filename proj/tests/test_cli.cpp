#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "jumplab/config.hpp"
#include "jumplab/runner.hpp"

using namespace jumplab;
namespace fs = std::filesystem;

namespace {

std::string write_temp_config(const std::string& name, const std::string& body) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmokeBody = R"({
  "model": {"type": "poisson", "horizon": 1.0, "time_cells": 4, "marks": 1, "rate": 2.0},
  "space_grid": {"points": 2, "weight": 1.0},
  "families": [{"name": "flat", "kind": "constant", "scale": 1.0}],
  "pq_list": [[2.0, 2.0]],
  "suites": ["ratios", "davis", "lemma"],
  "mc": {"replicas": 800, "seed": 4242, "workers": 2},
  "bands": {"ratio_low": 0.5, "ratio_high": 4.0, "davis_paths": 200, "lemma_trials": 500, "collapse_trials": 30}
})";

}  // namespace

TEST_CASE("validation lists every violation without running") {
    const auto good = write_temp_config("jumplab_good.cfg", kSmokeBody);
    CHECK(validate_config(good).empty());

    const auto bad = write_temp_config("jumplab_bad.cfg", R"({
      "model": {"type": "poisson", "horizon": 1.0, "time_cells": 2, "marks": 1, "rate": 1.0},
      "families": [{"name": "g", "kind": "gaussian"}],
      "pq_list": [[1.0, 2.0]]
    })");
    const auto diagnostics = validate_config(bad);
    REQUIRE(diagnostics.size() == 2);
    bool saw_exponent = false, saw_family = false;
    for (const auto& d : diagnostics) {
        if (d.key == "pq_list") {
            saw_exponent = d.message.find("exponent must lie in (1, inf)") != std::string::npos;
        }
        if (d.key == "families.kind") {
            saw_family = d.message.find("constant") != std::string::npos &&
                         d.message.find("heavy_tail") != std::string::npos;
        }
    }
    CHECK(saw_exponent);
    CHECK(saw_family);

    const auto empty_pq = write_temp_config("jumplab_empty_pq.cfg", R"({
      "model": {"type": "poisson", "horizon": 1.0, "time_cells": 2, "marks": 1, "rate": 1.0},
      "pq_list": []
    })");
    const auto diag2 = validate_config(empty_pq);
    REQUIRE(diag2.size() == 1);
    CHECK(diag2[0].key == "pq_list");

    CHECK_THROWS_AS(load_config(empty_pq), ConfigError);
    CHECK_THROWS_AS(validate_config("/nonexistent/path.cfg"), ConfigError);
    const auto not_json = write_temp_config("jumplab_not_json.cfg", "rate = fast\n");
    CHECK_THROWS_AS(validate_config(not_json), ConfigError);
}

TEST_CASE("smoke experiment passes and stays in band") {
    const auto cfg = write_temp_config("jumplab_smoke.cfg", kSmokeBody);
    const auto out_dir = (fs::temp_directory_path() / "jumplab_smoke_out").string();
    fs::remove_all(out_dir);
    const auto result = run_experiment(cfg, out_dir);
    CHECK(result.exit_code == 0);
    CHECK(result.failures.empty());
    CHECK(fs::exists(fs::path(out_dir) / "ratios.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "checks.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "manifest.json"));

    const auto csv = slurp((fs::path(out_dir) / "ratios.csv").string());
    CHECK(csv.rfind("p,q,regime_case,family,lhs,lhs_se,rhs,ratio,replicas,seed\n", 0) == 0);
}

TEST_CASE("reruns and worker counts produce byte-identical csvs") {
    const auto cfg = write_temp_config("jumplab_repro.cfg", kSmokeBody);
    const auto dir1 = (fs::temp_directory_path() / "jumplab_repro1").string();
    const auto dir2 = (fs::temp_directory_path() / "jumplab_repro2").string();
    const auto dir3 = (fs::temp_directory_path() / "jumplab_repro3").string();
    for (const auto& d : {dir1, dir2, dir3}) fs::remove_all(d);

    RunOverrides one;
    one.workers = 1;
    RunOverrides eight;
    eight.workers = 8;
    REQUIRE(run_experiment(cfg, dir1, one).exit_code == 0);
    REQUIRE(run_experiment(cfg, dir2, one).exit_code == 0);
    REQUIRE(run_experiment(cfg, dir3, eight).exit_code == 0);
    for (const char* name : {"ratios.csv", "checks.csv"}) {
        const auto a = slurp((fs::path(dir1) / name).string());
        CHECK(a == slurp((fs::path(dir2) / name).string()));
        CHECK(a == slurp((fs::path(dir3) / name).string()));
        CHECK(!a.empty());
    }
}

TEST_CASE("manifest replays the run byte for byte") {
    const auto cfg = write_temp_config("jumplab_replay.cfg", kSmokeBody);
    const auto dir1 = (fs::temp_directory_path() / "jumplab_replay1").string();
    const auto dir2 = (fs::temp_directory_path() / "jumplab_replay2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    REQUIRE(run_experiment(cfg, dir1).exit_code == 0);
    const auto manifest = (fs::path(dir1) / "manifest.json").string();
    REQUIRE(run_experiment(manifest, dir2).exit_code == 0);
    CHECK(slurp((fs::path(dir1) / "ratios.csv").string()) ==
          slurp((fs::path(dir2) / "ratios.csv").string()));
    CHECK(slurp((fs::path(dir1) / "checks.csv").string()) ==
          slurp((fs::path(dir2) / "checks.csv").string()));
}

TEST_CASE("suite overrides restrict what runs") {
    const auto cfg = write_temp_config("jumplab_suites.cfg", kSmokeBody);
    const auto dir = (fs::temp_directory_path() / "jumplab_suites_out").string();
    fs::remove_all(dir);
    RunOverrides overrides;
    overrides.suites = {"lemma"};
    const auto result = run_experiment(cfg, dir, overrides);
    CHECK(result.exit_code == 0);
    CHECK(!fs::exists(fs::path(dir) / "ratios.csv"));
    CHECK(fs::exists(fs::path(dir) / "checks.csv"));
    const auto csv = slurp((fs::path(dir) / "checks.csv").string());
    CHECK(csv.find("lemma,") != std::string::npos);
    CHECK(csv.find("davis,") == std::string::npos);
}

TEST_CASE("assertion failures surface as exit code 1") {
    // An impossible ratio band cannot pass.
    std::string body = kSmokeBody;
    const auto pos = body.find("\"ratio_low\": 0.5, \"ratio_high\": 4.0");
    REQUIRE(pos != std::string::npos);
    body.replace(pos, std::string("\"ratio_low\": 0.5, \"ratio_high\": 4.0").size(),
                 "\"ratio_low\": 0.999, \"ratio_high\": 1.001");
    const auto cfg = write_temp_config("jumplab_tightband.cfg", body);
    const auto dir = (fs::temp_directory_path() / "jumplab_tightband_out").string();
    fs::remove_all(dir);
    const auto result = run_experiment(cfg, dir);
    CHECK(result.exit_code == 1);
    CHECK(!result.failures.empty());
    // Outputs are still written for inspection.
    CHECK(fs::exists(fs::path(dir) / "ratios.csv"));
}

TEST_CASE("seed and replica overrides change the outputs") {
    const auto cfg = write_temp_config("jumplab_override.cfg", kSmokeBody);
    const auto dir1 = (fs::temp_directory_path() / "jumplab_ovr1").string();
    const auto dir2 = (fs::temp_directory_path() / "jumplab_ovr2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    RunOverrides base;
    RunOverrides reseeded;
    reseeded.seed = 777;
    REQUIRE(run_experiment(cfg, dir1, base).exit_code == 0);
    REQUIRE(run_experiment(cfg, dir2, reseeded).exit_code == 0);
    CHECK(slurp((fs::path(dir1) / "ratios.csv").string()) !=
          slurp((fs::path(dir2) / "ratios.csv").string()));
}
