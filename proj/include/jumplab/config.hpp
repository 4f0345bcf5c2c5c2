#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jumplab/common.hpp"
#include "jumplab/families.hpp"
#include "jumplab/grid.hpp"
#include "jumplab/model.hpp"
#include "jumplab/montecarlo.hpp"
#include "jumplab/oracle.hpp"
#include "jumplab/sumnorm.hpp"

namespace jumplab {

// Acceptance thresholds and suite sizes, all overridable from the `bands`
// config section so every check the runner performs is pinned in the file
// that drove it.
struct Bands {
    double ratio_low = 1.0 / 64.0;
    double ratio_high = 64.0;
    double ratio_spread = 64.0;
    double bdg_low = 1.0 / 64.0;
    double bdg_high = 64.0;
    double hilbert_bound = 64.0;
    std::size_t hilbert_integrands = 20;
    std::size_t davis_paths = 1000;
    std::size_t lemma_trials = 10000;
    double lemma_tol = 1e-10;
    std::size_t collapse_trials = 100;
    double collapse_tol = 1e-12;
    double oracle_se_mult = 3.0;
    double oracle_min_pass = 0.95;
    std::size_t optimizer_instances = 50;
    double optimizer_rel_tol = 1e-3;
    std::size_t duality_instances = 10;
    double duality_low = 1.0 / 8.0;
    double duality_high = 8.0;
};

struct ExperimentConfig {
    RandomMeasureModel model = RandomMeasureModel::poisson(PoissonSpec::uniform(1.0, 1, 1, 1.0));
    SpaceGrid grid = SpaceGrid::uniform(1);
    std::vector<FamilySpec> families;
    std::vector<std::pair<double, double>> pq_list;
    std::vector<std::string> suites;
    McOptions mc;
    SumNormOptions optimizer;
    Bands bands;
};

struct Diagnostic {
    std::string key;
    std::string message;
};

inline const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> names = {
        "ratios", "hilbert", "bdg", "davis", "lemma", "oracle", "optimizer", "duality"};
    return names;
}

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path, "config is not valid JSON: " + std::string(e.what()));
    }
    // A manifest written by a previous run replays as a config.
    if (j.is_object() && j.contains("config") && j.contains("tool"))
        return j.at("config");
    return j;
}

inline void check_number(const nlohmann::json& j, const std::string& key,
                         std::vector<Diagnostic>& out) {
    if (!j.is_number()) out.push_back({key, key + " must be a number"});
}

inline void collect_model_diagnostics(const nlohmann::json& m, std::vector<Diagnostic>& out) {
    const std::string type = m.value("type", "");
    if (type != "poisson" && type != "bernoulli_cells") {
        out.push_back({"model.type",
                       "model.type must be 'poisson' or 'bernoulli_cells', got '" + type + "'"});
        return;
    }
    const double horizon = m.value("horizon", 0.0);
    if (!(horizon > 0.0)) out.push_back({"model.horizon", "model.horizon must be positive"});
    if (type == "poisson") {
        const std::size_t marks = m.value("marks", std::size_t{1});
        if (marks == 0) out.push_back({"model.marks", "model.marks must be at least 1"});
        if (!m.contains("time_cells") && !m.contains("edges"))
            out.push_back({"model.time_cells", "poisson model needs time_cells or edges"});
        if (!m.contains("rate") && !m.contains("rates"))
            out.push_back({"model.rate", "poisson model needs rate or rates"});
        if (m.contains("rate") && m.at("rate").is_number() &&
            m.at("rate").get<double>() < 0.0)
            out.push_back({"model.rate", "model.rate must be nonnegative"});
        if (m.contains("rates")) {
            if (!m.at("rates").is_array())
                out.push_back({"model.rates", "model.rates must be an array of arrays"});
            else
                for (const auto& row : m.at("rates"))
                    for (const auto& r : row)
                        if (r.is_number() && r.get<double>() < 0.0)
                            out.push_back({"model.rates", "rates must be nonnegative"});
        }
    } else {
        if (!m.contains("cells") || !m.at("cells").is_array() || m.at("cells").empty()) {
            out.push_back({"model.cells", "bernoulli model needs a nonempty cells array"});
            return;
        }
        for (const auto& cell : m.at("cells")) {
            const double t = cell.value("t", -1.0);
            const double p = cell.value("p", -1.0);
            if (!(t > 0.0) || !(t <= horizon))
                out.push_back({"model.cells.t", "cell times must lie in (0, horizon]"});
            if (!(p >= 0.0 && p <= 1.0))
                out.push_back({"model.cells.p", "cell probabilities must lie in [0, 1]"});
        }
    }
}

}  // namespace detail

// All problems found in the config, without running anything.
inline std::vector<Diagnostic> validate_config_json(const nlohmann::json& j) {
    std::vector<Diagnostic> out;
    if (!j.is_object()) {
        out.push_back({"", "config root must be a JSON object"});
        return out;
    }
    if (!j.contains("model"))
        out.push_back({"model", "missing section model"});
    else
        detail::collect_model_diagnostics(j.at("model"), out);

    if (j.contains("space_grid")) {
        const auto& sg = j.at("space_grid");
        if (sg.contains("weights")) {
            for (const auto& w : sg.at("weights"))
                if (!w.is_number() || !(w.get<double>() > 0.0))
                    out.push_back(
                        {"space_grid.weights", "space grid weights must be positive numbers"});
        } else if (sg.value("points", std::size_t{1}) == 0) {
            out.push_back({"space_grid.points", "space_grid.points must be at least 1"});
        }
    }

    if (!j.contains("pq_list") || !j.at("pq_list").is_array() || j.at("pq_list").empty()) {
        out.push_back({"pq_list", "pq_list must be a nonempty array of [p, q] pairs"});
    } else {
        for (const auto& pq : j.at("pq_list")) {
            if (!pq.is_array() || pq.size() != 2 || !pq[0].is_number() || !pq[1].is_number()) {
                out.push_back({"pq_list", "pq_list entries must be [p, q] number pairs"});
                continue;
            }
            for (const auto& e : pq)
                if (!(e.get<double>() > 1.0))
                    out.push_back({"pq_list", "exponent must lie in (1, inf), got " +
                                                  e.dump()});
        }
    }

    if (j.contains("families")) {
        for (const auto& fam : j.at("families")) {
            const std::string kind = fam.value("kind", "constant");
            bool known = false;
            for (const auto& k : known_family_kinds()) known = known || k == kind;
            if (!known) {
                std::string list;
                for (const auto& k : known_family_kinds()) {
                    if (!list.empty()) list += ", ";
                    list += k;
                }
                out.push_back({"families.kind", "unknown integrand family kind '" + kind +
                                                    "' (known: " + list + ")"});
            }
            if (kind == "heavy_tail" && fam.contains("alpha") &&
                !(fam.at("alpha").get<double>() > 0.0))
                out.push_back({"families.alpha", "heavy_tail alpha must be positive"});
        }
    }

    if (j.contains("suites")) {
        for (const auto& s : j.at("suites")) {
            const std::string name = s.get<std::string>();
            bool known = false;
            for (const auto& k : known_suites()) known = known || k == name;
            if (!known) {
                std::string list;
                for (const auto& k : known_suites()) {
                    if (!list.empty()) list += ", ";
                    list += k;
                }
                out.push_back({"suites", "unknown suite '" + name + "' (known: " + list + ")"});
            }
        }
        // The oracle suite enumerates outcomes, which needs a small
        // Bernoulli model.
        bool wants_oracle = false;
        for (const auto& s : j.at("suites")) wants_oracle |= s == "oracle";
        if (wants_oracle && j.contains("model")) {
            const auto& m = j.at("model");
            if (m.value("type", "") != "bernoulli_cells")
                out.push_back({"suites", "suite 'oracle' needs model.type bernoulli_cells"});
            else if (m.contains("cells") && m.at("cells").size() > kEnumerationCellCap)
                out.push_back({"suites", "suite 'oracle' needs at most " +
                                             std::to_string(kEnumerationCellCap) + " cells"});
        }
    }

    if (j.contains("mc")) {
        const auto& mc = j.at("mc");
        if (mc.value("replicas", std::size_t{2}) < 2)
            out.push_back({"mc.replicas", "mc.replicas must be at least 2"});
        if (mc.contains("workers") && mc.at("workers").get<long>() < 1)
            out.push_back({"mc.workers", "mc.workers must be at least 1"});
    }
    if (j.contains("optimizer")) {
        const auto& opt = j.at("optimizer");
        if (opt.contains("tol") && !(opt.at("tol").get<double>() > 0.0))
            out.push_back({"optimizer.tol", "optimizer.tol must be positive"});
        if (opt.contains("max_iter") && opt.at("max_iter").get<long>() < 1)
            out.push_back({"optimizer.max_iter", "optimizer.max_iter must be at least 1"});
    }
    return out;
}

inline std::vector<Diagnostic> validate_config(const std::string& path) {
    return validate_config_json(detail::read_json_file(path));
}

namespace detail {

inline RandomMeasureModel model_from_json(const nlohmann::json& m) {
    if (m.value("type", "") == "poisson") {
        PoissonSpec spec;
        spec.horizon = m.at("horizon").get<double>();
        spec.n_marks = m.value("marks", std::size_t{1});
        if (m.contains("edges")) {
            spec.edges = m.at("edges").get<std::vector<double>>();
        } else {
            const auto cells = m.at("time_cells").get<std::size_t>();
            spec.edges.resize(cells + 1);
            for (std::size_t i = 0; i <= cells; ++i)
                spec.edges[i] =
                    spec.horizon * static_cast<double>(i) / static_cast<double>(cells);
        }
        const std::size_t n_tc = spec.edges.size() - 1;
        if (m.contains("rates")) {
            for (const auto& row : m.at("rates"))
                for (const auto& r : row) spec.rates.push_back(r.get<double>());
        } else {
            spec.rates.assign(n_tc * spec.n_marks, m.at("rate").get<double>());
        }
        return RandomMeasureModel::poisson(spec);
    }
    BernoulliSpec spec;
    spec.horizon = m.at("horizon").get<double>();
    for (const auto& cell : m.at("cells"))
        spec.cells.push_back({cell.at("t").get<double>(), cell.at("p").get<double>()});
    return RandomMeasureModel::bernoulli_cells(spec);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    const auto diagnostics = validate_config_json(j);
    if (!diagnostics.empty())
        throw ConfigError(diagnostics.front().key, diagnostics.front().message);

    ExperimentConfig cfg;
    try {
        cfg.model = detail::model_from_json(j.at("model"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("model", e.what());
    }
    if (j.contains("space_grid")) {
        const auto& sg = j.at("space_grid");
        try {
            if (sg.contains("weights"))
                cfg.grid = SpaceGrid({}, sg.at("weights").get<std::vector<double>>());
            else
                cfg.grid = SpaceGrid::uniform(sg.value("points", std::size_t{1}),
                                              sg.value("weight", 1.0));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("space_grid", e.what());
        }
    }
    if (j.contains("families")) {
        std::size_t index = 0;
        for (const auto& fam : j.at("families")) {
            FamilySpec spec;
            spec.name = fam.value("name", "family" + std::to_string(index));
            spec.kind = fam.value("kind", "constant");
            spec.scale = fam.value("scale", 1.0);
            spec.alpha = fam.value("alpha", 1.0);
            spec.cell = fam.value("cell", std::size_t{0});
            spec.time_ratio = fam.value("time_ratio", 0.7);
            spec.mark_ratio = fam.value("mark_ratio", 0.6);
            spec.space_power = fam.value("space_power", 1.0);
            cfg.families.push_back(std::move(spec));
            ++index;
        }
    }
    for (const auto& pq : j.at("pq_list"))
        cfg.pq_list.emplace_back(pq[0].get<double>(), pq[1].get<double>());
    if (j.contains("suites"))
        for (const auto& s : j.at("suites")) cfg.suites.push_back(s.get<std::string>());
    else
        cfg.suites = {"ratios"};
    if (j.contains("mc")) {
        const auto& mc = j.at("mc");
        cfg.mc.seed = mc.value("seed", std::uint64_t{1});
        cfg.mc.replicas = mc.value("replicas", std::size_t{10000});
        cfg.mc.workers = mc.value("workers", 1);
        cfg.mc.bootstrap = mc.value("bootstrap", false);
        cfg.mc.bootstrap_resamples = mc.value("bootstrap_resamples", 200);
    }
    if (j.contains("optimizer")) {
        const auto& opt = j.at("optimizer");
        cfg.optimizer.tol = opt.value("tol", 1e-6);
        cfg.optimizer.max_iter = opt.value("max_iter", 10000);
        cfg.optimizer.polish_budget = opt.value("polish_budget", long{200000});
    }
    if (j.contains("bands")) {
        const auto& b = j.at("bands");
        cfg.bands.ratio_low = b.value("ratio_low", cfg.bands.ratio_low);
        cfg.bands.ratio_high = b.value("ratio_high", cfg.bands.ratio_high);
        cfg.bands.ratio_spread = b.value("ratio_spread", cfg.bands.ratio_spread);
        cfg.bands.bdg_low = b.value("bdg_low", cfg.bands.bdg_low);
        cfg.bands.bdg_high = b.value("bdg_high", cfg.bands.bdg_high);
        cfg.bands.hilbert_bound = b.value("hilbert_bound", cfg.bands.hilbert_bound);
        cfg.bands.hilbert_integrands =
            b.value("hilbert_integrands", cfg.bands.hilbert_integrands);
        cfg.bands.davis_paths = b.value("davis_paths", cfg.bands.davis_paths);
        cfg.bands.lemma_trials = b.value("lemma_trials", cfg.bands.lemma_trials);
        cfg.bands.lemma_tol = b.value("lemma_tol", cfg.bands.lemma_tol);
        cfg.bands.collapse_trials = b.value("collapse_trials", cfg.bands.collapse_trials);
        cfg.bands.collapse_tol = b.value("collapse_tol", cfg.bands.collapse_tol);
        cfg.bands.oracle_se_mult = b.value("oracle_se_mult", cfg.bands.oracle_se_mult);
        cfg.bands.oracle_min_pass = b.value("oracle_min_pass", cfg.bands.oracle_min_pass);
        cfg.bands.optimizer_instances =
            b.value("optimizer_instances", cfg.bands.optimizer_instances);
        cfg.bands.optimizer_rel_tol =
            b.value("optimizer_rel_tol", cfg.bands.optimizer_rel_tol);
        cfg.bands.duality_instances =
            b.value("duality_instances", cfg.bands.duality_instances);
        cfg.bands.duality_low = b.value("duality_low", cfg.bands.duality_low);
        cfg.bands.duality_high = b.value("duality_high", cfg.bands.duality_high);
    }

    // Family parameters that only resolve against the model.
    for (const auto& fam : cfg.families) {
        if (fam.kind == "single_cell_spike" && fam.cell >= cfg.model.n_cells())
            throw ConfigError("families.cell",
                              "spike cell index " + std::to_string(fam.cell) +
                                  " out of range for family '" + fam.name + "'");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    return config_from_json(detail::read_json_file(path));
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg,
                                     const nlohmann::json& original) {
    nlohmann::json j = original;
    j["mc"]["seed"] = cfg.mc.seed;
    j["mc"]["replicas"] = cfg.mc.replicas;
    j["mc"]["workers"] = cfg.mc.workers;
    return j;
}

}  // namespace jumplab
