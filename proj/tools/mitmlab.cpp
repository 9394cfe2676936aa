#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mitmlab/config.hpp"
#include "mitmlab/harness.hpp"
#include "mitmlab/output.hpp"

namespace fs = std::filesystem;
using namespace mitmlab;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Common {
    std::optional<std::string> config;
    std::vector<std::string> overrides;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::optional<std::int64_t> trials;
    std::optional<int> workers;
};

void add_common(CLI::App& app, Common& c) {
    app.add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--set", c.overrides, "KEY=VALUE override, repeatable")->allow_extra_args(false);
    app.add_option("--out", c.out, "output directory (default: stdout)");
    app.add_option("--seed", c.seed, "master seed");
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--trials", c.trials, "Monte-Carlo trials per cell")->check(CLI::PositiveNumber);
    app.add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Common& c, const std::optional<std::string>& preset_name = std::nullopt,
                         bool check = true) {
    std::vector<std::string> overrides = c.overrides;
    if (c.seed) overrides.push_back("master_seed=" + std::to_string(*c.seed));
    if (c.trials) {
        for (const char* key : {"trials", "sprt_trials", "curve_trials"}) {
            overrides.push_back(std::string(key) + "=" + std::to_string(*c.trials));
        }
    }
    if (c.workers) overrides.push_back("workers=" + std::to_string(*c.workers));
    return parse_config(c.config, overrides, preset_name, check);
}

/// Writes `body` to `<out>/<name>` or to stdout.
template <class Body>
void emit(const Common& c, const std::string& name, Body&& body) {
    if (!c.out) {
        body(std::cout);
        return;
    }
    fs::create_directories(*c.out);
    const fs::path path = fs::path(*c.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    body(f);
    if (!f) throw std::runtime_error("write failed: " + path.string());
    std::cerr << "wrote " << path.string() << '\n';
}

void emit_json(const Common& c, const std::string& stem, const json& doc) {
    emit(c, stem + ".json", [&](std::ostream& o) { o << quantize(doc).dump(2) << '\n'; });
}

int run_simulate(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    const SystemModel model(cfg.a, cfg.sigma2);
    const int horizon = cfg.horizon > 0 ? cfg.horizon : 100;
    const NominalTrajectory traj = simulate_nominal(model, make_policy(cfg, cfg.dither_grid.front()), horizon,
                                                    trial_seed(cfg, "simulate", 0), make_options(cfg));
    emit(c, "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(traj, o); });
    return 0;
}

int run_attack_cmd(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    const SystemModel model(cfg.a, cfg.sigma2);
    const int L = cfg.L_grid.front();
    const int horizon = cfg.horizon > 0 ? cfg.horizon : L + 100;
    const AttackedTrajectory traj = run_attack(model, make_policy(cfg, cfg.dither_grid.front()),
                                               make_strategy(cfg, L), horizon, trial_seed(cfg, "attack", 0),
                                               make_options(cfg));
    emit(c, "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(traj, o); });
    if (traj.diverged) std::cerr << "warning: trajectory diverged at step " << *traj.diverged_at << '\n';
    return 0;
}

int run_detect(const Common& c, const std::string& input) {
    const ExperimentConfig cfg = resolve(c);
    std::ifstream in(input);
    if (!in) throw ConfigError("input", "cannot open '" + input + "'");
    const TrajectoryDump dump = read_trajectory_csv(in);
    if (dump.dim != cfg.dim()) throw ConfigError("A", "dimension does not match the trajectory");
    const int L = cfg.L_grid.front();

    DetectorConfig det;
    int horizon = 0;
    int onset = 0;
    if (cfg.detector == "variance") {
        det = VarianceTest{cfg.gamma};
        horizon = cfg.tau_grid.front();
    } else if (cfg.detector == "covariance") {
        det = CovarianceTest{cfg.gamma, noise_covariance(cfg)};
        horizon = cfg.tau_grid.front();
    } else {
        Mat reference;
        if (cfg.pinned_estimate) {
            reference = *cfg.pinned_estimate;
        } else if (dump.a_hat.size() > static_cast<std::size_t>(L)) {
            reference = dump.a_hat[static_cast<std::size_t>(L)];
        } else {
            throw ConfigError("pinned_estimate", "required when the trajectory has no a_hat columns");
        }
        det = Sprt{cfg.epsilon_grid.front(), reference};
        horizon = cfg.horizon > 0 ? cfg.horizon : static_cast<int>(dump.U.size());
        onset = L;
    }
    const DecisionRecord rec = run_detector(det, dump.Y, dump.U, cfg.a, cfg.sigma2, horizon, onset);
    const double stat = rec.statistic_path.empty() ? 0.0 : rec.statistic_path.back();
    if (c.format == "json") {
        emit_json(c, "detect",
                  {{"detector", cfg.detector},
                   {"tau", rec.tau},
                   {"theta_hat", rec.theta_hat},
                   {"censored", rec.censored},
                   {"statistic", stat},
                   {"statistic_path", rec.statistic_path}});
    } else {
        emit(c, "detect.csv", [&](std::ostream& o) {
            o << "detector,tau,theta_hat,censored,statistic\n"
              << cfg.detector << ',' << rec.tau << ',' << rec.theta_hat << ',' << (rec.censored ? 1 : 0) << ','
              << format_number(stat) << '\n';
        });
    }
    return 0;
}

int run_bounds(const Common& c, const std::string& curve_path) {
    const ExperimentConfig cfg = resolve(c);
    std::ifstream in(curve_path);
    if (!in) throw ConfigError("curve", "cannot open '" + curve_path + "'");
    const DeceptionCostCurve curve = read_curve_csv(in);

    json rows = json::array();
    for (double eps : cfg.epsilon_grid) {
        const BoundReport r = make_bound_report(curve, eps);
        json row{{"epsilon", eps},
                 {"n0_status", to_string(r.n0.status)},
                 {"n0", r.n0.n0 > 0 ? json(r.n0.n0) : json(nullptr)},
                 {"C_hat_at_n0", r.c_hat_n0 ? json(*r.c_hat_n0) : json(nullptr)},
                 {"C_hat_at_n0_next", r.c_hat_n0_next ? json(*r.c_hat_n0_next) : json(nullptr)},
                 {"thm1_lower", r.thm1_lower ? json(*r.thm1_lower) : json(nullptr)},
                 {"thm2_upper", r.thm2_upper ? json(*r.thm2_upper) : json(nullptr)}};
        for (double D : cfg.D_grid) {
            const std::string key = "thm3_L_lower_D" + format_number(D);
            row[key] = (cfg.tail_c && cfg.tail_alpha && r.c_tilde_n0)
                           ? json(exploration_lower_bound(D, *r.c_tilde_n0, eps, *cfg.tail_c, *cfg.tail_alpha,
                                                          cfg.delta))
                           : json(nullptr);
        }
        rows.push_back(row);
    }
    if (c.format == "json") {
        emit_json(c, "bounds", {{"exploration_length", curve.exploration_length}, {"bounds", rows}});
        return 0;
    }
    emit(c, "bounds.csv", [&](std::ostream& o) {
        std::vector<std::string> keys{"epsilon", "n0_status", "n0", "C_hat_at_n0", "C_hat_at_n0_next",
                                      "thm1_lower", "thm2_upper"};
        for (double D : cfg.D_grid) keys.push_back("thm3_L_lower_D" + format_number(D));
        for (std::size_t i = 0; i < keys.size(); ++i) o << (i ? "," : "") << keys[i];
        o << '\n';
        for (const json& row : rows) {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                const json& v = row[keys[i]];
                o << (i ? "," : "");
                if (v.is_string()) {
                    o << v.get<std::string>();
                } else if (v.is_number_integer()) {
                    o << v.get<std::int64_t>();
                } else if (v.is_number()) {
                    o << format_number(v.get<double>());
                }
            }
            o << '\n';
        }
    });
    return 0;
}

int run_experiment_cmd(const Common& c, const std::string& target) {
    const auto names = preset_names();
    const bool is_preset = std::find(names.begin(), names.end(), target) != names.end();
    Common cc = c;
    if (!is_preset) {
        if (!fs::exists(target)) {
            throw ConfigError("experiment", "'" + target + "' is neither a preset nor a config file");
        }
        if (cc.config) throw ConfigError("config", "give the config either positionally or with --config");
        cc.config = target;
    }
    const ExperimentConfig cfg = resolve(cc, is_preset ? std::optional<std::string>(target) : std::nullopt);
    const ValidationReport report = validate(cfg);
    if (!report.ok()) {
        for (const auto& issue : report.issues) std::cerr << "config error: " << issue.message << '\n';
        return kExitConfig;
    }
    const ExperimentResult result = run_experiment(cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    if (c.out) {
        for (const auto& p : emit_results(result, c.format, *c.out)) std::cerr << "wrote " << p.string() << '\n';
    } else if (c.format == "json") {
        write_result_json(result, std::cout);
    } else {
        write_result_csv(result, std::cout);
    }
    return 0;
}

int run_validate(const Common& c, const std::optional<std::string>& preset_name) {
    const ExperimentConfig cfg = resolve(c, preset_name, false);
    const ValidationReport report = validate(cfg);
    if (report.ok()) {
        std::cout << "ok: " << (cfg.preset.empty() ? cfg.experiment : cfg.preset) << " (config " << config_hash(cfg)
                  << ")\n";
        return 0;
    }
    for (const auto& issue : report.issues) std::cout << "FAIL " << issue.key << ": " << issue.message << '\n';
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Man-in-the-middle attack and detection experiments for linear systems"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    Common common;
    std::string input, curve, target;
    std::optional<std::string> validate_preset;

    auto* simulate = app.add_subcommand("simulate", "dump one nominal closed-loop trajectory");
    auto* attack = app.add_subcommand("attack", "dump one attacked trajectory");
    auto* detect = app.add_subcommand("detect", "run the configured detector on a dumped trajectory");
    auto* bounds = app.add_subcommand("bounds", "deception-time bounds from a stored cost curve");
    auto* experiment = app.add_subcommand("experiment", "run a preset or config file");
    auto* check = app.add_subcommand("validate", "static checks on a config");
    for (auto* sub : {simulate, attack, detect, bounds, experiment, check}) add_common(*sub, common);
    detect->add_option("--input", input, "trajectory CSV")->required();
    bounds->add_option("--curve", curve, "cost curve CSV")->required();
    experiment->add_option("target", target, "preset name or config path")->required();
    check->add_option("--preset", validate_preset, "preset to validate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) return run_simulate(common);
        if (*attack) return run_attack_cmd(common);
        if (*detect) return run_detect(common, input);
        if (*bounds) return run_bounds(common, curve);
        if (*experiment) return run_experiment_cmd(common, target);
        return run_validate(common, validate_preset);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
