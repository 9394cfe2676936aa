#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitmlab/attacker.hpp"
#include "mitmlab/detection.hpp"
#include "mitmlab/linalg.hpp"
#include "mitmlab/lti.hpp"
#include "mitmlab/metrics.hpp"
#include "mitmlab/parallel.hpp"
#include "mitmlab/stats.hpp"

namespace mitmlab {

inline constexpr const char* kVersion = MITMLAB_VERSION;

/// Fully resolved experiment description. Field names match the flat JSON
/// config keys.
struct ExperimentConfig {
    std::string experiment = "success_vs_L";
    std::string preset;
    int preset_version = 0;

    Mat a = Mat::Constant(1, 1, 1.1);
    double sigma2 = 1.0;
    std::optional<Vec> x0;
    double overflow_guard = 1e9;

    std::string policy = "cancel_dither";  ///< cancel_dither | scaled_cancel | linear_gain
    std::optional<Mat> policy_gain;        ///< K̄ for linear_gain
    double policy_scale = 1.0;             ///< scaled_cancel factor
    std::vector<double> dither_grid{0.0};

    std::vector<int> L_grid{100};
    std::string learning_mode = "exploration_only";      ///< exploration_only | continual
    std::string malicious_input = "destabilizing_push";  ///< destabilizing_push | zero
    std::optional<Mat> pinned_estimate;

    std::string detector = "variance";  ///< variance | covariance | sprt
    double gamma = 0.1;
    std::vector<double> gamma_grid;  ///< chebyshev experiment; defaults to {gamma}
    std::vector<int> tau_grid{800};
    std::optional<Mat> Sigma;  ///< defaults to sigma2·I
    std::vector<double> epsilon_grid{0.05};

    std::int64_t trials = 10000;
    std::int64_t sprt_trials = 1000;
    std::int64_t curve_trials = 10000;
    int horizon = 0;  ///< 0 selects an experiment-specific default
    int max_horizon = 20000;
    std::uint64_t master_seed = 1;
    int workers = 1;

    std::vector<int> k_grid{20, 50, 100};
    std::vector<double> eta_grid{0.25, 0.5, 1.0};
    std::vector<double> D_grid{20.0, 50.0};
    double delta = 0.1;
    std::optional<double> tail_c;
    std::optional<double> tail_alpha;
    int kl_offset = 50;

    int dim() const noexcept { return static_cast<int>(a.rows()); }
};

/// Builds the control policy for one dither level.
ControlPolicy make_policy(const ExperimentConfig& config, double dither_var);
AttackStrategy make_strategy(const ExperimentConfig& config, int exploration_length);
SimulationOptions make_options(const ExperimentConfig& config);
Mat noise_covariance(const ExperimentConfig& config);

/// Names of the compiled-in presets.
std::vector<std::string> preset_names();
/// Throws std::invalid_argument for an unknown name.
ExperimentConfig preset(const std::string& name);
int preset_version(const std::string& name);

struct CellResult {
    std::string cell;
    std::string kind;
    std::optional<int> L;
    std::optional<double> dither_var;
    std::optional<int> tau;
    std::optional<double> epsilon;
    std::optional<double> rate;
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
    std::optional<double> T_hat;
    std::optional<double> C_hat_at_n0;
    std::optional<int> n0;
    std::optional<double> thm1_lower;
    std::optional<double> thm2_upper;
    std::optional<double> censored_frac;
    std::int64_t successes = 0;
    std::int64_t failures = 0;
    std::int64_t censored = 0;
    std::int64_t diverged = 0;
    std::int64_t trials = 0;
    nlohmann::json extras = nlohmann::json::object();
};

struct Provenance {
    nlohmann::json config;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::string version = kVersion;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<CellResult> cells;
    std::vector<std::string> warnings;
    Provenance provenance;

    const CellResult* find(const std::string& cell) const;
};

/// Success/failure/censored/diverged tallies of one cell.
struct RateCounts {
    std::int64_t successes = 0;
    std::int64_t failures = 0;
    std::int64_t censored = 0;
    std::int64_t diverged = 0;

    std::int64_t total() const noexcept { return successes + failures + censored + diverged; }
    std::int64_t valid() const noexcept { return successes + failures + censored; }
    void merge(const RateCounts& o) noexcept {
        successes += o.successes;
        failures += o.failures;
        censored += o.censored;
        diverged += o.diverged;
    }
};

/// Trial i of a cell draws from derive_trial_seed(master_seed, cell_id, i).
std::uint64_t trial_seed(const ExperimentConfig& config, const std::string& cell_id, std::int64_t trial);

/// Attacked trajectories of one cell, in trial order.
std::vector<AttackedTrajectory> run_trials(const ExperimentConfig& config, const std::string& cell_id,
                                           int exploration_length, double dither_var, int horizon);

/// Order-independent reduction of per-trial contributions (fixed 64-trial
/// blocks merged pairwise), identical for every worker count.
template <class Acc, class MakeAcc, class Fn>
Acc reduce_trials(const ExperimentConfig& config, std::int64_t trials, MakeAcc&& make, Fn&& fn) {
    return blocked_reduce<Acc>(trials, config.workers, std::forward<MakeAcc>(make), std::forward<Fn>(fn));
}

ExperimentResult experiment_success_vs_L(const ExperimentConfig& config);
ExperimentResult experiment_success_vs_window(const ExperimentConfig& config);
ExperimentResult experiment_bound_suite(const ExperimentConfig& config);
ExperimentResult experiment_kl_identity(const ExperimentConfig& config);
ExperimentResult experiment_ls_tail(const ExperimentConfig& config);
ExperimentResult experiment_chebyshev(const ExperimentConfig& config);
ExperimentResult experiment_exploration_recipe(const ExperimentConfig& config);
ExperimentResult experiment_energy_tradeoff(const ExperimentConfig& config);

/// Dispatches on config.experiment and fills the provenance block.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Monte-Carlo deception-cost curve of one cell, with the attacker's
/// exploration error and log-likelihood identity check at n = L + kl_offset when in range.
struct CurveEnsemble {
    DeceptionCostCurve curve;
    KlIdentityReport kl;
    MeanAccumulator exploration_error_sq;
    PathAccumulator energy;  ///< per-trial Σ_{k=L}^{n-1}‖U_{k-1}‖² for n in (L, n_max]
    std::int64_t diverged = 0;
};

CurveEnsemble estimate_curve(const ExperimentConfig& config, const std::string& cell_id, int exploration_length,
                             double dither_var, int n_max, std::int64_t trials);

/// Quantile q of ‖Â_L - A‖_op under the configured policy (exploration only).
double exploration_error_quantile(const ExperimentConfig& config, int exploration_length, double dither_var,
                                  double q, std::int64_t trials);

}  // namespace mitmlab
