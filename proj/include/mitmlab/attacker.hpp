#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "mitmlab/linalg.hpp"
#include "mitmlab/lti.hpp"
#include "mitmlab/random.hpp"
#include "mitmlab/series.hpp"

namespace mitmlab {

/// Least-squares sufficient statistics for X_{k+1} - U_k = A X_k + W_k.
///
/// gram = Σ X_k X_kᵀ, cross = Σ (X_{k+1} - U_k) X_kᵀ. The estimate is
/// cross · gram⁻¹ whenever gram is numerically invertible (smallest
/// eigenvalue above 1e-10 · trace) and the zero matrix otherwise.
struct EstimatorState {
    Mat gram;
    Mat cross;
    std::int64_t count = 0;
    Mat estimate;

    static EstimatorState empty(int dim);
    int dim() const noexcept { return static_cast<int>(gram.rows()); }
};

/// cross·gram⁻¹ or the zero matrix when gram is singular.
Mat ls_estimate(const EstimatorState& est);

/// Absorbs one transition and recomputes the estimate.
EstimatorState ls_update(EstimatorState est, const Vec& x_k, const Vec& x_next, const Vec& u_k);

/// In-place variant used on the simulation hot path.
void ls_absorb(EstimatorState& est, const Vec& x_k, const Vec& x_next, const Vec& u_k);

/// Â v + u + w̃
Vec fictitious_step(const Mat& a_hat, const Vec& v, const Vec& u, const Vec& w_tilde);

/// ‖Â - A‖_op
double estimation_error(const Mat& a_hat, const Mat& a);

enum class LearningMode { ExplorationOnly, Continual };

/// Ũ_k = ‖Â_L‖_op X_k
struct DestabilizingPush {};
/// Ũ_k = 0
struct ZeroInput {};
/// Ũ_k = gain · X_k
struct StateFeedbackInput {
    Mat gain;
};
using MaliciousInput = std::variant<DestabilizingPush, ZeroInput, StateFeedbackInput>;

struct AttackStrategy {
    int exploration_length = 1;  ///< L
    LearningMode mode = LearningMode::ExplorationOnly;
    MaliciousInput malicious = DestabilizingPush{};
    /// When set, the exploitation phase uses this estimate instead of the
    /// learned Â_L (the attack conditioned on a given exploration outcome).
    /// Only valid with ExplorationOnly.
    std::optional<Mat> pinned_estimate;
};

/// Per-step record of one attacked closed-loop run, indexed by time k.
///
/// X, V, Y, theta and a_hat have horizon+1 entries (k = 0..horizon); U,
/// Utilde, W and Wtilde have horizon entries (transition k -> k+1).
/// V[k] = X[k] for k <= L. Utilde is zero for k <= L and Wtilde is zero for
/// k < L. a_hat[k] is the estimate the attacker holds at time k.
struct AttackedTrajectory {
    int exploration_length = 0;
    Series X, V, Y;
    Series U, Utilde, W, Wtilde;
    std::vector<int> theta;
    MatrixSeries a_hat;

    bool diverged = false;              ///< fictitious or pre-attack state overflowed
    std::optional<int> diverged_at;
    std::optional<int> plant_destroyed_at;  ///< true state overflowed after takeover

    int horizon() const noexcept { return static_cast<int>(X.size()) - 1; }
};

/// Step-by-step attacked closed loop. run_attack records one of these; the
/// harness drives it directly when a detector may stop the run early.
class AttackSession {
public:
    enum class Status { Running, Diverged };

    AttackSession(const SystemModel& model, const ControlPolicy& policy, const AttackStrategy& strategy,
                  std::uint64_t trial_seed, const SimulationOptions& options = {});

    /// Advances from time k to k+1.
    Status advance();

    int k() const noexcept { return k_; }
    const Vec& x() const noexcept { return x_; }
    const Vec& v() const noexcept { return v_; }
    const Vec& y() const noexcept { return y_; }
    const Mat& a_hat() const noexcept { return a_hat_; }
    int theta() const noexcept { return k_ <= strategy_.exploration_length ? 0 : 1; }

    /// Quantities of the last transition (k-1 -> k).
    const Vec& u_prev() const noexcept { return u_; }
    const Vec& y_prev() const noexcept { return y_prev_; }
    const Vec& utilde_prev() const noexcept { return ut_; }
    const Vec& w_prev() const noexcept { return w_; }
    const Vec& wtilde_prev() const noexcept { return wt_; }
    const Mat& a_hat_prev() const noexcept { return a_hat_prev_; }

    /// Â_L, available once k >= L.
    const Mat& exploration_estimate() const noexcept { return a_hat_l_; }
    std::optional<int> plant_destroyed_at() const noexcept { return destroyed_at_; }
    const SystemModel& model() const noexcept { return model_; }

private:
    Vec malicious_input() const;

    SystemModel model_;
    ControlPolicy policy_;
    AttackStrategy strategy_;
    TrialStreams streams_;
    double guard_;

    int k_ = 0;
    Vec x_, v_, y_, y_prev_;
    Vec u_, ut_, w_, wt_;
    Mat a_hat_, a_hat_prev_, a_hat_l_;
    double a_hat_l_norm_ = 0.0;
    EstimatorState est_;
    std::optional<int> destroyed_at_;
};

/// Full attacked run of `horizon` transitions. Requires horizon > L. A
/// diverged run is truncated at the offending step.
AttackedTrajectory run_attack(const SystemModel& model, const ControlPolicy& policy, const AttackStrategy& strategy,
                              int horizon, std::uint64_t trial_seed, const SimulationOptions& options = {});

/// Monte-Carlo estimates of P(‖Â_k - A‖_op > η) for the LS learner run on
/// the nominal closed loop.
struct TailCell {
    int k = 0;
    double eta = 0.0;
    std::int64_t exceed = 0;
    std::int64_t trials = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double wilson_half_width = 0.0;
    double scalar_bound = 0.0;  ///< 2/(1+η²)^{k/2}
};

struct TailTable {
    std::vector<TailCell> cells;
    std::int64_t diverged = 0;
    /// Smallest c₁ with c₁·exp(-η²k) >= p̂ on every grid cell.
    double fitted_c1 = 0.0;
};

/// Estimates are read at each k of k_grid from the same run, i.e. Â_k uses
/// transitions 1..k-1. Trial i draws from derive_trial_seed(seed, "tail", i).
TailTable empirical_tail(const SystemModel& model, const ControlPolicy& policy, const std::vector<int>& k_grid,
                         const std::vector<double>& eta_grid, std::int64_t trials, std::uint64_t seed,
                         int workers = 1, const SimulationOptions& options = {});

/// 2/(1+η²)^{k/2}
double scalar_ls_tail_bound(int k, double eta);

}  // namespace mitmlab
