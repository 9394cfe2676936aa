#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mitmlab/attacker.hpp"
#include "mitmlab/detection.hpp"
#include "mitmlab/linalg.hpp"
#include "mitmlab/stats.hpp"

namespace mitmlab {

/// Per-step summands of the deception cost at step k, evaluated on
/// (Â_{k-1}, V_{k-1}): ‖(Â-A)v‖²/(2σ²) and ‖v‖²/(2σ²).
struct CostTerms {
    double cost = 0.0;
    double tilde = 0.0;
};
CostTerms deception_cost_terms(const Mat& a_hat, const Vec& v, const Mat& a, double sigma2);

/// Ĉ(n) and C̃(n) for n = L+1 .. n_max, with standard errors.
struct DeceptionCostCurve {
    int exploration_length = 0;
    std::vector<double> c_hat;
    std::vector<double> c_hat_se;
    std::vector<double> c_tilde;
    std::vector<double> c_tilde_se;
    std::int64_t trials = 0;

    int n_first() const noexcept { return exploration_length + 1; }
    int n_max() const noexcept { return exploration_length + static_cast<int>(c_hat.size()); }
    bool contains(int n) const noexcept { return n >= n_first() && n <= n_max(); }
    /// Throws std::out_of_range outside (L, n_max].
    double c_at(int n) const;
    double c_se_at(int n) const;
    double c_tilde_at(int n) const;
    double c_tilde_se_at(int n) const;

    /// Curve from explicit values (standard errors zero).
    static DeceptionCostCurve from_values(int exploration_length, std::vector<double> c_hat,
                                          std::vector<double> c_tilde = {});
};

/// Reduction over per-trial cumulative sums Σ_{k=L+1}^{n} for n = L+1..n_max.
class DeceptionCostAccumulator {
public:
    DeceptionCostAccumulator() = default;
    DeceptionCostAccumulator(int exploration_length, int n_max);

    void add(const std::vector<double>& cost_cumulative, const std::vector<double>& tilde_cumulative);
    void merge(const DeceptionCostAccumulator& other);
    std::int64_t trials() const noexcept { return cost_.n; }
    DeceptionCostCurve curve() const;

private:
    int exploration_length_ = 0;
    int n_max_ = 0;
    PathAccumulator cost_;
    PathAccumulator tilde_;
};

/// Cumulative cost and C̃ summands of one trajectory for n = L+1..n_max.
/// Requires V and a_hat to cover k = 0..n_max-1.
void trajectory_cost_paths(const AttackedTrajectory& traj, const Mat& a, double sigma2, int n_max,
                           std::vector<double>& cost_cumulative, std::vector<double>& tilde_cumulative);

/// Throws std::invalid_argument for an empty ensemble or n_max <= L.
/// Diverged trajectories are skipped.
DeceptionCostCurve deception_cost_curve(const std::vector<AttackedTrajectory>& ensemble, const Mat& a, double sigma2,
                                        int n_max);

/// Monte-Carlo mean of the cumulative log-likelihood ratio S^n against n·Ĉ(n).
struct KlIdentityReport {
    int n = 0;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    double z = 0.0;         ///< (lhs - rhs) / sqrt(se_lhs² + se_rhs²)
    double z_paired = 0.0;  ///< mean of per-trial differences over its standard error
    std::int64_t trials = 0;
};

class KlAccumulator {
public:
    void add(double llr_sum, double cost_sum) noexcept {
        llr_.add(llr_sum);
        cost_.add(cost_sum);
        diff_.add(llr_sum - cost_sum);
    }
    void merge(const KlAccumulator& o) noexcept {
        llr_.merge(o.llr_);
        cost_.merge(o.cost_);
        diff_.merge(o.diff_);
    }
    KlIdentityReport report(int n) const;

private:
    MeanAccumulator llr_, cost_, diff_;
};

/// Σ_{k=L+1}^{n} log p₁/p₀ of one trajectory, p₁ using the attacker's Â_{k-1}.
double trajectory_llr(const AttackedTrajectory& traj, const Mat& a, double sigma2, int n);

KlIdentityReport kl_identity_check(const std::vector<AttackedTrajectory>& ensemble, const Mat& a, double sigma2,
                                   int n);

enum class N0Status { Finite, UnboundedWithinHorizon, Degenerate, Infinite };
std::string to_string(N0Status status);

struct N0Result {
    N0Status status = N0Status::Degenerate;
    int n0 = 0;  ///< meaningful for Finite and UnboundedWithinHorizon (= n_max)
    bool finite() const noexcept { return status == N0Status::Finite; }
};

/// n₀ = max{n > L : n·Ĉ(n) < log(1/ε)} over the stored range.
N0Result compute_n0(const DeceptionCostCurve& curve, double epsilon);

/// Leading-order deception-time bounds log(1/ε)/Ĉ(n₀) and log(1/ε)/Ĉ(n₀+1).
struct DeceptionTimeBounds {
    int n0 = 0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Throws std::domain_error unless n₀ is finite with Ĉ(n₀) > 0.
DeceptionTimeBounds deception_time_bounds(const DeceptionCostCurve& curve, double epsilon);

/// Mean of τ - L - 1 over non-censored attacked SPRT records.
struct DeceptionTimeEstimate {
    std::int64_t decided = 0;
    std::int64_t censored = 0;
    std::optional<double> mean;
    double se = 0.0;
    Interval ci;
    double censored_fraction = 0.0;
};

class DeceptionTimeAccumulator {
public:
    void add(const DecisionRecord& record, int exploration_length);
    void merge(const DeceptionTimeAccumulator& o) noexcept {
        times_.merge(o.times_);
        censored_ += o.censored_;
    }
    DeceptionTimeEstimate estimate() const;

private:
    MeanAccumulator times_;
    std::int64_t censored_ = 0;
};

DeceptionTimeEstimate empirical_deception_time(const std::vector<DecisionRecord>& records, int exploration_length);

/// D·C̃(n₀)/log(1/ε)·(c/δ)^{1/α}
double exploration_lower_bound(double d, double c_tilde_n0, double epsilon, double c, double alpha, double delta);
/// Same, reading C̃(n₀) from the curve. Throws std::domain_error when n₀ is
/// not finite.
double exploration_lower_bound(double d, const DeceptionCostCurve& curve, double epsilon, double c, double alpha,
                               double delta);

/// L = D·C̃(n₀)·log(c₁/δ)/log(1/ε)
double exploration_length_recipe(double d, double c_tilde_n0, double epsilon, double c1, double delta);

/// 2σ²·log(1/ε)/(‖Â_L-A‖²_op·D)
double energy_lower_bound(double sigma2, double epsilon, double d, double estimation_error);

/// Σ_{k=L}^{n₀-1} ‖U_{k-1}‖² / n₀ of one trajectory.
double trajectory_energy(const Series& u, int exploration_length, int n0);

struct EnergyReport {
    int n0 = 0;
    double r_hat = 0.0;
    double r_se = 0.0;
    std::int64_t trials = 0;
};

EnergyReport energy_metrics(const std::vector<AttackedTrajectory>& ensemble, int n0);

/// Monte-Carlo LHS of E[VᵀÂᵀÂV] + σ² + 2E[VᵀÂᵀU] at time k.
struct PolicyConditionPoint {
    int k = 0;
    double lhs = 0.0;
    double se = 0.0;
    bool holds = false;  ///< lhs <= se
};

std::vector<PolicyConditionPoint> policy_condition_check(const std::vector<AttackedTrajectory>& ensemble,
                                                         double sigma2, int k_first, int k_last);

/// Bound calculators and their empirical counterparts for one ε.
struct BoundReport {
    double epsilon = 0.0;
    N0Result n0;
    std::optional<double> c_hat_n0;
    std::optional<double> c_hat_n0_next;
    std::optional<double> c_tilde_n0;
    std::optional<double> thm1_lower;
    std::optional<double> thm2_upper;
    std::optional<double> thm3_l_lower;
    std::optional<double> thm5_energy_lower;
    DeceptionTimeEstimate empirical;
    std::optional<double> ratio_to_lower;  ///< T̂ / thm1_lower
    std::optional<double> ratio_to_upper;  ///< T̂ / thm2_upper
};

/// Fills n₀, Ĉ values and the deception-time bounds; empirical fields left for the caller.
BoundReport make_bound_report(const DeceptionCostCurve& curve, double epsilon);

}  // namespace mitmlab
