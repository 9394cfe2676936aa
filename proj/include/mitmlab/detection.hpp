#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "mitmlab/linalg.hpp"
#include "mitmlab/series.hpp"

namespace mitmlab {

/// y_next - A y_k - u_k
Vec residual(const Vec& y_next, const Vec& y_k, const Vec& u_k, const Mat& a);

/// Decision of one detector run. statistic_path[n] is the statistic after
/// n steps; for the windowed tests n is the window length τ.
struct DecisionRecord {
    int tau = 0;
    int theta_hat = 0;
    std::vector<double> statistic_path;
    bool censored = false;
};

struct VarianceTest {
    double gamma = 0.1;
};

struct CovarianceTest {
    double gamma = 0.1;
    Mat sigma;  ///< noise covariance Σ
};

struct Sprt {
    double epsilon = 0.05;
    Mat reference_a_hat;
};

using DetectorConfig = std::variant<VarianceTest, CovarianceTest, Sprt>;

/// Throws std::invalid_argument when gamma <= 0, epsilon is outside (0, 1)
/// or Σ is not symmetric positive definite.
void validate_detector(const DetectorConfig& config, int dim);

/// Streaming empirical-variance statistic (1/τ) Σ_{k=0}^{τ} r_k² of a scalar
/// loop. Residual r_k is fed at time k+1.
class VarianceMonitor {
public:
    VarianceMonitor(double a, double sigma2, double gamma);

    void observe(double y_next, double y_k, double u_k) noexcept;
    void observe_residual(double r) noexcept {
        sum_sq_ += r * r;
        ++count_;
    }

    /// τ = residuals seen - 1.
    int tau() const noexcept { return count_ - 1; }
    /// Requires tau() >= 1.
    double statistic() const noexcept { return sum_sq_ / static_cast<double>(tau()); }
    int theta_hat() const noexcept;

private:
    double a_;
    double sigma2_;
    double gamma_;
    double sum_sq_ = 0.0;
    int count_ = 0;
};

/// Streaming error matrix Δ = Σ - (1/τ) Σ_{k=1}^{τ} r_k r_kᵀ. The k = 0
/// residual is observed but not accumulated.
class CovarianceMonitor {
public:
    CovarianceMonitor(Mat a, Mat sigma, double gamma);

    void observe(const Vec& y_next, const Vec& y_k, const Vec& u_k);

    int tau() const noexcept { return count_ - 1; }
    /// Requires tau() >= 1.
    Mat error_matrix() const;
    double statistic() const { return operator_norm(error_matrix()); }
    int theta_hat() const { return statistic() <= gamma_ ? 0 : 1; }

private:
    Mat a_;
    Mat sigma_;
    double gamma_;
    Mat outer_sum_;
    int count_ = 0;
};

/// θ̂ of the variance test over the window [0, τ]. Needs Y[0..τ+1] and
/// U[0..τ]. Throws std::invalid_argument for dim != 1, τ < 1 or a short
/// trajectory.
int variance_test(const Series& y, const Series& u, const Mat& a, double gamma, int tau, double sigma2);

/// (1/τ) Σ_{k=0}^{τ} r_k² for τ = 1..tau_max; entry 0 is 0.
std::vector<double> variance_statistic_path(const Series& y, const Series& u, const Mat& a, int tau_max);

/// 3σ⁴/(γ²τ)
double chebyshev_fa_bound(double sigma2, double gamma, int tau);

Mat covariance_error_matrix(const Series& y, const Series& u, const Mat& a, const Mat& sigma, int tau);

/// θ̂ = 0 iff ‖Δ‖_op <= γ.
int covariance_test(const Series& y, const Series& u, const Mat& a, const Mat& sigma, double gamma, int tau);

/// One-step Gaussian log-likelihood ratio log p₁/p₀ between the attacked
/// model (Â) and the nominal one (A). Throws for sigma2 <= 0.
double sprt_increment(const Vec& y_k, const Vec& y_prev, const Vec& u_prev, const Mat& a, const Mat& a_hat,
                      double sigma2);

/// Running SPRT. Step n consumes (y_n, y_{n-1}, u_{n-1}); increments at
/// n <= onset are zero because both hypotheses coincide before the attack.
class SprtAccumulator {
public:
    SprtAccumulator(Mat a, Mat a_hat, double sigma2, double epsilon, int onset = 0, bool keep_path = true);

    /// Returns true once a decision has been reached (later calls are ignored).
    bool observe(const Vec& y_n, const Vec& y_prev, const Vec& u_prev);

    double statistic() const noexcept { return s_; }
    int steps() const noexcept { return n_; }
    bool decided() const noexcept { return decided_; }
    double threshold() const noexcept { return threshold_; }

    /// Decision so far; undecided runs are censored with the sign of S.
    DecisionRecord record() const;

private:
    Mat a_;
    Mat a_hat_;
    double sigma2_;
    double threshold_;
    int onset_;
    bool keep_path_;
    double s_ = 0.0;
    int n_ = 0;
    bool decided_ = false;
    int theta_hat_ = 0;
    std::vector<double> path_;
};

/// SPRT over a stored trajectory, stopping at the first decision or at
/// min(max_horizon, last available step).
DecisionRecord sprt_run(const Series& y, const Series& u, const Mat& a, const Mat& a_hat, double sigma2,
                        double epsilon, int max_horizon, int onset = 0);

/// Dispatches on the detector variant. For the windowed tests `horizon` is
/// the decision time τ; for the SPRT it is the censoring horizon.
DecisionRecord run_detector(const DetectorConfig& config, const Series& y, const Series& u, const Mat& a,
                            double sigma2, int horizon, int onset = 0);

}  // namespace mitmlab
