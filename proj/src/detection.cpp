#include "mitmlab/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mitmlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_window(const Series& y, const Series& u, int tau, const char* what) {
    if (tau < 1) throw std::invalid_argument(std::string(what) + ": tau must be >= 1");
    if (y.size() < static_cast<std::size_t>(tau) + 2 || u.size() < static_cast<std::size_t>(tau) + 1) {
        throw std::invalid_argument(std::string(what) + ": trajectory shorter than the window");
    }
}

void require_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

void require_spd(const Mat& sigma, int dim) {
    if (sigma.rows() != dim || sigma.cols() != dim) throw std::invalid_argument("Sigma: shape mismatch");
    require_finite(sigma, "Sigma");
    if (!sigma.isApprox(sigma.transpose(), 1e-12)) throw std::invalid_argument("Sigma must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> eig(sigma, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("Sigma must be positive definite");
}

}  // namespace

Vec residual(const Vec& y_next, const Vec& y_k, const Vec& u_k, const Mat& a) {
    if (a.rows() != a.cols() || y_next.size() != a.rows() || y_k.size() != a.rows() || u_k.size() != a.rows()) {
        throw std::invalid_argument("residual: dimension mismatch");
    }
    Vec r = y_next - a * y_k;
    r -= u_k;
    return r;
}

void validate_detector(const DetectorConfig& config, int dim) {
    std::visit(Overloaded{
                   [&](const VarianceTest& v) {
                       require_gamma(v.gamma);
                       if (dim != 1) throw std::invalid_argument("variance test requires a scalar system");
                   },
                   [&](const CovarianceTest& c) {
                       require_gamma(c.gamma);
                       require_spd(c.sigma, dim);
                   },
                   [&](const Sprt& s) {
                       require_epsilon(s.epsilon);
                       if (s.reference_a_hat.rows() != dim || s.reference_a_hat.cols() != dim) {
                           throw std::invalid_argument("Sprt: reference_A_hat shape mismatch");
                       }
                   },
               },
               config);
}

VarianceMonitor::VarianceMonitor(double a, double sigma2, double gamma) : a_(a), sigma2_(sigma2), gamma_(gamma) {
    require_gamma(gamma);
}

void VarianceMonitor::observe(double y_next, double y_k, double u_k) noexcept {
    observe_residual(y_next - a_ * y_k - u_k);
}

int VarianceMonitor::theta_hat() const noexcept {
    const double s = statistic();
    return (s > sigma2_ - gamma_ && s < sigma2_ + gamma_) ? 0 : 1;
}

CovarianceMonitor::CovarianceMonitor(Mat a, Mat sigma, double gamma)
    : a_(std::move(a)), sigma_(std::move(sigma)), gamma_(gamma) {
    require_gamma(gamma);
    if (a_.rows() != a_.cols()) throw std::invalid_argument("CovarianceMonitor: A must be square");
    require_spd(sigma_, static_cast<int>(a_.rows()));
    outer_sum_ = Mat::Zero(a_.rows(), a_.rows());
}

void CovarianceMonitor::observe(const Vec& y_next, const Vec& y_k, const Vec& u_k) {
    const Vec r = residual(y_next, y_k, u_k, a_);
    if (count_ > 0) outer_sum_.noalias() += r * r.transpose();
    ++count_;
}

Mat CovarianceMonitor::error_matrix() const {
    return sigma_ - outer_sum_ / static_cast<double>(tau());
}

std::vector<double> variance_statistic_path(const Series& y, const Series& u, const Mat& a, int tau_max) {
    if (a.rows() != 1 || a.cols() != 1) throw std::invalid_argument("variance test requires a scalar system");
    require_window(y, u, tau_max, "variance_statistic_path");
    std::vector<double> path(static_cast<std::size_t>(tau_max) + 1, 0.0);
    double sum_sq = 0.0;
    const double av = a(0, 0);
    for (int k = 0; k <= tau_max; ++k) {
        const double r = y[k + 1](0) - av * y[k](0) - u[k](0);
        sum_sq += r * r;
        if (k >= 1) path[static_cast<std::size_t>(k)] = sum_sq / static_cast<double>(k);
    }
    return path;
}

int variance_test(const Series& y, const Series& u, const Mat& a, double gamma, int tau, double sigma2) {
    require_gamma(gamma);
    const double s = variance_statistic_path(y, u, a, tau).back();
    return (s > sigma2 - gamma && s < sigma2 + gamma) ? 0 : 1;
}

double chebyshev_fa_bound(double sigma2, double gamma, int tau) {
    require_gamma(gamma);
    if (tau < 1) throw std::invalid_argument("chebyshev_fa_bound: tau must be >= 1");
    return 3.0 * sigma2 * sigma2 / (gamma * gamma * static_cast<double>(tau));
}

Mat covariance_error_matrix(const Series& y, const Series& u, const Mat& a, const Mat& sigma, int tau) {
    require_window(y, u, tau, "covariance_test");
    if (a.rows() != a.cols() || a.rows() != y.dim()) throw std::invalid_argument("covariance_test: shape mismatch");
    require_spd(sigma, static_cast<int>(a.rows()));
    Mat outer = Mat::Zero(a.rows(), a.rows());
    for (int k = 1; k <= tau; ++k) {
        const Vec r = residual(y[k + 1], y[k], u[k], a);
        outer.noalias() += r * r.transpose();
    }
    return sigma - outer / static_cast<double>(tau);
}

int covariance_test(const Series& y, const Series& u, const Mat& a, const Mat& sigma, double gamma, int tau) {
    require_gamma(gamma);
    return operator_norm(covariance_error_matrix(y, u, a, sigma, tau)) <= gamma ? 0 : 1;
}

double sprt_increment(const Vec& y_k, const Vec& y_prev, const Vec& u_prev, const Mat& a, const Mat& a_hat,
                      double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sprt_increment: sigma2 must be > 0");
    if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols()) {
        throw std::invalid_argument("sprt_increment: A_hat shape mismatch");
    }
    const Vec r0 = residual(y_k, y_prev, u_prev, a);
    const Vec r1 = residual(y_k, y_prev, u_prev, a_hat);
    return (r0.squaredNorm() - r1.squaredNorm()) / (2.0 * sigma2);
}

SprtAccumulator::SprtAccumulator(Mat a, Mat a_hat, double sigma2, double epsilon, int onset, bool keep_path)
    : a_(std::move(a)), a_hat_(std::move(a_hat)), sigma2_(sigma2), threshold_(0.0), onset_(onset),
      keep_path_(keep_path) {
    require_epsilon(epsilon);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("SPRT: sigma2 must be > 0");
    if (a_hat_.rows() != a_.rows() || a_hat_.cols() != a_.cols()) {
        throw std::invalid_argument("SPRT: A_hat shape mismatch");
    }
    if (onset < 0) throw std::invalid_argument("SPRT: onset must be >= 0");
    threshold_ = std::log(1.0 / epsilon);
    if (keep_path_) path_.push_back(0.0);
}

bool SprtAccumulator::observe(const Vec& y_n, const Vec& y_prev, const Vec& u_prev) {
    if (decided_) return true;
    ++n_;
    if (n_ > onset_) s_ += sprt_increment(y_n, y_prev, u_prev, a_, a_hat_, sigma2_);
    if (keep_path_) path_.push_back(s_);
    if (s_ >= threshold_) {
        decided_ = true;
        theta_hat_ = 1;
    } else if (-s_ >= threshold_) {
        decided_ = true;
        theta_hat_ = 0;
    }
    return decided_;
}

DecisionRecord SprtAccumulator::record() const {
    DecisionRecord rec;
    rec.tau = n_;
    rec.censored = !decided_;
    rec.theta_hat = decided_ ? theta_hat_ : (s_ > 0.0 ? 1 : 0);
    rec.statistic_path = path_;
    return rec;
}

DecisionRecord sprt_run(const Series& y, const Series& u, const Mat& a, const Mat& a_hat, double sigma2,
                        double epsilon, int max_horizon, int onset) {
    if (max_horizon < 0) throw std::invalid_argument("sprt_run: max_horizon must be >= 0");
    SprtAccumulator acc(a, a_hat, sigma2, epsilon, onset);
    const std::size_t available = std::min(y.size() == 0 ? 0 : y.size() - 1, u.size());
    const int last = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_horizon), available));
    for (int n = 1; n <= last; ++n) {
        if (acc.observe(y[n], y[n - 1], u[n - 1])) break;
    }
    return acc.record();
}

DecisionRecord run_detector(const DetectorConfig& config, const Series& y, const Series& u, const Mat& a,
                            double sigma2, int horizon, int onset) {
    validate_detector(config, static_cast<int>(a.rows()));
    return std::visit(Overloaded{
                          [&](const VarianceTest& v) {
                              DecisionRecord rec;
                              rec.statistic_path = variance_statistic_path(y, u, a, horizon);
                              const double s = rec.statistic_path.back();
                              rec.tau = horizon;
                              rec.theta_hat = (s > sigma2 - v.gamma && s < sigma2 + v.gamma) ? 0 : 1;
                              return rec;
                          },
                          [&](const CovarianceTest& c) {
                              require_window(y, u, horizon, "covariance_test");
                              CovarianceMonitor mon(a, c.sigma, c.gamma);
                              DecisionRecord rec;
                              rec.statistic_path.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
                              for (int k = 0; k <= horizon; ++k) {
                                  mon.observe(y[k + 1], y[k], u[k]);
                                  if (k >= 1) rec.statistic_path[static_cast<std::size_t>(k)] = mon.statistic();
                              }
                              rec.tau = horizon;
                              rec.theta_hat = mon.theta_hat();
                              return rec;
                          },
                          [&](const Sprt& s) {
                              return sprt_run(y, u, a, s.reference_a_hat, sigma2, s.epsilon, horizon, onset);
                          },
                      },
                      config);
}

}  // namespace mitmlab
