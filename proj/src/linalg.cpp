#include "mitmlab/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "mitmlab/random.hpp"

namespace mitmlab {
namespace {

void require_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
}

struct PowerIterationOutcome {
    double value;
    bool converged;
};

PowerIterationOutcome power_iterate(const Mat& gram, RandomStream& rng, double tol, int max_iter) {
    Vec v(gram.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
    v.normalize();

    double rayleigh = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vec w = gram * v;
        rayleigh = v.dot(w);
        if (rayleigh <= 0.0 && w.norm() == 0.0) return {0.0, true};
        // Stop on the eigen-residual: for symmetric gram, |rayleigh - λ| <= ‖r‖.
        if ((w - rayleigh * v).norm() <= tol * rayleigh) return {rayleigh, true};
        v = w / w.norm();
    }
    return {rayleigh, false};
}

}  // namespace

void require_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

double operator_norm(const Mat& m, double tol) {
    require_square(m, "operator_norm");
    require_finite(m, "operator_norm");
    if (m.rows() == 1) return std::abs(m(0, 0));

    const Mat gram = m.transpose() * m;
    constexpr int kMaxIterations = 10'000;
    RandomStream rng(0x5eed0f0b5e55ULL);
    auto outcome = power_iterate(gram, rng, tol, kMaxIterations);
    if (!outcome.converged) {
        const auto retry = power_iterate(gram, rng, tol, kMaxIterations);
        outcome.value = std::max(outcome.value, retry.value);
    }
    return std::sqrt(std::max(outcome.value, 0.0));
}

double spectral_radius(const Mat& m) {
    require_square(m, "spectral_radius");
    require_finite(m, "spectral_radius");
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_marginally_stable(const Mat& m, double tol) { return spectral_radius(m) <= 1.0 + tol; }

}  // namespace mitmlab
