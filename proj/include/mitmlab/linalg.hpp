#pragma once

#include <Eigen/Dense>

namespace mitmlab {

/// Largest supported state dimension. Vectors and matrices carry their
/// storage inline up to this size, so per-step arithmetic never allocates.
inline constexpr int kMaxDim = 10;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Operator norm induced by the Euclidean norm (largest singular value).
///
/// Power iteration on MᵀM from a pseudo-random unit vector, stopping when the
/// Rayleigh quotient changes by less than `tol` (relative). If the iteration
/// stagnates without converging it restarts once from a fresh vector.
/// Throws std::invalid_argument on non-square input or non-finite entries.
double operator_norm(const Mat& m, double tol = 1e-10);

/// Largest eigenvalue modulus. Throws std::invalid_argument on non-square or
/// non-finite input.
double spectral_radius(const Mat& m);

/// spectral_radius(m) <= 1 + tol.
bool is_marginally_stable(const Mat& m, double tol = 1e-9);

/// Throws std::invalid_argument naming `what` when any entry is NaN or inf.
void require_finite(const Mat& m, const char* what);

}  // namespace mitmlab
