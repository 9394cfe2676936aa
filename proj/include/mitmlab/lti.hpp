#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "mitmlab/linalg.hpp"
#include "mitmlab/random.hpp"
#include "mitmlab/series.hpp"

namespace mitmlab {

/// Plant X_{k+1} = A X_k + U_k + W_k with W_k ~ N(0, sigma2 I).
class SystemModel {
public:
    /// Throws std::invalid_argument if A is not square, has non-finite
    /// entries, or sigma2 is negative or non-finite.
    /// sigma2 == 0 is accepted (noiseless plant).
    SystemModel(Mat a, double sigma2);

    const Mat& a() const noexcept { return a_; }
    double sigma2() const noexcept { return sigma2_; }
    int dim() const noexcept { return static_cast<int>(a_.rows()); }

private:
    Mat a_;
    double sigma2_;
};

/// U_k = -gain * Y_k
struct LinearGain {
    Mat gain;
};

/// U_k = -a_ref * Y_k + Γ_k, Γ_k ~ N(0, dither_var I)
struct CancelPlusDither {
    Mat a_ref;
    double dither_var = 0.0;
};

/// U_k = -scale * a_ref * Y_k
struct ScaledCancel {
    Mat a_ref;
    double scale = 1.0;
};

using ControlPolicy = std::variant<LinearGain, CancelPlusDither, ScaledCancel>;

/// Throws std::invalid_argument if the policy matrices are not dim×dim or the
/// dither variance is negative.
void validate_policy(const ControlPolicy& policy, int dim);

/// The feedback matrix the policy multiplies Y by (U = -K Y + dither).
Mat policy_feedback_matrix(const ControlPolicy& policy);

std::string describe(const ControlPolicy& policy);

/// A x + u + w. Throws std::invalid_argument on dimension mismatch.
Vec step_plant(const Vec& x, const Vec& u, const Vec& w, const SystemModel& model);

/// One draw of N(0, sigma2 I).
Vec draw_noise(RandomStream& rng, const SystemModel& model);

/// Control input for feedback y. Dither, if any, comes from `rng`.
Vec apply_policy(const ControlPolicy& policy, const Vec& y, RandomStream& rng);

struct SimulationOptions {
    std::optional<Vec> x0;          ///< defaults to the vector of ones
    double overflow_guard = 1e9;    ///< ‖X_k‖₂ above this marks divergence
};

Vec initial_state(const SimulationOptions& options, int dim);

/// X has horizon+1 entries, U and W have horizon entries; U[0] = W[0] = 0.
struct NominalTrajectory {
    Series X;
    Series U;
    Series W;
    bool diverged = false;
    std::optional<int> diverged_at;  ///< step whose state exceeded the guard
};

/// Closed-loop run without an attacker. A diverged run is truncated at the
/// offending state.
NominalTrajectory simulate_nominal(const SystemModel& model, const ControlPolicy& policy, int horizon,
                                   std::uint64_t trial_seed, const SimulationOptions& options = {});

}  // namespace mitmlab
