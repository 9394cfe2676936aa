#include "mitmlab/lti.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mitmlab {
namespace {

void require_dim(const Vec& v, int dim, const char* what) {
    if (v.size() != dim) {
        std::ostringstream os;
        os << what << ": expected length " << dim << ", got " << v.size();
        throw std::invalid_argument(os.str());
    }
}

void require_shape(const Mat& m, int dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
        std::ostringstream os;
        os << what << ": expected " << dim << "x" << dim << " matrix, got " << m.rows() << "x" << m.cols();
        throw std::invalid_argument(os.str());
    }
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

SystemModel::SystemModel(Mat a, double sigma2) : a_(std::move(a)), sigma2_(sigma2) {
    if (a_.rows() == 0 || a_.rows() != a_.cols()) throw std::invalid_argument("SystemModel: A must be square");
    require_finite(a_, "SystemModel: A");
    if (!std::isfinite(sigma2_) || sigma2_ < 0.0) throw std::invalid_argument("SystemModel: sigma2 must be >= 0");
}

void validate_policy(const ControlPolicy& policy, int dim) {
    std::visit(Overloaded{
                   [&](const LinearGain& p) { require_shape(p.gain, dim, "LinearGain"); },
                   [&](const CancelPlusDither& p) {
                       require_shape(p.a_ref, dim, "CancelPlusDither");
                       if (!(p.dither_var >= 0.0) || !std::isfinite(p.dither_var)) {
                           throw std::invalid_argument("CancelPlusDither: dither_var must be >= 0");
                       }
                   },
                   [&](const ScaledCancel& p) {
                       require_shape(p.a_ref, dim, "ScaledCancel");
                       if (!std::isfinite(p.scale)) throw std::invalid_argument("ScaledCancel: scale must be finite");
                   },
               },
               policy);
}

Mat policy_feedback_matrix(const ControlPolicy& policy) {
    return std::visit(Overloaded{
                          [](const LinearGain& p) -> Mat { return p.gain; },
                          [](const CancelPlusDither& p) -> Mat { return p.a_ref; },
                          [](const ScaledCancel& p) -> Mat { return p.scale * p.a_ref; },
                      },
                      policy);
}

std::string describe(const ControlPolicy& policy) {
    return std::visit(Overloaded{
                          [](const LinearGain&) { return std::string("linear_gain"); },
                          [](const CancelPlusDither& p) {
                              std::ostringstream os;
                              os << "cancel_dither(var=" << p.dither_var << ")";
                              return os.str();
                          },
                          [](const ScaledCancel& p) {
                              std::ostringstream os;
                              os << "scaled_cancel(scale=" << p.scale << ")";
                              return os.str();
                          },
                      },
                      policy);
}

Vec step_plant(const Vec& x, const Vec& u, const Vec& w, const SystemModel& model) {
    require_dim(x, model.dim(), "step_plant: x");
    require_dim(u, model.dim(), "step_plant: u");
    require_dim(w, model.dim(), "step_plant: w");
    Vec next = model.a() * x;
    next += u;
    next += w;
    return next;
}

Vec draw_noise(RandomStream& rng, const SystemModel& model) {
    Vec w(model.dim());
    const double sd = std::sqrt(model.sigma2());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = sd * rng.gaussian();
    return w;
}

Vec apply_policy(const ControlPolicy& policy, const Vec& y, RandomStream& rng) {
    return std::visit(Overloaded{
                          [&](const LinearGain& p) -> Vec {
                              require_dim(y, static_cast<int>(p.gain.rows()), "apply_policy: y");
                              return -(p.gain * y);
                          },
                          [&](const CancelPlusDither& p) -> Vec {
                              require_dim(y, static_cast<int>(p.a_ref.rows()), "apply_policy: y");
                              Vec u = -(p.a_ref * y);
                              if (p.dither_var > 0.0) {
                                  const double sd = std::sqrt(p.dither_var);
                                  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += sd * rng.gaussian();
                              }
                              return u;
                          },
                          [&](const ScaledCancel& p) -> Vec {
                              require_dim(y, static_cast<int>(p.a_ref.rows()), "apply_policy: y");
                              return -p.scale * (p.a_ref * y);
                          },
                      },
                      policy);
}

Vec initial_state(const SimulationOptions& options, int dim) {
    if (options.x0) {
        require_dim(*options.x0, dim, "initial_state");
        return *options.x0;
    }
    return Vec::Ones(dim);
}

NominalTrajectory simulate_nominal(const SystemModel& model, const ControlPolicy& policy, int horizon,
                                   std::uint64_t trial_seed, const SimulationOptions& options) {
    if (horizon < 1) throw std::invalid_argument("simulate_nominal: horizon must be >= 1");
    validate_policy(policy, model.dim());

    const int dim = model.dim();
    auto streams = TrialStreams::from_seed(trial_seed);
    NominalTrajectory traj;
    traj.X = Series(dim);
    traj.U = Series(dim);
    traj.W = Series(dim);
    traj.X.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.U.reserve(static_cast<std::size_t>(horizon));
    traj.W.reserve(static_cast<std::size_t>(horizon));

    Vec x = initial_state(options, dim);
    traj.X.push_back(x);
    const Vec zero = Vec::Zero(dim);
    for (int k = 0; k < horizon; ++k) {
        const Vec u = k == 0 ? zero : apply_policy(policy, x, streams.dither);
        const Vec w = k == 0 ? zero : draw_noise(streams.plant, model);
        x = step_plant(x, u, w, model);
        traj.U.push_back(u);
        traj.W.push_back(w);
        traj.X.push_back(x);
        if (!(x.norm() <= options.overflow_guard)) {
            traj.diverged = true;
            traj.diverged_at = k + 1;
            break;
        }
    }
    return traj;
}

}  // namespace mitmlab
