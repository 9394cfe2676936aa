#include "mitmlab/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mitmlab/parallel.hpp"
#include "mitmlab/stats.hpp"

namespace mitmlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_len(const Vec& v, int dim, const char* what) {
    if (v.size() != dim) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

EstimatorState EstimatorState::empty(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("EstimatorState: unsupported dimension");
    EstimatorState est;
    est.gram = Mat::Zero(dim, dim);
    est.cross = Mat::Zero(dim, dim);
    est.estimate = Mat::Zero(dim, dim);
    return est;
}

Mat ls_estimate(const EstimatorState& est) {
    const auto dim = est.gram.rows();
    if (dim == 1) {
        const double g = est.gram(0, 0);
        Mat out(1, 1);
        out(0, 0) = g > 0.0 ? est.cross(0, 0) / g : 0.0;
        return out;
    }
    const double trace = est.gram.trace();
    if (!(trace > 0.0)) return Mat::Zero(dim, dim);
    Eigen::SelfAdjointEigenSolver<Mat> eig(est.gram, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-10 * trace)) return Mat::Zero(dim, dim);
    // Â G = C  <=>  G Âᵀ = Cᵀ (G symmetric)
    const Mat rhs = est.cross.transpose();
    const Mat sol = est.gram.ldlt().solve(rhs);
    return sol.transpose();
}

void ls_absorb(EstimatorState& est, const Vec& x_k, const Vec& x_next, const Vec& u_k) {
    const int dim = est.dim();
    require_len(x_k, dim, "ls_update: x_k");
    require_len(x_next, dim, "ls_update: x_next");
    require_len(u_k, dim, "ls_update: u_k");
    est.gram.noalias() += x_k * x_k.transpose();
    est.cross.noalias() += (x_next - u_k) * x_k.transpose();
    ++est.count;
    est.estimate = ls_estimate(est);
}

EstimatorState ls_update(EstimatorState est, const Vec& x_k, const Vec& x_next, const Vec& u_k) {
    ls_absorb(est, x_k, x_next, u_k);
    return est;
}

Vec fictitious_step(const Mat& a_hat, const Vec& v, const Vec& u, const Vec& w_tilde) {
    if (a_hat.rows() != a_hat.cols()) throw std::invalid_argument("fictitious_step: A_hat must be square");
    const int dim = static_cast<int>(a_hat.rows());
    require_len(v, dim, "fictitious_step: v");
    require_len(u, dim, "fictitious_step: u");
    require_len(w_tilde, dim, "fictitious_step: w_tilde");
    Vec next = a_hat * v;
    next += u;
    next += w_tilde;
    return next;
}

double estimation_error(const Mat& a_hat, const Mat& a) {
    if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols()) {
        throw std::invalid_argument("estimation_error: shape mismatch");
    }
    return operator_norm(a_hat - a);
}

AttackSession::AttackSession(const SystemModel& model, const ControlPolicy& policy, const AttackStrategy& strategy,
                             std::uint64_t trial_seed, const SimulationOptions& options)
    : model_(model),
      policy_(policy),
      strategy_(strategy),
      streams_(TrialStreams::from_seed(trial_seed)),
      guard_(options.overflow_guard) {
    const int dim = model_.dim();
    if (strategy_.exploration_length < 1) throw std::invalid_argument("AttackStrategy: L must be >= 1");
    validate_policy(policy_, dim);
    if (strategy_.pinned_estimate) {
        if (strategy_.mode != LearningMode::ExplorationOnly) {
            throw std::invalid_argument("AttackStrategy: pinned_estimate requires ExplorationOnly");
        }
        if (strategy_.pinned_estimate->rows() != dim || strategy_.pinned_estimate->cols() != dim) {
            throw std::invalid_argument("AttackStrategy: pinned_estimate shape mismatch");
        }
        require_finite(*strategy_.pinned_estimate, "AttackStrategy: pinned_estimate");
    }
    if (const auto* sf = std::get_if<StateFeedbackInput>(&strategy_.malicious)) {
        if (sf->gain.rows() != dim || sf->gain.cols() != dim) {
            throw std::invalid_argument("StateFeedbackInput: gain shape mismatch");
        }
    }
    x_ = initial_state(options, dim);
    v_ = x_;
    y_ = x_;
    y_prev_ = Vec::Zero(dim);
    u_ = ut_ = w_ = wt_ = Vec::Zero(dim);
    a_hat_ = a_hat_prev_ = a_hat_l_ = Mat::Zero(dim, dim);
    est_ = EstimatorState::empty(dim);
}

Vec AttackSession::malicious_input() const {
    return std::visit(Overloaded{
                          [&](const DestabilizingPush&) -> Vec { return a_hat_l_norm_ * x_; },
                          [&](const ZeroInput&) -> Vec { return Vec::Zero(x_.size()); },
                          [&](const StateFeedbackInput& s) -> Vec { return s.gain * x_; },
                      },
                      strategy_.malicious);
}

AttackSession::Status AttackSession::advance() {
    const int L = strategy_.exploration_length;
    const int dim = model_.dim();
    const int k = k_;
    const bool first = k == 0;

    Vec u = first ? Vec::Zero(dim) : apply_policy(policy_, y_, streams_.dither);
    Vec w = first ? Vec::Zero(dim) : draw_noise(streams_.plant, model_);
    const bool hijacked = k > L;
    Vec plant_input = hijacked ? malicious_input() : u;

    bool diverged = false;
    Vec x_next;
    if (destroyed_at_) {
        x_next = x_;
    } else {
        x_next = model_.a() * x_ + plant_input + w;
        if (!(x_next.norm() <= guard_)) {
            if (hijacked) {
                destroyed_at_ = k + 1;
            } else {
                diverged = true;
            }
        }
    }

    Vec v_next;
    Vec wt = Vec::Zero(dim);
    if (k >= L) {
        wt = draw_noise(streams_.attacker, model_);
        v_next = fictitious_step(a_hat_, v_, u, wt);
        if (!(v_next.norm() <= guard_)) diverged = true;
    } else {
        v_next = x_next;
    }

    Mat a_hat_next = a_hat_;
    if (k + 1 <= L) {
        if (k >= 1) ls_absorb(est_, x_, x_next, u);
        a_hat_next = est_.estimate;
        if (k + 1 == L) {
            if (strategy_.pinned_estimate) a_hat_next = *strategy_.pinned_estimate;
            a_hat_l_ = a_hat_next;
            a_hat_l_norm_ = operator_norm(a_hat_l_);
        }
    } else if (strategy_.mode == LearningMode::Continual && !destroyed_at_) {
        ls_absorb(est_, x_, x_next, plant_input);
        a_hat_next = est_.estimate;
    }

    y_prev_ = y_;
    a_hat_prev_ = a_hat_;
    u_ = u;
    ut_ = hijacked ? plant_input : Vec::Zero(dim);
    w_ = w;
    wt_ = wt;
    if (!destroyed_at_ || *destroyed_at_ != k + 1) x_ = x_next;
    v_ = v_next;
    y_ = k + 1 <= L ? x_next : v_next;
    a_hat_ = a_hat_next;
    k_ = k + 1;
    return diverged ? Status::Diverged : Status::Running;
}

AttackedTrajectory run_attack(const SystemModel& model, const ControlPolicy& policy, const AttackStrategy& strategy,
                              int horizon, std::uint64_t trial_seed, const SimulationOptions& options) {
    if (horizon <= strategy.exploration_length) throw std::invalid_argument("run_attack: horizon must exceed L");
    AttackSession session(model, policy, strategy, trial_seed, options);
    const int dim = model.dim();
    const auto n = static_cast<std::size_t>(horizon);

    AttackedTrajectory t;
    t.exploration_length = strategy.exploration_length;
    t.X = Series(dim), t.V = Series(dim), t.Y = Series(dim);
    t.U = Series(dim), t.Utilde = Series(dim), t.W = Series(dim), t.Wtilde = Series(dim);
    t.a_hat = MatrixSeries(dim);
    for (Series* s : {&t.X, &t.V, &t.Y}) s->reserve(n + 1);
    for (Series* s : {&t.U, &t.Utilde, &t.W, &t.Wtilde}) s->reserve(n);
    t.a_hat.reserve(n + 1);
    t.theta.reserve(n + 1);

    auto record_state = [&] {
        t.X.push_back(session.x());
        t.V.push_back(session.v());
        t.Y.push_back(session.y());
        t.a_hat.push_back(session.a_hat());
        t.theta.push_back(session.theta());
    };
    record_state();
    for (int k = 0; k < horizon; ++k) {
        const auto status = session.advance();
        t.U.push_back(session.u_prev());
        t.Utilde.push_back(session.utilde_prev());
        t.W.push_back(session.w_prev());
        t.Wtilde.push_back(session.wtilde_prev());
        record_state();
        if (status == AttackSession::Status::Diverged) {
            t.diverged = true;
            t.diverged_at = k + 1;
            break;
        }
    }
    t.plant_destroyed_at = session.plant_destroyed_at();
    return t;
}

double scalar_ls_tail_bound(int k, double eta) {
    if (k < 0 || !(eta >= 0.0)) throw std::invalid_argument("scalar_ls_tail_bound: need k >= 0 and eta >= 0");
    return 2.0 * std::pow(1.0 + eta * eta, -0.5 * static_cast<double>(k));
}

namespace {

struct TailAccumulator {
    std::vector<std::int64_t> exceed;
    std::int64_t trials = 0;
    std::int64_t diverged = 0;

    void merge(const TailAccumulator& o) {
        for (std::size_t i = 0; i < exceed.size(); ++i) exceed[i] += o.exceed[i];
        trials += o.trials;
        diverged += o.diverged;
    }
};

}  // namespace

TailTable empirical_tail(const SystemModel& model, const ControlPolicy& policy, const std::vector<int>& k_grid,
                         const std::vector<double>& eta_grid, std::int64_t trials, std::uint64_t seed, int workers,
                         const SimulationOptions& options) {
    if (trials < 1) throw std::invalid_argument("empirical_tail: trials must be >= 1");
    if (k_grid.empty() || eta_grid.empty()) throw std::invalid_argument("empirical_tail: empty grid");
    for (int k : k_grid) {
        if (k < 1) throw std::invalid_argument("empirical_tail: k must be >= 1");
    }
    for (double eta : eta_grid) {
        if (!(eta > 0.0)) throw std::invalid_argument("empirical_tail: eta must be > 0");
    }
    validate_policy(policy, model.dim());

    const int dim = model.dim();
    const int k_max = *std::max_element(k_grid.begin(), k_grid.end());
    const std::size_t n_eta = eta_grid.size();
    const std::size_t n_cells = k_grid.size() * n_eta;

    auto acc = blocked_reduce<TailAccumulator>(
        trials, workers, [&] { return TailAccumulator{std::vector<std::int64_t>(n_cells, 0)}; },
        [&](std::int64_t i, TailAccumulator& out) {
            auto streams = TrialStreams::from_seed(derive_trial_seed(seed, "tail", static_cast<std::uint64_t>(i)));
            EstimatorState est = EstimatorState::empty(dim);
            std::vector<double> error_at(static_cast<std::size_t>(k_max) + 1, 0.0);
            Vec x = model.a() * initial_state(options, dim);  // X_1; U_0 = W_0 = 0
            error_at[1] = estimation_error(est.estimate, model.a());
            for (int k = 1; k < k_max; ++k) {
                const Vec u = apply_policy(policy, x, streams.dither);
                const Vec w = draw_noise(streams.plant, model);
                const Vec x_next = model.a() * x + u + w;
                if (!(x_next.norm() <= options.overflow_guard)) {
                    ++out.diverged;
                    return;
                }
                ls_absorb(est, x, x_next, u);
                error_at[static_cast<std::size_t>(k) + 1] = estimation_error(est.estimate, model.a());
                x = x_next;
            }
            ++out.trials;
            for (std::size_t a = 0; a < k_grid.size(); ++a) {
                const double err = error_at[static_cast<std::size_t>(k_grid[a])];
                for (std::size_t b = 0; b < n_eta; ++b) {
                    if (err > eta_grid[b]) ++out.exceed[a * n_eta + b];
                }
            }
        });

    TailTable table;
    table.diverged = acc.diverged;
    for (std::size_t a = 0; a < k_grid.size(); ++a) {
        for (std::size_t b = 0; b < n_eta; ++b) {
            TailCell cell;
            cell.k = k_grid[a];
            cell.eta = eta_grid[b];
            cell.exceed = acc.exceed[a * n_eta + b];
            cell.trials = acc.trials;
            cell.p_hat = acc.trials > 0 ? static_cast<double>(cell.exceed) / static_cast<double>(acc.trials) : 0.0;
            const Interval ci = wilson_interval(cell.exceed, acc.trials);
            cell.ci_lo = ci.lo;
            cell.ci_hi = ci.hi;
            cell.wilson_half_width = ci.half_width();
            cell.scalar_bound = scalar_ls_tail_bound(cell.k, cell.eta);
            table.fitted_c1 = std::max(table.fitted_c1, cell.p_hat * std::exp(cell.eta * cell.eta * cell.k));
            table.cells.push_back(cell);
        }
    }
    return table;
}

}  // namespace mitmlab
