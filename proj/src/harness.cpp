#include "mitmlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mitmlab/config.hpp"

namespace mitmlab {
namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string cell_name(std::initializer_list<std::pair<const char*, std::string>> parts) {
    std::string out;
    for (const auto& [key, value] : parts) {
        if (!out.empty()) out += '/';
        out += key;
        out += '=';
        out += value;
    }
    return out;
}

void fill_rate(CellResult& cell, const RateCounts& counts, std::int64_t hits) {
    cell.successes = counts.successes;
    cell.failures = counts.failures;
    cell.censored = counts.censored;
    cell.diverged = counts.diverged;
    cell.trials = counts.total();
    const std::int64_t n = counts.valid();
    if (n > 0) {
        cell.rate = static_cast<double>(hits) / static_cast<double>(n);
        const Interval ci = wilson_interval(hits, n);
        cell.ci_lo = ci.lo;
        cell.ci_hi = ci.hi;
    }
    cell.censored_frac = n > 0 ? static_cast<double>(counts.censored) / static_cast<double>(n) : 0.0;
}

void warn_divergence(ExperimentResult& result) {
    for (const auto& cell : result.cells) {
        if (cell.trials > 0 && cell.diverged * 100 > cell.trials) {
            result.warnings.push_back("cell " + cell.cell + ": " + std::to_string(cell.diverged) + " of " +
                                      std::to_string(cell.trials) + " trials diverged");
        }
    }
}

int max_of(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

/// Closed loop without an attacker, optionally running the attacker's LS
/// learner over the first L steps so a genie SPRT has its Â_L.
class NominalLoop {
public:
    NominalLoop(const SystemModel& model, const ControlPolicy& policy, std::uint64_t seed,
                const SimulationOptions& options)
        : model_(model), policy_(policy), streams_(TrialStreams::from_seed(seed)), guard_(options.overflow_guard) {
        x_ = initial_state(options, model.dim());
        x_prev_ = x_;
        u_ = Vec::Zero(model.dim());
    }

    /// Advances k -> k+1; false once the state overflows.
    bool advance() {
        const int dim = model_.dim();
        const bool first = k_ == 0;
        u_ = first ? Vec::Zero(dim) : apply_policy(policy_, x_, streams_.dither);
        const Vec w = first ? Vec::Zero(dim) : draw_noise(streams_.plant, model_);
        x_prev_ = x_;
        x_ = model_.a() * x_prev_ + u_ + w;
        ++k_;
        return x_.norm() <= guard_;
    }

    int k() const noexcept { return k_; }
    const Vec& x() const noexcept { return x_; }
    const Vec& x_prev() const noexcept { return x_prev_; }
    const Vec& u_prev() const noexcept { return u_; }

private:
    const SystemModel& model_;
    const ControlPolicy& policy_;
    TrialStreams streams_;
    double guard_;
    int k_ = 0;
    Vec x_, x_prev_, u_;
};

struct RateTable {
    std::vector<RateCounts> cells;
    void merge(const RateTable& o) {
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i].merge(o.cells[i]);
    }
};

/// Per-ε SPRT tallies shared across one trajectory.
struct SprtTable {
    std::vector<RateCounts> counts;
    std::vector<std::int64_t> censored_alarm;  ///< censored with S > 0
    std::vector<DeceptionTimeAccumulator> times;

    explicit SprtTable(std::size_t n = 0) : counts(n), censored_alarm(n, 0), times(n) {}
    void merge(const SprtTable& o) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i].merge(o.counts[i]);
            censored_alarm[i] += o.censored_alarm[i];
            times[i].merge(o.times[i]);
        }
    }
};

void tally_sprt(SprtTable& table, std::size_t e, const DecisionRecord& rec, int exploration_length, bool attacked) {
    if (rec.censored) {
        ++table.counts[e].censored;
        if (rec.theta_hat == 1) ++table.censored_alarm[e];
    } else if (rec.theta_hat == 0) {
        ++table.counts[e].successes;
    } else {
        ++table.counts[e].failures;
    }
    if (attacked) table.times[e].add(rec, exploration_length);
}

/// Genie SPRTs at every ε on attacked trials. The reference estimate is the
/// pinned Â when configured, else the trial's own Â_L.
SprtTable attacked_sprt(const ExperimentConfig& config, const std::string& cell_id, int L, double dither,
                        const std::vector<double>& eps, std::int64_t trials,
                        const std::optional<Mat>& reference = std::nullopt) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, dither);
    AttackStrategy strategy = make_strategy(config, L);
    if (reference) strategy.pinned_estimate = reference;
    const SimulationOptions options = make_options(config);
    const int max_h = config.max_horizon;
    if (max_h <= L) throw std::invalid_argument("max_horizon must exceed L");

    return reduce_trials<SprtTable>(
        config, trials, [&] { return SprtTable(eps.size()); },
        [&](std::int64_t i, SprtTable& out) {
            AttackSession s(model, policy, strategy, trial_seed(config, cell_id, i), options);
            while (s.k() < L) {
                if (s.advance() == AttackSession::Status::Diverged) {
                    for (auto& c : out.counts) ++c.diverged;
                    return;
                }
            }
            std::vector<SprtAccumulator> acc;
            acc.reserve(eps.size());
            for (double e : eps) acc.emplace_back(model.a(), s.exploration_estimate(), model.sigma2(), e, 0, false);
            std::size_t open = eps.size();
            while (open > 0 && s.k() < max_h) {
                if (s.advance() == AttackSession::Status::Diverged) {
                    for (auto& c : out.counts) ++c.diverged;
                    return;
                }
                open = 0;
                for (auto& a : acc) {
                    if (!a.observe(s.y(), s.y_prev(), s.u_prev())) ++open;
                }
            }
            for (std::size_t e = 0; e < eps.size(); ++e) {
                DecisionRecord rec = acc[e].record();
                rec.tau += L;
                tally_sprt(out, e, rec, L, true);
            }
        });
}

/// Genie SPRTs at every ε on nominal trials (same onset and reference rule).
SprtTable nominal_sprt(const ExperimentConfig& config, const std::string& cell_id, int L, double dither,
                       const std::vector<double>& eps, std::int64_t trials,
                       const std::optional<Mat>& reference = std::nullopt) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, dither);
    const SimulationOptions options = make_options(config);
    const std::optional<Mat> pinned = reference ? reference : config.pinned_estimate;
    const int max_h = config.max_horizon;

    return reduce_trials<SprtTable>(
        config, trials, [&] { return SprtTable(eps.size()); },
        [&](std::int64_t i, SprtTable& out) {
            NominalLoop loop(model, policy, trial_seed(config, cell_id, i), options);
            EstimatorState est = EstimatorState::empty(model.dim());
            while (loop.k() < L) {
                if (!loop.advance()) {
                    for (auto& c : out.counts) ++c.diverged;
                    return;
                }
                if (loop.k() >= 2) ls_absorb(est, loop.x_prev(), loop.x(), loop.u_prev());
            }
            const Mat a_hat = pinned ? *pinned : est.estimate;
            std::vector<SprtAccumulator> acc;
            acc.reserve(eps.size());
            for (double e : eps) acc.emplace_back(model.a(), a_hat, model.sigma2(), e, 0, false);
            std::size_t open = eps.size();
            while (open > 0 && loop.k() < max_h) {
                if (!loop.advance()) {
                    for (auto& c : out.counts) ++c.diverged;
                    return;
                }
                open = 0;
                for (auto& a : acc) {
                    if (!a.observe(loop.x(), loop.x_prev(), loop.u_prev())) ++open;
                }
            }
            for (std::size_t e = 0; e < eps.size(); ++e) {
                DecisionRecord rec = acc[e].record();
                rec.tau += L;
                tally_sprt(out, e, rec, L, false);
            }
        });
}

struct CurveAccumulator {
    DeceptionCostAccumulator cost;
    KlAccumulator kl;
    MeanAccumulator err_sq;
    PathAccumulator energy;
    MeanAccumulator delay;
    std::int64_t delay_censored = 0;
    std::int64_t diverged = 0;

    void merge(const CurveAccumulator& o) {
        cost.merge(o.cost);
        kl.merge(o.kl);
        err_sq.merge(o.err_sq);
        energy.merge(o.energy);
        delay.merge(o.delay);
        delay_censored += o.delay_censored;
        diverged += o.diverged;
    }
};

CurveAccumulator run_curve(const ExperimentConfig& config, const std::string& cell_id, int L, double dither,
                           int n_max, std::int64_t trials, bool track_delay) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, dither);
    const AttackStrategy strategy = make_strategy(config, L);
    const SimulationOptions options = make_options(config);
    const int kl_n = L + config.kl_offset;
    const auto len = static_cast<std::size_t>(n_max - L);
    if (track_delay && model.dim() != 1) throw std::invalid_argument("variance delay needs a scalar system");

    return reduce_trials<CurveAccumulator>(
        config, trials,
        [&] {
            return CurveAccumulator{DeceptionCostAccumulator(L, n_max), {}, {}, PathAccumulator(len), {}, 0, 0};
        },
        [&](std::int64_t i, CurveAccumulator& out) {
            AttackSession s(model, policy, strategy, trial_seed(config, cell_id, i), options);
            std::vector<double> cost_path(len), tilde_path(len), energy_path(len);
            double cost = 0.0, tilde = 0.0, energy = 0.0, llr = 0.0, kl_cost = 0.0;
            std::optional<VarianceMonitor> monitor;
            if (track_delay) monitor.emplace(model.a()(0, 0), model.sigma2(), config.gamma);
            std::optional<int> alarm_at;
            Vec v_prev = s.v();
            while (s.k() < n_max) {
                v_prev = s.v();
                if (s.advance() == AttackSession::Status::Diverged) {
                    ++out.diverged;
                    return;
                }
                const int k = s.k();
                if (monitor) {
                    monitor->observe(s.y()(0), s.y_prev()(0), s.u_prev()(0));
                    const int tau = monitor->tau();
                    if (!alarm_at && tau >= L + 1 && monitor->theta_hat() == 1) alarm_at = tau;
                }
                if (k == L) out.err_sq.add(std::pow(estimation_error(s.a_hat(), model.a()), 2));
                if (k >= L) energy += s.u_prev().squaredNorm();
                if (k >= L && k + 1 <= n_max) energy_path[static_cast<std::size_t>(k - L)] = energy;
                if (k >= L + 1) {
                    const CostTerms t = deception_cost_terms(s.a_hat_prev(), v_prev, model.a(), model.sigma2());
                    cost += t.cost;
                    tilde += t.tilde;
                    cost_path[static_cast<std::size_t>(k - L - 1)] = cost;
                    tilde_path[static_cast<std::size_t>(k - L - 1)] = tilde;
                    if (k <= kl_n) {
                        llr += sprt_increment(s.y(), s.y_prev(), s.u_prev(), model.a(), s.a_hat_prev(),
                                              model.sigma2());
                        kl_cost += t.cost;
                    }
                }
            }
            out.cost.add(cost_path, tilde_path);
            out.energy.add(energy_path);
            if (kl_n <= n_max) out.kl.add(llr, kl_cost);
            if (monitor) {
                if (alarm_at) {
                    out.delay.add(static_cast<double>(*alarm_at - (L + 1)));
                } else {
                    ++out.delay_censored;
                }
            }
        });
}

nlohmann::json curve_json(const DeceptionCostCurve& curve) {
    nlohmann::json j;
    std::vector<int> n;
    for (int i = curve.n_first(); i <= curve.n_max(); ++i) n.push_back(i);
    j["n"] = n;
    j["C_hat"] = curve.c_hat;
    j["C_hat_se"] = curve.c_hat_se;
    j["C_tilde"] = curve.c_tilde;
    j["C_tilde_se"] = curve.c_tilde_se;
    j["trials"] = curve.trials;
    return j;
}

nlohmann::json kl_json(const KlIdentityReport& kl) {
    return {{"n", kl.n},           {"lhs", kl.lhs}, {"lhs_se", kl.lhs_se},         {"rhs", kl.rhs},
            {"rhs_se", kl.rhs_se}, {"z", kl.z},     {"z_paired", kl.z_paired}, {"trials", kl.trials}};
}

Mat shifted_estimate(const Mat& a, double q) { return a + q * Mat::Identity(a.rows(), a.cols()); }

/// Smallest curve horizon (doubling up to max_horizon) with a finite n₀ for ε.
CurveEnsemble curve_with_finite_n0(const ExperimentConfig& config, const std::string& cell_id, int L,
                                   double dither, int n_max, double epsilon, std::int64_t trials) {
    CurveEnsemble ens = estimate_curve(config, cell_id, L, dither, n_max, trials);
    while (compute_n0(ens.curve, epsilon).status == N0Status::UnboundedWithinHorizon &&
           2 * n_max <= config.max_horizon) {
        n_max *= 2;
        ens = estimate_curve(config, cell_id, L, dither, n_max, trials);
    }
    return ens;
}

}  // namespace

ControlPolicy make_policy(const ExperimentConfig& config, double dither_var) {
    ControlPolicy policy;
    if (config.policy == "cancel_dither") {
        policy = CancelPlusDither{config.a, dither_var};
    } else if (config.policy == "scaled_cancel") {
        policy = ScaledCancel{config.a, config.policy_scale};
    } else if (config.policy == "linear_gain") {
        if (!config.policy_gain) throw std::invalid_argument("policy_gain is required for linear_gain");
        policy = LinearGain{*config.policy_gain};
    } else {
        throw std::invalid_argument("policy: unknown policy '" + config.policy + "'");
    }
    validate_policy(policy, config.dim());
    return policy;
}

AttackStrategy make_strategy(const ExperimentConfig& config, int exploration_length) {
    AttackStrategy s;
    s.exploration_length = exploration_length;
    if (config.learning_mode == "exploration_only") {
        s.mode = LearningMode::ExplorationOnly;
    } else if (config.learning_mode == "continual") {
        s.mode = LearningMode::Continual;
    } else {
        throw std::invalid_argument("learning_mode: unknown mode '" + config.learning_mode + "'");
    }
    if (config.malicious_input == "destabilizing_push") {
        s.malicious = DestabilizingPush{};
    } else if (config.malicious_input == "zero") {
        s.malicious = ZeroInput{};
    } else {
        throw std::invalid_argument("malicious_input: unknown rule '" + config.malicious_input + "'");
    }
    s.pinned_estimate = config.pinned_estimate;
    return s;
}

SimulationOptions make_options(const ExperimentConfig& config) {
    SimulationOptions o;
    o.x0 = config.x0;
    o.overflow_guard = config.overflow_guard;
    return o;
}

Mat noise_covariance(const ExperimentConfig& config) {
    if (config.Sigma) return *config.Sigma;
    return config.sigma2 * Mat::Identity(config.dim(), config.dim());
}

const CellResult* ExperimentResult::find(const std::string& cell) const {
    for (const auto& c : cells) {
        if (c.cell == cell) return &c;
    }
    return nullptr;
}

std::uint64_t trial_seed(const ExperimentConfig& config, const std::string& cell_id, std::int64_t trial) {
    return derive_trial_seed(config.master_seed, cell_id, static_cast<std::uint64_t>(trial));
}

std::vector<AttackedTrajectory> run_trials(const ExperimentConfig& config, const std::string& cell_id,
                                           int exploration_length, double dither_var, int horizon) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, dither_var);
    const AttackStrategy strategy = make_strategy(config, exploration_length);
    const SimulationOptions options = make_options(config);
    return parallel_map(config.trials, config.workers, [&](std::int64_t i) {
        return run_attack(model, policy, strategy, horizon, trial_seed(config, cell_id, i), options);
    });
}

CurveEnsemble estimate_curve(const ExperimentConfig& config, const std::string& cell_id, int exploration_length,
                             double dither_var, int n_max, std::int64_t trials) {
    CurveAccumulator acc = run_curve(config, cell_id, exploration_length, dither_var, n_max, trials, false);
    if (acc.cost.trials() == 0) throw std::runtime_error("cell " + cell_id + ": every trial diverged");
    CurveEnsemble out;
    out.curve = acc.cost.curve();
    out.kl = acc.kl.report(exploration_length + config.kl_offset);
    out.exploration_error_sq = acc.err_sq;
    out.energy = acc.energy;
    out.diverged = acc.diverged;
    return out;
}

double exploration_error_quantile(const ExperimentConfig& config, int exploration_length, double dither_var,
                                  double q, std::int64_t trials) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, dither_var);
    AttackStrategy strategy = make_strategy(config, exploration_length);
    strategy.pinned_estimate.reset();
    const SimulationOptions options = make_options(config);
    const std::string cell = cell_name({{"explore", std::to_string(exploration_length)}, {"dither", fmt(dither_var)}});
    auto errors = parallel_map(trials, config.workers, [&](std::int64_t i) {
        AttackSession s(model, policy, strategy, trial_seed(config, cell, i), options);
        while (s.k() < exploration_length) {
            if (s.advance() == AttackSession::Status::Diverged) return std::numeric_limits<double>::quiet_NaN();
        }
        return estimation_error(s.exploration_estimate(), model.a());
    });
    std::erase_if(errors, [](double e) { return std::isnan(e); });
    if (errors.empty()) throw std::runtime_error("exploration_error_quantile: every trial diverged");
    return quantile(std::move(errors), q);
}

ExperimentResult experiment_success_vs_L(const ExperimentConfig& config) {
    if (config.dim() != 1) throw std::invalid_argument("success_vs_L requires a scalar system");
    const SystemModel model(config.a, config.sigma2);
    const SimulationOptions options = make_options(config);
    const auto& taus = config.tau_grid;
    const int steps = max_of(taus) + 1;
    const double a = model.a()(0, 0);

    ExperimentResult result;
    result.experiment = "success_vs_L";
    for (double d : config.dither_grid) {
        const ControlPolicy policy = make_policy(config, d);

        const std::string nominal_id = cell_name({{"nominal", "1"}, {"dither", fmt(d)}});
        const RateTable fa = reduce_trials<RateTable>(
            config, config.trials, [&] { return RateTable{std::vector<RateCounts>(taus.size())}; },
            [&](std::int64_t i, RateTable& out) {
                NominalLoop loop(model, policy, trial_seed(config, nominal_id, i), options);
                VarianceMonitor mon(a, model.sigma2(), config.gamma);
                std::vector<int> verdict(taus.size(), -1);
                while (loop.k() < steps) {
                    if (!loop.advance()) {
                        for (auto& c : out.cells) ++c.diverged;
                        return;
                    }
                    mon.observe(loop.x()(0), loop.x_prev()(0), loop.u_prev()(0));
                    for (std::size_t t = 0; t < taus.size(); ++t) {
                        if (mon.tau() == taus[t]) verdict[t] = mon.theta_hat();
                    }
                }
                for (std::size_t t = 0; t < taus.size(); ++t) {
                    if (verdict[t] == 1) {
                        ++out.cells[t].successes;
                    } else {
                        ++out.cells[t].failures;
                    }
                }
            });
        for (std::size_t t = 0; t < taus.size(); ++t) {
            CellResult cell;
            cell.cell = cell_name({{"nominal", "1"}, {"dither", fmt(d)}, {"tau", std::to_string(taus[t])}});
            cell.kind = "false_alarm";
            cell.dither_var = d;
            cell.tau = taus[t];
            fill_rate(cell, fa.cells[t], fa.cells[t].successes);
            result.cells.push_back(std::move(cell));
        }

        for (int L : config.L_grid) {
            const AttackStrategy strategy = make_strategy(config, L);
            const std::string id = cell_name({{"L", std::to_string(L)}, {"dither", fmt(d)}});
            const RateTable table = reduce_trials<RateTable>(
                config, config.trials, [&] { return RateTable{std::vector<RateCounts>(taus.size())}; },
                [&](std::int64_t i, RateTable& out) {
                    AttackSession s(model, policy, strategy, trial_seed(config, id, i), options);
                    VarianceMonitor mon(a, model.sigma2(), config.gamma);
                    std::vector<int> verdict(taus.size(), -1);
                    while (s.k() < steps) {
                        if (s.advance() == AttackSession::Status::Diverged) {
                            for (auto& c : out.cells) ++c.diverged;
                            return;
                        }
                        mon.observe(s.y()(0), s.y_prev()(0), s.u_prev()(0));
                        for (std::size_t t = 0; t < taus.size(); ++t) {
                            if (mon.tau() == taus[t]) verdict[t] = mon.theta_hat();
                        }
                    }
                    for (std::size_t t = 0; t < taus.size(); ++t) {
                        if (verdict[t] == 0) {
                            ++out.cells[t].successes;
                        } else {
                            ++out.cells[t].failures;
                        }
                    }
                });
            for (std::size_t t = 0; t < taus.size(); ++t) {
                CellResult cell;
                cell.cell = cell_name({{"L", std::to_string(L)}, {"dither", fmt(d)}, {"tau", std::to_string(taus[t])}});
                cell.kind = "attack_success";
                cell.L = L;
                cell.dither_var = d;
                cell.tau = taus[t];
                fill_rate(cell, table.cells[t], table.cells[t].successes);
                result.cells.push_back(std::move(cell));
            }
        }
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_success_vs_window(const ExperimentConfig& config) {
    const SystemModel model(config.a, config.sigma2);
    const SimulationOptions options = make_options(config);
    const ControlPolicy policy = make_policy(config, config.dither_grid.front());
    const Mat sigma = noise_covariance(config);
    const auto& taus = config.tau_grid;
    const int steps = max_of(taus) + 1;

    auto evaluate = [&](CovarianceMonitor& mon, std::vector<int>& verdict) {
        for (std::size_t t = 0; t < taus.size(); ++t) {
            if (mon.tau() == taus[t]) verdict[t] = mon.theta_hat();
        }
    };

    ExperimentResult result;
    result.experiment = "success_vs_window";
    const std::string nominal_id = "nominal";
    const RateTable fa = reduce_trials<RateTable>(
        config, config.trials, [&] { return RateTable{std::vector<RateCounts>(taus.size())}; },
        [&](std::int64_t i, RateTable& out) {
            NominalLoop loop(model, policy, trial_seed(config, nominal_id, i), options);
            CovarianceMonitor mon(model.a(), sigma, config.gamma);
            std::vector<int> verdict(taus.size(), -1);
            while (loop.k() < steps) {
                if (!loop.advance()) {
                    for (auto& c : out.cells) ++c.diverged;
                    return;
                }
                mon.observe(loop.x(), loop.x_prev(), loop.u_prev());
                evaluate(mon, verdict);
            }
            for (std::size_t t = 0; t < taus.size(); ++t) {
                if (verdict[t] == 1) {
                    ++out.cells[t].successes;
                } else {
                    ++out.cells[t].failures;
                }
            }
        });
    for (std::size_t t = 0; t < taus.size(); ++t) {
        CellResult cell;
        cell.cell = cell_name({{"nominal", "1"}, {"tau", std::to_string(taus[t])}});
        cell.kind = "false_alarm";
        cell.tau = taus[t];
        fill_rate(cell, fa.cells[t], fa.cells[t].successes);
        result.cells.push_back(std::move(cell));
    }

    for (int L : config.L_grid) {
        const AttackStrategy strategy = make_strategy(config, L);
        const std::string id = cell_name({{"L", std::to_string(L)}});
        const RateTable table = reduce_trials<RateTable>(
            config, config.trials, [&] { return RateTable{std::vector<RateCounts>(taus.size())}; },
            [&](std::int64_t i, RateTable& out) {
                AttackSession s(model, policy, strategy, trial_seed(config, id, i), options);
                CovarianceMonitor mon(model.a(), sigma, config.gamma);
                std::vector<int> verdict(taus.size(), -1);
                while (s.k() < steps) {
                    if (s.advance() == AttackSession::Status::Diverged) {
                        for (auto& c : out.cells) ++c.diverged;
                        return;
                    }
                    mon.observe(s.y(), s.y_prev(), s.u_prev());
                    evaluate(mon, verdict);
                }
                for (std::size_t t = 0; t < taus.size(); ++t) {
                    if (verdict[t] == 0) {
                        ++out.cells[t].successes;
                    } else {
                        ++out.cells[t].failures;
                    }
                }
            });
        for (std::size_t t = 0; t < taus.size(); ++t) {
            CellResult cell;
            cell.cell = cell_name({{"L", std::to_string(L)}, {"tau", std::to_string(taus[t])}});
            cell.kind = "attack_success";
            cell.L = L;
            cell.tau = taus[t];
            fill_rate(cell, table.cells[t], table.cells[t].successes);
            result.cells.push_back(std::move(cell));
        }
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_bound_suite(const ExperimentConfig& config) {
    if (config.dim() != 1) throw std::invalid_argument("bound_suite requires a scalar system");
    const int L = config.L_grid.front();
    const double d = config.dither_grid.front();
    const auto& eps = config.epsilon_grid;
    const double eps_min = min_of(eps);

    ExperimentResult result;
    result.experiment = "bound_suite";

    const std::string curve_id = cell_name({{"curve", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
    const int n_start = config.horizon > 0 ? config.horizon : std::max(2000, L + config.kl_offset + 1);
    const CurveEnsemble ens = curve_with_finite_n0(config, curve_id, L, d, n_start, eps_min, config.curve_trials);

    CellResult curve_cell;
    curve_cell.cell = curve_id;
    curve_cell.kind = "curve";
    curve_cell.L = L;
    curve_cell.dither_var = d;
    curve_cell.diverged = ens.diverged;
    curve_cell.trials = ens.curve.trials + ens.diverged;
    curve_cell.successes = ens.curve.trials;
    curve_cell.extras["curve"] = curve_json(ens.curve);
    curve_cell.extras["rms_exploration_error"] = std::sqrt(ens.exploration_error_sq.mean());
    result.cells.push_back(curve_cell);

    CellResult kl_cell;
    kl_cell.cell = cell_name({{"kl", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
    kl_cell.kind = "kl_identity";
    kl_cell.L = L;
    kl_cell.dither_var = d;
    kl_cell.trials = curve_cell.trials;
    kl_cell.diverged = ens.diverged;
    kl_cell.successes = ens.kl.trials;
    kl_cell.extras = kl_json(ens.kl);
    result.cells.push_back(kl_cell);

    const std::string attack_id = cell_name({{"sprt_attack", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
    const std::string nominal_id = cell_name({{"sprt_nominal", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
    const SprtTable attack = attacked_sprt(config, attack_id, L, d, eps, config.sprt_trials);
    const SprtTable nominal = nominal_sprt(config, nominal_id, L, d, eps, config.sprt_trials);

    for (std::size_t e = 0; e < eps.size(); ++e) {
        const BoundReport bounds = make_bound_report(ens.curve, eps[e]);
        const DeceptionTimeEstimate t = attack.times[e].estimate();
        CellResult cell;
        cell.cell = cell_name({{"sprt_attack", "1"}, {"epsilon", fmt(eps[e])}});
        cell.kind = "sprt_attack";
        cell.L = L;
        cell.dither_var = d;
        cell.epsilon = eps[e];
        const RateCounts& c = attack.counts[e];
        // P_dec: decided "no attack", plus censored runs whose S leans that way
        fill_rate(cell, c, c.successes + (c.censored - attack.censored_alarm[e]));
        cell.T_hat = t.mean;
        cell.n0 = bounds.n0.n0 > 0 ? std::optional<int>(bounds.n0.n0) : std::nullopt;
        cell.C_hat_at_n0 = bounds.c_hat_n0;
        cell.thm1_lower = bounds.thm1_lower;
        cell.thm2_upper = bounds.thm2_upper;
        cell.extras["n0_status"] = to_string(bounds.n0.status);
        cell.extras["T_hat_se"] = t.se;
        if (t.mean) {
            cell.extras["T_hat_ci_lo"] = t.ci.lo;
            cell.extras["T_hat_ci_hi"] = t.ci.hi;
        }
        if (t.mean && bounds.thm1_lower && bounds.thm2_upper) {
            const double lo = *bounds.thm1_lower;
            const double hi = *bounds.thm2_upper;
            cell.extras["ratio_to_lower"] = *t.mean / lo;
            cell.extras["ratio_to_lower_ci_lo"] = t.ci.lo / lo;
            cell.extras["ratio_to_lower_ci_hi"] = t.ci.hi / lo;
            cell.extras["ratio_to_upper"] = *t.mean / hi;
            cell.extras["within_corridor"] = *t.mean >= 0.5 * lo && *t.mean <= 2.0 * hi;
        }
        if (config.tail_c && config.tail_alpha && bounds.n0.finite()) {
            for (double D : config.D_grid) {
                cell.extras["thm3_L_lower_D" + fmt(D)] = exploration_lower_bound(
                    D, *bounds.c_tilde_n0, eps[e], *config.tail_c, *config.tail_alpha, config.delta);
            }
        }
        result.cells.push_back(std::move(cell));

        CellResult fa;
        fa.cell = cell_name({{"sprt_nominal", "1"}, {"epsilon", fmt(eps[e])}});
        fa.kind = "sprt_false_alarm";
        fa.L = L;
        fa.dither_var = d;
        fa.epsilon = eps[e];
        const RateCounts& f = nominal.counts[e];
        fill_rate(fa, f, f.failures + nominal.censored_alarm[e]);
        result.cells.push_back(std::move(fa));
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_kl_identity(const ExperimentConfig& config) {
    ExperimentResult result;
    result.experiment = "kl_identity";
    for (double d : config.dither_grid) {
        for (int L : config.L_grid) {
            const std::string id = cell_name({{"kl", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
            const int n = L + config.kl_offset;
            const CurveEnsemble ens = estimate_curve(config, id, L, d, std::max(n, L + 1), config.trials);
            CellResult cell;
            cell.cell = id;
            cell.kind = "kl_identity";
            cell.L = L;
            cell.dither_var = d;
            cell.diverged = ens.diverged;
            cell.successes = ens.curve.trials;
            cell.trials = ens.curve.trials + ens.diverged;
            cell.extras = kl_json(ens.kl);
            if (ens.curve.contains(n)) cell.C_hat_at_n0 = ens.curve.c_at(n);
            result.cells.push_back(std::move(cell));
        }
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_ls_tail(const ExperimentConfig& config) {
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, config.dither_grid.front());
    const TailTable table = empirical_tail(model, policy, config.k_grid, config.eta_grid, config.trials,
                                           config.master_seed, config.workers, make_options(config));
    ExperimentResult result;
    result.experiment = "ls_tail";
    for (const TailCell& t : table.cells) {
        CellResult cell;
        cell.cell = cell_name({{"k", std::to_string(t.k)}, {"eta", fmt(t.eta)}});
        cell.kind = "ls_tail";
        cell.successes = t.exceed;
        cell.failures = t.trials - t.exceed;
        cell.diverged = table.diverged;
        cell.trials = t.trials + table.diverged;
        cell.rate = t.p_hat;
        cell.ci_lo = t.ci_lo;
        cell.ci_hi = t.ci_hi;
        cell.censored_frac = 0.0;
        cell.extras["k"] = t.k;
        cell.extras["eta"] = t.eta;
        cell.extras["wilson_half_width"] = t.wilson_half_width;
        if (config.dim() == 1) {
            cell.extras["scalar_bound"] = t.scalar_bound;
            cell.extras["within_bound"] = t.p_hat <= t.scalar_bound + 3.0 * t.wilson_half_width;
        }
        cell.extras["fitted_c1"] = table.fitted_c1;
        result.cells.push_back(std::move(cell));
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_chebyshev(const ExperimentConfig& config) {
    if (config.dim() != 1) throw std::invalid_argument("chebyshev requires a scalar system");
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, config.dither_grid.front());
    const SimulationOptions options = make_options(config);
    const std::vector<double> gammas = config.gamma_grid.empty() ? std::vector<double>{config.gamma} : config.gamma_grid;
    const auto& taus = config.tau_grid;
    const int steps = max_of(taus) + 1;
    const double a = model.a()(0, 0);
    const double s2 = model.sigma2();

    const RateTable table = reduce_trials<RateTable>(
        config, config.trials, [&] { return RateTable{std::vector<RateCounts>(gammas.size() * taus.size())}; },
        [&](std::int64_t i, RateTable& out) {
            NominalLoop loop(model, policy, trial_seed(config, "nominal", i), options);
            VarianceMonitor mon(a, s2, gammas.front());
            std::vector<double> stat(taus.size(), 0.0);
            while (loop.k() < steps) {
                if (!loop.advance()) {
                    for (auto& c : out.cells) ++c.diverged;
                    return;
                }
                mon.observe(loop.x()(0), loop.x_prev()(0), loop.u_prev()(0));
                for (std::size_t t = 0; t < taus.size(); ++t) {
                    if (mon.tau() == taus[t]) stat[t] = mon.statistic();
                }
            }
            for (std::size_t g = 0; g < gammas.size(); ++g) {
                for (std::size_t t = 0; t < taus.size(); ++t) {
                    const bool inside = stat[t] > s2 - gammas[g] && stat[t] < s2 + gammas[g];
                    auto& c = out.cells[g * taus.size() + t];
                    if (inside) {
                        ++c.failures;
                    } else {
                        ++c.successes;
                    }
                }
            }
        });

    ExperimentResult result;
    result.experiment = "chebyshev";
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const RateCounts& c = table.cells[g * taus.size() + t];
            CellResult cell;
            cell.cell = cell_name({{"gamma", fmt(gammas[g])}, {"tau", std::to_string(taus[t])}});
            cell.kind = "false_alarm";
            cell.tau = taus[t];
            fill_rate(cell, c, c.successes);
            const double bound = chebyshev_fa_bound(s2, gammas[g], taus[t]);
            cell.extras["gamma"] = gammas[g];
            cell.extras["chebyshev_bound"] = bound;
            cell.extras["within_bound"] = cell.rate && *cell.rate <= bound;
            result.cells.push_back(std::move(cell));
        }
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_exploration_recipe(const ExperimentConfig& config) {
    if (config.policy != "linear_gain" || !config.policy_gain) {
        throw std::invalid_argument("exploration_recipe requires policy linear_gain with policy_gain");
    }
    if (!is_marginally_stable(config.a - *config.policy_gain)) {
        throw std::invalid_argument("exploration_recipe: A - policy_gain is not marginally stable");
    }
    const SystemModel model(config.a, config.sigma2);
    const ControlPolicy policy = make_policy(config, 0.0);
    const double eps_min = min_of(config.epsilon_grid);
    const double q_level = 1.0 - config.delta;
    const int n_default = config.horizon > 0 ? config.horizon : 400;

    ExperimentResult result;
    result.experiment = "exploration_recipe";

    const TailTable tail = empirical_tail(model, policy, config.k_grid, config.eta_grid, config.trials,
                                          config.master_seed, config.workers, make_options(config));
    const double c1 = tail.fitted_c1;
    {
        CellResult cell;
        cell.cell = "tail_fit";
        cell.kind = "tail_fit";
        cell.trials = (tail.cells.empty() ? 0 : tail.cells.front().trials) + tail.diverged;
        cell.successes = cell.trials - tail.diverged;
        cell.diverged = tail.diverged;
        cell.extras["fitted_c1"] = c1;
        result.cells.push_back(std::move(cell));
    }
    if (!(c1 > config.delta)) {
        throw std::runtime_error("exploration_recipe: fitted c1 does not exceed delta; widen k_grid/eta_grid");
    }

    auto pinned_config = [&](int L) {
        ExperimentConfig cfg = config;
        const double q = exploration_error_quantile(config, L, 0.0, q_level, config.trials);
        cfg.pinned_estimate = shifted_estimate(config.a, q);
        cfg.learning_mode = "exploration_only";
        return std::pair{cfg, q};
    };

    auto sprt_cell = [&](const ExperimentConfig& cfg, const std::string& id, int L, double epsilon) {
        const SprtTable t = attacked_sprt(cfg, id, L, 0.0, {epsilon}, cfg.sprt_trials, cfg.pinned_estimate);
        return t;
    };

    for (double D : config.D_grid) {
        for (double epsilon : config.epsilon_grid) {
            // Fixed point L = D·C̃(n₀)·log(c₁/δ)/log(1/ε), with C̃ measured under the attack at L.
            int L = std::max(3, config.L_grid.front());
            std::set<int> seen;
            ExperimentConfig cfg;
            double q = 0.0;
            CurveEnsemble ens;
            double c_tilde = 0.0;
            int iterations = 0;
            for (;;) {
                ++iterations;
                std::tie(cfg, q) = pinned_config(L);
                const std::string cid = cell_name({{"recipe_curve", "1"}, {"L", std::to_string(L)}});
                ens = curve_with_finite_n0(cfg, cid, L, 0.0, std::max(n_default, L + 2), epsilon, cfg.curve_trials);
                const N0Result n0 = compute_n0(ens.curve, epsilon);
                if (n0.status != N0Status::Finite) {
                    throw std::runtime_error("exploration_recipe: n0 is " + to_string(n0.status) + " at L=" +
                                             std::to_string(L));
                }
                c_tilde = ens.curve.c_tilde_at(n0.n0);
                const int next = std::max(
                    3, static_cast<int>(std::ceil(exploration_length_recipe(D, c_tilde, epsilon, c1, config.delta))));
                if (next == L || seen.count(next) > 0 || iterations >= 12) {
                    L = std::max(L, next);
                    if (next != L || iterations >= 12) std::tie(cfg, q) = pinned_config(L);
                    break;
                }
                seen.insert(L);
                L = next;
            }
            const std::string id = cell_name({{"recipe", "1"}, {"D", fmt(D)}, {"epsilon", fmt(epsilon)}});
            const SprtTable t = sprt_cell(cfg, id, L, epsilon);
            const DeceptionTimeEstimate est = t.times[0].estimate();
            CellResult cell;
            cell.cell = id;
            cell.kind = "recipe";
            cell.L = L;
            cell.epsilon = epsilon;
            const RateCounts& c = t.counts[0];
            fill_rate(cell, c, c.successes + (c.censored - t.censored_alarm[0]));
            cell.T_hat = est.mean;
            cell.extras["D"] = D;
            cell.extras["c_tilde_n0"] = c_tilde;
            cell.extras["error_quantile"] = q;
            cell.extras["fitted_c1"] = c1;
            cell.extras["iterations"] = iterations;
            cell.extras["T_hat_se"] = est.se;
            if (est.mean) {
                cell.extras["T_hat_ci_lo"] = est.ci.lo;
                cell.extras["T_hat_ci_hi"] = est.ci.hi;
                cell.extras["meets_half_D"] = *est.mean >= 0.5 * D;
            }
            if (config.tail_c && config.tail_alpha) {
                cell.extras["thm3_L_lower"] =
                    exploration_lower_bound(D, c_tilde, epsilon, *config.tail_c, *config.tail_alpha, config.delta);
            }
            result.cells.push_back(std::move(cell));
        }
    }

    for (int L : config.L_grid) {
        auto [cfg, q] = pinned_config(L);
        const std::string id = cell_name({{"sweep", "1"}, {"L", std::to_string(L)}, {"epsilon", fmt(eps_min)}});
        const SprtTable t = sprt_cell(cfg, id, L, eps_min);
        const DeceptionTimeEstimate est = t.times[0].estimate();
        CellResult cell;
        cell.cell = id;
        cell.kind = "sweep";
        cell.L = L;
        cell.epsilon = eps_min;
        const RateCounts& c = t.counts[0];
        fill_rate(cell, c, c.successes + (c.censored - t.censored_alarm[0]));
        cell.T_hat = est.mean;
        cell.extras["error_quantile"] = q;
        cell.extras["T_hat_se"] = est.se;
        if (est.mean) {
            cell.extras["T_hat_ci_lo"] = est.ci.lo;
            cell.extras["T_hat_ci_hi"] = est.ci.hi;
        }
        result.cells.push_back(std::move(cell));
    }
    warn_divergence(result);
    return result;
}

ExperimentResult experiment_energy_tradeoff(const ExperimentConfig& config) {
    if (config.dim() != 1) throw std::invalid_argument("energy_tradeoff requires a scalar system");
    const int L = config.L_grid.front();
    const double epsilon = config.epsilon_grid.front();
    const int n_max = config.horizon > 0 ? config.horizon : 2500;

    ExperimentResult result;
    result.experiment = "energy_tradeoff";
    for (double d : config.dither_grid) {
        const std::string id = cell_name({{"energy", "1"}, {"L", std::to_string(L)}, {"dither", fmt(d)}});
        const CurveAccumulator acc = run_curve(config, id, L, d, n_max, config.trials, true);
        if (acc.cost.trials() == 0) throw std::runtime_error("cell " + id + ": every trial diverged");
        const DeceptionCostCurve curve = acc.cost.curve();
        const BoundReport bounds = make_bound_report(curve, epsilon);

        CellResult cell;
        cell.cell = id;
        cell.kind = "energy";
        cell.L = L;
        cell.dither_var = d;
        cell.epsilon = epsilon;
        cell.diverged = acc.diverged;
        cell.successes = acc.delay.n;
        cell.censored = acc.delay_censored;
        cell.trials = acc.delay.n + acc.delay_censored + acc.diverged;
        cell.censored_frac = acc.delay.n + acc.delay_censored > 0
                                 ? static_cast<double>(acc.delay_censored) /
                                       static_cast<double>(acc.delay.n + acc.delay_censored)
                                 : 0.0;
        cell.extras["n0_status"] = to_string(bounds.n0.status);
        if (bounds.n0.n0 > L) {
            const int n0 = bounds.n0.n0;
            const auto idx = static_cast<std::size_t>(n0 - L - 1);
            const double r = acc.energy.mean(idx) / n0;
            const double se = acc.energy.standard_error(idx) / n0;
            cell.n0 = n0;
            cell.C_hat_at_n0 = bounds.c_hat_n0;
            cell.thm1_lower = bounds.thm1_lower;
            cell.thm2_upper = bounds.thm2_upper;
            cell.extras["R_hat"] = r;
            cell.extras["R_se"] = se;
            cell.extras["R_ci_lo"] = r - kZ95 * se;
            cell.extras["R_ci_hi"] = r + kZ95 * se;
            const double err = std::sqrt(acc.err_sq.mean());
            cell.extras["rms_exploration_error"] = err;
            if (bounds.thm2_upper && err > 0.0) {
                cell.extras["thm5_energy_lower"] =
                    energy_lower_bound(config.sigma2, epsilon, *bounds.thm2_upper, err);
            }
        }
        if (acc.delay.n > 0) {
            const Interval ci = acc.delay.normal_interval();
            cell.T_hat = acc.delay.mean();
            cell.extras["delay_se"] = acc.delay.standard_error();
            cell.extras["delay_ci_lo"] = ci.lo;
            cell.extras["delay_ci_hi"] = ci.hi;
        }
        result.cells.push_back(std::move(cell));
    }
    warn_divergence(result);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    const std::string& e = config.experiment;
    if (e == "success_vs_L") {
        result = experiment_success_vs_L(config);
    } else if (e == "success_vs_window") {
        result = experiment_success_vs_window(config);
    } else if (e == "bound_suite") {
        result = experiment_bound_suite(config);
    } else if (e == "kl_identity") {
        result = experiment_kl_identity(config);
    } else if (e == "ls_tail") {
        result = experiment_ls_tail(config);
    } else if (e == "chebyshev") {
        result = experiment_chebyshev(config);
    } else if (e == "exploration_recipe") {
        result = experiment_exploration_recipe(config);
    } else if (e == "energy_tradeoff") {
        result = experiment_energy_tradeoff(config);
    } else {
        throw std::invalid_argument("experiment: unknown experiment '" + e + "'");
    }
    result.provenance.config = config_to_json(config);
    result.provenance.config_hash = config_hash(config);
    result.provenance.master_seed = config.master_seed;
    return result;
}

std::vector<std::string> preset_names() {
    return {"scalar-fig2a", "vector-fig2b",       "scalar-bounds",   "kl-identity",
            "ls-tail",      "chebyshev-fa",       "exploration-recipe", "energy-tradeoff"};
}

int preset_version(const std::string& name) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw std::invalid_argument("preset: unknown preset '" + name + "'");
    }
    return 1;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    c.preset_version = preset_version(name);
    c.a = Mat::Constant(1, 1, 1.1);
    c.sigma2 = 1.0;
    if (name == "scalar-fig2a") {
        c.experiment = "success_vs_L";
        c.policy = "cancel_dither";
        c.dither_grid = {0.0, 9.0, 16.0};
        c.L_grid = {10, 20, 40, 80, 160, 320, 640};
        c.detector = "variance";
        c.gamma = 0.1;
        c.tau_grid = {800};
    } else if (name == "vector-fig2b") {
        c.experiment = "success_vs_window";
        Mat a(2, 2);
        a << 1.0, 2.0, 3.0, 4.0;
        c.a = a;
        c.policy = "scaled_cancel";
        c.policy_scale = 0.9;
        c.Sigma = Mat::Identity(2, 2);
        c.detector = "covariance";
        c.gamma = 0.1;
        c.tau_grid = {200, 800, 3200};
        c.L_grid = {10, 20, 40, 80, 160};
    } else if (name == "scalar-bounds") {
        c.experiment = "bound_suite";
        c.policy = "cancel_dither";
        c.dither_grid = {9.0};
        c.L_grid = {10};
        c.pinned_estimate = Mat::Constant(1, 1, 1.12);
        c.detector = "sprt";
        c.sprt_trials = 10000;
        c.epsilon_grid = {0.1, 0.05, 0.01, 0.001};
        c.horizon = 5000;
        c.max_horizon = 40000;
        c.tail_c = 1.0;
        c.tail_alpha = 1.0;
    } else if (name == "kl-identity") {
        c.experiment = "kl_identity";
        c.policy = "cancel_dither";
        c.dither_grid = {0.0, 9.0};
        c.L_grid = {50, 100};
        c.kl_offset = 50;
    } else if (name == "ls-tail") {
        c.experiment = "ls_tail";
        c.policy = "cancel_dither";
        c.dither_grid = {0.0};
        c.k_grid = {20, 50, 100};
        c.eta_grid = {0.25, 0.5, 1.0};
    } else if (name == "chebyshev-fa") {
        c.experiment = "chebyshev";
        c.policy = "cancel_dither";
        c.dither_grid = {0.0};
        c.detector = "variance";
        c.gamma_grid = {0.1, 0.2};
        c.tau_grid = {100, 800};
    } else if (name == "exploration-recipe") {
        c.experiment = "exploration_recipe";
        c.policy = "linear_gain";
        c.policy_gain = Mat::Constant(1, 1, 0.6);
        c.dither_grid = {0.0};
        c.detector = "sprt";
        c.D_grid = {20.0, 50.0};
        c.delta = 0.1;
        c.epsilon_grid = {0.01, 0.001};
        c.k_grid = {20, 50, 100};
        c.eta_grid = {0.1, 0.2};
        c.L_grid = {15, 20, 30, 50, 80};
        c.trials = 10000;
        c.sprt_trials = 10000;
        c.curve_trials = 4000;
        c.horizon = 400;
        c.max_horizon = 20000;
        c.tail_c = 1.0;
        c.tail_alpha = 1.0;
    } else if (name == "energy-tradeoff") {
        c.experiment = "energy_tradeoff";
        c.policy = "cancel_dither";
        c.dither_grid = {0.0, 9.0, 16.0};
        c.L_grid = {100};
        c.detector = "variance";
        c.gamma = 0.1;
        c.epsilon_grid = {0.01};
        c.horizon = 2500;
    }
    return c;
}

}  // namespace mitmlab
