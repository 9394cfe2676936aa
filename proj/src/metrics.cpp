#include "mitmlab/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mitmlab {
namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

std::size_t curve_index(const DeceptionCostCurve& curve, int n) {
    if (!curve.contains(n)) throw std::out_of_range("DeceptionCostCurve: n outside (L, n_max]");
    return static_cast<std::size_t>(n - curve.n_first());
}

double z_score(double diff, double se) {
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

}  // namespace

CostTerms deception_cost_terms(const Mat& a_hat, const Vec& v, const Mat& a, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("deception cost: sigma2 must be > 0");
    const Vec ev = (a_hat - a) * v;
    const double scale = 1.0 / (2.0 * sigma2);
    return {ev.squaredNorm() * scale, v.squaredNorm() * scale};
}

double DeceptionCostCurve::c_at(int n) const { return c_hat[curve_index(*this, n)]; }
double DeceptionCostCurve::c_se_at(int n) const { return c_hat_se[curve_index(*this, n)]; }
double DeceptionCostCurve::c_tilde_at(int n) const { return c_tilde[curve_index(*this, n)]; }
double DeceptionCostCurve::c_tilde_se_at(int n) const { return c_tilde_se[curve_index(*this, n)]; }

DeceptionCostCurve DeceptionCostCurve::from_values(int exploration_length, std::vector<double> c_hat,
                                                   std::vector<double> c_tilde) {
    if (c_tilde.empty()) c_tilde.assign(c_hat.size(), 0.0);
    if (c_tilde.size() != c_hat.size()) throw std::invalid_argument("DeceptionCostCurve: length mismatch");
    DeceptionCostCurve curve;
    curve.exploration_length = exploration_length;
    curve.c_hat_se.assign(c_hat.size(), 0.0);
    curve.c_tilde_se.assign(c_hat.size(), 0.0);
    curve.c_hat = std::move(c_hat);
    curve.c_tilde = std::move(c_tilde);
    return curve;
}

DeceptionCostAccumulator::DeceptionCostAccumulator(int exploration_length, int n_max)
    : exploration_length_(exploration_length),
      n_max_(n_max),
      cost_(static_cast<std::size_t>(std::max(0, n_max - exploration_length))),
      tilde_(static_cast<std::size_t>(std::max(0, n_max - exploration_length))) {
    if (n_max <= exploration_length) throw std::invalid_argument("deception cost: n_max must exceed L");
}

void DeceptionCostAccumulator::add(const std::vector<double>& cost_cumulative,
                                   const std::vector<double>& tilde_cumulative) {
    cost_.add(cost_cumulative);
    tilde_.add(tilde_cumulative);
}

void DeceptionCostAccumulator::merge(const DeceptionCostAccumulator& other) {
    cost_.merge(other.cost_);
    tilde_.merge(other.tilde_);
}

DeceptionCostCurve DeceptionCostAccumulator::curve() const {
    DeceptionCostCurve curve;
    curve.exploration_length = exploration_length_;
    curve.trials = cost_.n;
    const std::size_t len = cost_.length();
    curve.c_hat.resize(len);
    curve.c_hat_se.resize(len);
    curve.c_tilde.resize(len);
    curve.c_tilde_se.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double n = static_cast<double>(exploration_length_ + 1 + static_cast<int>(i));
        curve.c_hat[i] = cost_.mean(i) / n;
        curve.c_hat_se[i] = cost_.standard_error(i) / n;
        curve.c_tilde[i] = tilde_.mean(i) / n;
        curve.c_tilde_se[i] = tilde_.standard_error(i) / n;
    }
    return curve;
}

void trajectory_cost_paths(const AttackedTrajectory& traj, const Mat& a, double sigma2, int n_max,
                           std::vector<double>& cost_cumulative, std::vector<double>& tilde_cumulative) {
    const int L = traj.exploration_length;
    if (n_max <= L) throw std::invalid_argument("deception cost: n_max must exceed L");
    if (traj.V.size() < static_cast<std::size_t>(n_max) || traj.a_hat.size() < static_cast<std::size_t>(n_max)) {
        throw std::invalid_argument("deception cost: trajectory shorter than n_max");
    }
    const auto len = static_cast<std::size_t>(n_max - L);
    cost_cumulative.assign(len, 0.0);
    tilde_cumulative.assign(len, 0.0);
    double cost = 0.0;
    double tilde = 0.0;
    for (int k = L + 1; k <= n_max; ++k) {
        const Mat a_hat = traj.a_hat[static_cast<std::size_t>(k - 1)];
        const Vec v = traj.V[static_cast<std::size_t>(k - 1)];
        const CostTerms t = deception_cost_terms(a_hat, v, a, sigma2);
        cost += t.cost;
        tilde += t.tilde;
        cost_cumulative[static_cast<std::size_t>(k - L - 1)] = cost;
        tilde_cumulative[static_cast<std::size_t>(k - L - 1)] = tilde;
    }
}

DeceptionCostCurve deception_cost_curve(const std::vector<AttackedTrajectory>& ensemble, const Mat& a, double sigma2,
                                        int n_max) {
    if (ensemble.empty()) throw std::invalid_argument("deception_cost_curve: empty ensemble");
    const int L = ensemble.front().exploration_length;
    DeceptionCostAccumulator acc(L, n_max);
    std::vector<double> cost, tilde;
    for (const auto& traj : ensemble) {
        if (traj.exploration_length != L) throw std::invalid_argument("deception_cost_curve: mixed L");
        if (traj.diverged) continue;
        trajectory_cost_paths(traj, a, sigma2, n_max, cost, tilde);
        acc.add(cost, tilde);
    }
    if (acc.trials() == 0) throw std::invalid_argument("deception_cost_curve: every trajectory diverged");
    return acc.curve();
}

KlIdentityReport KlAccumulator::report(int n) const {
    KlIdentityReport r;
    r.n = n;
    r.trials = llr_.n;
    r.lhs = llr_.mean();
    r.lhs_se = llr_.standard_error();
    r.rhs = cost_.mean();
    r.rhs_se = cost_.standard_error();
    r.z = z_score(r.lhs - r.rhs, std::sqrt(r.lhs_se * r.lhs_se + r.rhs_se * r.rhs_se));
    r.z_paired = z_score(diff_.mean(), diff_.standard_error());
    return r;
}

double trajectory_llr(const AttackedTrajectory& traj, const Mat& a, double sigma2, int n) {
    const int L = traj.exploration_length;
    if (traj.Y.size() < static_cast<std::size_t>(n) + 1) {
        throw std::invalid_argument("trajectory_llr: trajectory shorter than n");
    }
    double s = 0.0;
    for (int k = L + 1; k <= n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        s += sprt_increment(traj.Y[kk], traj.Y[kk - 1], traj.U[kk - 1], a, traj.a_hat[kk - 1], sigma2);
    }
    return s;
}

KlIdentityReport kl_identity_check(const std::vector<AttackedTrajectory>& ensemble, const Mat& a, double sigma2,
                                   int n) {
    if (ensemble.empty()) throw std::invalid_argument("kl_identity_check: empty ensemble");
    KlAccumulator acc;
    for (const auto& traj : ensemble) {
        if (traj.diverged) continue;
        const int L = traj.exploration_length;
        if (n < L) throw std::invalid_argument("kl_identity_check: n must be >= L");
        double cost = 0.0;
        for (int k = L + 1; k <= n; ++k) {
            cost += deception_cost_terms(traj.a_hat[static_cast<std::size_t>(k - 1)],
                                         traj.V[static_cast<std::size_t>(k - 1)], a, sigma2)
                        .cost;
        }
        acc.add(trajectory_llr(traj, a, sigma2, n), cost);
    }
    return acc.report(n);
}

std::string to_string(N0Status status) {
    switch (status) {
        case N0Status::Finite: return "finite";
        case N0Status::UnboundedWithinHorizon: return "unbounded_within_horizon";
        case N0Status::Degenerate: return "degenerate";
        case N0Status::Infinite: return "infinite";
    }
    return "unknown";
}

N0Result compute_n0(const DeceptionCostCurve& curve, double epsilon) {
    require_epsilon(epsilon);
    if (curve.c_hat.empty()) throw std::invalid_argument("compute_n0: empty curve");
    bool any_positive = false;
    for (double c : curve.c_hat) any_positive = any_positive || c > 0.0;
    if (!any_positive) return {N0Status::Infinite, 0};

    const double budget = std::log(1.0 / epsilon);
    int n0 = 0;
    bool all = true;
    for (int n = curve.n_first(); n <= curve.n_max(); ++n) {
        if (static_cast<double>(n) * curve.c_at(n) < budget) {
            n0 = n;
        } else {
            all = false;
        }
    }
    if (n0 == 0) return {N0Status::Degenerate, 0};
    if (all) return {N0Status::UnboundedWithinHorizon, curve.n_max()};
    return {N0Status::Finite, n0};
}

DeceptionTimeBounds deception_time_bounds(const DeceptionCostCurve& curve, double epsilon) {
    const N0Result n0 = compute_n0(curve, epsilon);
    if (!n0.finite()) throw std::domain_error("deception_time_bounds: n0 is " + to_string(n0.status));
    const double c0 = curve.c_at(n0.n0);
    const double c1 = curve.c_at(n0.n0 + 1);
    if (!(c0 > 0.0)) throw std::domain_error("deception_time_bounds: C(n0) is zero");
    const double budget = std::log(1.0 / epsilon);
    return {n0.n0, budget / c0, budget / c1};
}

void DeceptionTimeAccumulator::add(const DecisionRecord& record, int exploration_length) {
    if (record.censored) {
        ++censored_;
    } else {
        times_.add(static_cast<double>(record.tau - exploration_length - 1));
    }
}

DeceptionTimeEstimate DeceptionTimeAccumulator::estimate() const {
    DeceptionTimeEstimate e;
    e.decided = times_.n;
    e.censored = censored_;
    const std::int64_t total = e.decided + e.censored;
    e.censored_fraction = total > 0 ? static_cast<double>(censored_) / static_cast<double>(total) : 0.0;
    if (times_.n > 0) {
        e.mean = times_.mean();
        e.se = times_.standard_error();
        e.ci = times_.normal_interval();
    }
    return e;
}

DeceptionTimeEstimate empirical_deception_time(const std::vector<DecisionRecord>& records, int exploration_length) {
    DeceptionTimeAccumulator acc;
    for (const auto& r : records) acc.add(r, exploration_length);
    return acc.estimate();
}

double exploration_lower_bound(double d, double c_tilde_n0, double epsilon, double c, double alpha, double delta) {
    require_epsilon(epsilon);
    if (!(d > 0.0 && c > 0.0 && c_tilde_n0 >= 0.0)) throw std::invalid_argument("exploration_lower_bound: bad input");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("exploration_lower_bound: delta outside (0, 1)");
    if (!(alpha >= 1.0)) throw std::invalid_argument("exploration_lower_bound: alpha must be >= 1");
    return d * c_tilde_n0 / std::log(1.0 / epsilon) * std::pow(c / delta, 1.0 / alpha);
}

double exploration_lower_bound(double d, const DeceptionCostCurve& curve, double epsilon, double c, double alpha,
                               double delta) {
    const N0Result n0 = compute_n0(curve, epsilon);
    if (!n0.finite()) throw std::domain_error("exploration_lower_bound: n0 is " + to_string(n0.status));
    return exploration_lower_bound(d, curve.c_tilde_at(n0.n0), epsilon, c, alpha, delta);
}

double exploration_length_recipe(double d, double c_tilde_n0, double epsilon, double c1, double delta) {
    require_epsilon(epsilon);
    if (!(d > 0.0 && c1 > 0.0 && c_tilde_n0 >= 0.0)) {
        throw std::invalid_argument("exploration_length_recipe: bad input");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("exploration_length_recipe: delta outside (0, 1)");
    return d * c_tilde_n0 * std::log(c1 / delta) / std::log(1.0 / epsilon);
}

double energy_lower_bound(double sigma2, double epsilon, double d, double estimation_error) {
    require_epsilon(epsilon);
    if (!(d > 0.0)) throw std::invalid_argument("energy_lower_bound: D must be > 0");
    if (!(estimation_error > 0.0)) throw std::domain_error("energy_lower_bound: zero estimation error");
    return 2.0 * sigma2 * std::log(1.0 / epsilon) / (estimation_error * estimation_error * d);
}

double trajectory_energy(const Series& u, int exploration_length, int n0) {
    if (exploration_length < 1 || n0 <= exploration_length) {
        throw std::invalid_argument("trajectory_energy: need 1 <= L < n0");
    }
    if (u.size() < static_cast<std::size_t>(n0 - 1)) throw std::invalid_argument("trajectory_energy: short trajectory");
    double sum = 0.0;
    for (int k = exploration_length; k <= n0 - 1; ++k) sum += u[static_cast<std::size_t>(k - 1)].squaredNorm();
    return sum / static_cast<double>(n0);
}

EnergyReport energy_metrics(const std::vector<AttackedTrajectory>& ensemble, int n0) {
    MeanAccumulator acc;
    for (const auto& traj : ensemble) {
        if (traj.diverged) continue;
        acc.add(trajectory_energy(traj.U, traj.exploration_length, n0));
    }
    return {n0, acc.mean(), acc.standard_error(), acc.n};
}

std::vector<PolicyConditionPoint> policy_condition_check(const std::vector<AttackedTrajectory>& ensemble,
                                                         double sigma2, int k_first, int k_last) {
    if (k_last < k_first) return {};
    std::vector<MeanAccumulator> acc(static_cast<std::size_t>(k_last - k_first + 1));
    for (const auto& traj : ensemble) {
        if (traj.diverged) continue;
        if (traj.U.size() <= static_cast<std::size_t>(k_last)) {
            throw std::invalid_argument("policy_condition_check: trajectory shorter than range");
        }
        for (int k = k_first; k <= k_last; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const Mat a_hat = traj.a_hat[kk];
            const Vec av = a_hat * traj.V[kk];
            const Vec u = traj.U[kk];
            acc[kk - static_cast<std::size_t>(k_first)].add(av.squaredNorm() + sigma2 + 2.0 * av.dot(u));
        }
    }
    std::vector<PolicyConditionPoint> out;
    out.reserve(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        PolicyConditionPoint p;
        p.k = k_first + static_cast<int>(i);
        p.lhs = acc[i].mean();
        p.se = acc[i].standard_error();
        p.holds = p.lhs <= p.se;
        out.push_back(p);
    }
    return out;
}

BoundReport make_bound_report(const DeceptionCostCurve& curve, double epsilon) {
    BoundReport r;
    r.epsilon = epsilon;
    r.n0 = compute_n0(curve, epsilon);
    if (r.n0.status == N0Status::Finite || r.n0.status == N0Status::UnboundedWithinHorizon) {
        r.c_hat_n0 = curve.c_at(r.n0.n0);
        r.c_tilde_n0 = curve.c_tilde_at(r.n0.n0);
    }
    if (r.n0.finite()) {
        r.c_hat_n0_next = curve.c_at(r.n0.n0 + 1);
        const double budget = std::log(1.0 / epsilon);
        if (*r.c_hat_n0 > 0.0) r.thm1_lower = budget / *r.c_hat_n0;
        r.thm2_upper = budget / *r.c_hat_n0_next;
    }
    return r;
}

}  // namespace mitmlab
