#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace mitmlab {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const noexcept { return 0.5 * (hi - lo); }
    bool overlaps(const Interval& other) const noexcept { return lo <= other.hi && other.lo <= hi; }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = kZ95);

/// Running sum / sum of squares for a scalar sample.
struct MeanAccumulator {
    std::int64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) noexcept {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const MeanAccumulator& o) noexcept {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const noexcept { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
    /// Unbiased sample variance.
    double variance() const noexcept;
    double standard_error() const noexcept {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
    Interval normal_interval(double z = kZ95) const noexcept {
        const double h = z * standard_error();
        return {mean() - h, mean() + h};
    }
};

/// Index-aligned MeanAccumulators over a fixed-length path.
struct PathAccumulator {
    std::int64_t n = 0;
    std::vector<double> sum;
    std::vector<double> sum_sq;

    PathAccumulator() = default;
    explicit PathAccumulator(std::size_t length) : sum(length, 0.0), sum_sq(length, 0.0) {}

    void add(const std::vector<double>& path);
    void merge(const PathAccumulator& o);
    std::size_t length() const noexcept { return sum.size(); }
    double mean(std::size_t i) const noexcept { return n > 0 ? sum[i] / static_cast<double>(n) : 0.0; }
    double standard_error(std::size_t i) const noexcept;
};

/// Pairwise sum (deterministic for a given input order).
double pairwise_sum(const double* data, std::size_t count) noexcept;
inline double pairwise_sum(const std::vector<double>& v) noexcept { return pairwise_sum(v.data(), v.size()); }

/// Empirical q-quantile (type-7 linear interpolation) of an unsorted sample.
double quantile(std::vector<double> sample, double q);

/// True when a <= b, or when the two intervals overlap (trend checks that
/// tolerate Monte-Carlo noise).
inline bool ordered_within(double a, const Interval& ia, double b, const Interval& ib) noexcept {
    return a <= b || ia.overlaps(ib);
}

}  // namespace mitmlab
