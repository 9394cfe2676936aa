#include "mitmlab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace mitmlab {

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (successes < 0 || successes > trials) throw std::invalid_argument("wilson_interval: successes outside [0, trials]");
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

double MeanAccumulator::variance() const noexcept {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::max(v, 0.0);
}

void PathAccumulator::add(const std::vector<double>& path) {
    if (path.size() != sum.size()) throw std::invalid_argument("PathAccumulator: length mismatch");
    ++n;
    for (std::size_t i = 0; i < path.size(); ++i) {
        sum[i] += path[i];
        sum_sq[i] += path[i] * path[i];
    }
}

void PathAccumulator::merge(const PathAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0 && sum.empty()) {
        *this = o;
        return;
    }
    if (o.sum.size() != sum.size()) throw std::invalid_argument("PathAccumulator: length mismatch");
    n += o.n;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] += o.sum[i];
        sum_sq[i] += o.sum_sq[i];
    }
}

double PathAccumulator::standard_error(std::size_t i) const noexcept {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double m = sum[i] / nn;
    const double var = std::max((sum_sq[i] - nn * m * m) / (nn - 1.0), 0.0);
    return std::sqrt(var / nn);
}

double pairwise_sum(const double* data, std::size_t count) noexcept {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += data[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

double quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
    std::sort(sample.begin(), sample.end());
    const double pos = q * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sample[lo] + frac * (sample[hi] - sample[lo]);
}

}  // namespace mitmlab
