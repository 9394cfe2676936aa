#include "mitmlab/random.hpp"

#include <cmath>
#include <numbers>

namespace mitmlab {

double RandomStream::gaussian() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::string_view cell_id, std::uint64_t trial) noexcept {
    return hash_combine(hash_combine(mix64(master_seed), fnv1a64(cell_id)), trial);
}

TrialStreams TrialStreams::from_seed(std::uint64_t trial_seed) noexcept {
    return TrialStreams{
        RandomStream(hash_combine(trial_seed, static_cast<std::uint64_t>(StreamTag::Plant))),
        RandomStream(hash_combine(trial_seed, static_cast<std::uint64_t>(StreamTag::Dither))),
        RandomStream(hash_combine(trial_seed, static_cast<std::uint64_t>(StreamTag::Attacker))),
    };
}

}  // namespace mitmlab
