#pragma once

#include <cstdint>
#include <string_view>

namespace mitmlab {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of two 64-bit words.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
    return mix64(seed ^ mix64(value + 0x9e3779b97f4a7c15ULL));
}

/// FNV-1a over bytes; stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based random stream: draw i is a pure function of (key, i).
///
/// Two streams with different keys never share state, and seeking to a
/// position reproduces the exact same draws. Gaussian draws use the cosine
/// branch of Box-Muller on two consecutive uniforms.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key = 0) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal.
    double gaussian() noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }
    void seek(std::uint64_t position) noexcept { counter_ = position; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class StreamTag : std::uint64_t { Plant = 1, Dither = 2, Attacker = 3 };

/// Seed of trial `trial` in cell `cell_id` under `master_seed`.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::string_view cell_id, std::uint64_t trial) noexcept;

/// The three disjoint substreams a single trial draws from.
struct TrialStreams {
    RandomStream plant;     ///< W_k
    RandomStream dither;    ///< Γ_k in dithered policies
    RandomStream attacker;  ///< W̃_k

    static TrialStreams from_seed(std::uint64_t trial_seed) noexcept;
};

}  // namespace mitmlab
