#pragma once

#include <cstdint>

namespace mvsim {

/// SplitMix64 output function applied to a counter value.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

/// Purpose of a substream; combined with a particle index to form a stream id.
enum class StreamRole : std::uint64_t {
    initial = 1,
    increments = 2,
    common_noise = 3,
    delay = 4,
    misc = 5,
};

struct StreamId {
    std::uint64_t index = 0;
    StreamRole role = StreamRole::misc;
};

/// Key of the substream (seed, id). Two mixing rounds separate nearby ids.
constexpr std::uint64_t stream_key(std::uint64_t seed, StreamId id) noexcept {
    const std::uint64_t h =
        splitmix64_mix(id.index * kGoldenGamma + (static_cast<std::uint64_t>(id.role) << 56));
    return splitmix64_mix(seed ^ splitmix64_mix(h + kGoldenGamma));
}

/// Counter-based draw: the `counter`-th 64-bit output of the stream with `key`.
constexpr std::uint64_t counter_u64(std::uint64_t key, std::uint64_t counter) noexcept {
    return splitmix64_mix(key + (counter + 1) * kGoldenGamma);
}

/// Maps 64 random bits to the open interval (0, 1).
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Acklam's rational approximation of the standard normal quantile
/// (relative error below 1.15e-9 on (0, 1)).
double normal_quantile(double p) noexcept;

/// Standard normal draw at a counter position of a stream (inverse-CDF method).
inline double counter_normal(std::uint64_t key, std::uint64_t counter) noexcept {
    return normal_quantile(bits_to_open_unit(counter_u64(key, counter)));
}

/// Name of the normal-generation method, recorded in run metadata.
inline constexpr const char* kNormalMethod = "inverse-cdf (Acklam rational approximation)";
inline constexpr const char* kRngMethod = "counter-based splitmix64 substreams";

/// Replayable random stream identified by (master seed, stream id).
///
/// Every draw is a pure function of (seed, id, position), so a stream can be
/// reconstructed anywhere without sharing state between workers.
class RngStream {
  public:
    RngStream(std::uint64_t seed, StreamId id) noexcept : key_(stream_key(seed, id)) {}

    std::uint64_t next_u64() noexcept { return counter_u64(key_, counter_++); }
    double uniform() noexcept { return bits_to_open_unit(next_u64()); }
    double normal() noexcept { return normal_quantile(uniform()); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace mvsim
