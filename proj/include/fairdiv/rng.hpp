#pragma once

// xoshiro256++ seeded through SplitMix64, with the reference constants from
// Blackman & Vigna. Every draw is a pure function of the seed, so runs replay
// bit-for-bit on any platform.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace fairdiv {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output function. A bijection on 64-bit words.
constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += detail::kGoldenGamma;
    return detail::splitmix_mix(state_);
  }

 private:
  std::uint64_t state_;
};

/// Seed of child stream `index` under `master`. Distinct indices give distinct
/// seeds: index -> master + gamma*(index+1) is injective mod 2^64 (gamma is odd)
/// and the mixer is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return detail::splitmix_mix(master + detail::kGoldenGamma * (index + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  for (std::uint64_t index : path) master = derive_seed(master, index);
  return master;
}

/// xoshiro256++ stream. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RngStream(std::uint64_t seed) noexcept : state_{} {
    SplitMix64 expander(seed);
    for (auto& word : state_) word = expander.next();
  }

  /// Child stream for (master_seed, index).
  static constexpr RngStream child(std::uint64_t master, std::uint64_t index) noexcept {
    return RngStream(derive_seed(master, index));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-and-reject. bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  constexpr const std::array<std::uint64_t, 4>& state() const noexcept { return state_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace fairdiv
