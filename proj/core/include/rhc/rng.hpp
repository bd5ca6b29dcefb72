#ifndef RHC_RNG_HPP_
#define RHC_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rhc {

// Identifier stored in manifests. Bump the suffix whenever the engine or any
// of the distribution routines below change their output sequence.
inline constexpr std::string_view kRngAlgorithmId = "mt19937_64/rejection-v1";

// 64-bit finalizer from SplitMix64.
std::uint64_t Mix64(std::uint64_t x);

// FNV-1a over the label, mixed with the parent seed. Adding new labels never
// perturbs streams derived from existing ones.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label);
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

// mt19937_64 with distribution code written out here: the std distributions
// are implementation-defined and would make manifests differ across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();

  // Uniform double in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * UniformDouble(); }

  // In-place Fisher-Yates over the first `count` positions: afterwards
  // items[0..count) is a uniform sample without replacement.
  template <typename T>
  void PartialShuffle(std::vector<T>& items, std::size_t count) {
    const std::size_t n = items.size();
    if (count > n) count = n;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(UniformInt(n - i));
      if (j != i) std::swap(items[i], items[j]);
    }
  }

  template <typename T>
  void Shuffle(std::vector<T>& items) { PartialShuffle(items, items.size()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rhc

#endif  // RHC_RNG_HPP_
