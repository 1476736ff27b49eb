#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace onoff {

/// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
/// Maps a 128-bit counter and 64-bit key to 128 random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Reproducible random stream identified by (master_seed, stream_id).
///
/// The stream is a pure function of its two identifiers: block `n` of stream
/// `s` is Philox(counter = {n, s}, key = master_seed). One stream per
/// Monte-Carlo replicate makes ensemble output independent of how replicates
/// are scheduled. Not thread-safe; a stream is owned by one replicate.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  RandomSource(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);
  std::uint64_t poisson(double mean);
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace onoff
