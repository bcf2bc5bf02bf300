#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lqmfg {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block
/// is a pure function of (counter, key), so any stream position can be
/// produced independently of scheduling.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// What a random stream is used for; part of the counter so the streams
/// for different purposes never overlap.
enum class StreamPurpose : std::uint32_t {
  brownian = 0,
  initial_state = 1,
  probe_control = 2,
  probe_noise = 3,
  deviation = 4,
};

/// Random-access stream identified by (master_seed, replication, agent,
/// purpose). Draw j of the stream depends on nothing else.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t replication, std::uint64_t agent,
               StreamPurpose purpose) noexcept;

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t index) const noexcept;
  /// Standard normal draw via Box-Muller; draws 2j and 2j+1 share one block.
  double normal(std::uint64_t index) const noexcept;
  /// Fills `out` with normals starting at draw `first`.
  void fill_normal(std::span<double> out, std::uint64_t first = 0) const noexcept;

 private:
  std::array<double, 2> normal_pair(std::uint64_t block_index) const noexcept;
  Philox4x32::Counter counter(std::uint64_t block_index, std::uint32_t lane) const noexcept;

  Philox4x32::Key key_;
  std::uint32_t stream_word_;
  std::uint32_t purpose_;
};

}  // namespace lqmfg
