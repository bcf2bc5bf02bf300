#include "lqmfg/rng.hpp"

#include <cmath>
#include <numbers>

namespace lqmfg {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t replication,
                           std::uint64_t agent, StreamPurpose purpose) noexcept {
  // Replication folds into the key; agent and purpose occupy counter words,
  // leaving a 2^64-block index space for every (rep, agent, purpose).
  const std::uint64_t k = splitmix64(master_seed ^ splitmix64(replication));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  stream_word_ = static_cast<std::uint32_t>(agent);
  purpose_ = static_cast<std::uint32_t>(purpose) | (static_cast<std::uint32_t>(agent >> 32 & 0xFFFFu) << 8);
}

Philox4x32::Counter RandomStream::counter(std::uint64_t block_index,
                                          std::uint32_t lane) const noexcept {
  return {static_cast<std::uint32_t>(block_index), static_cast<std::uint32_t>(block_index >> 32),
          stream_word_, purpose_ ^ (lane << 24)};
}

std::array<double, 2> RandomStream::normal_pair(std::uint64_t block_index) const noexcept {
  const auto r = Philox4x32::block(counter(block_index, 0), key_);
  const std::uint64_t a = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
  const double radius = std::sqrt(-2.0 * std::log(to_open_unit(a)));
  const double angle = 2.0 * std::numbers::pi * to_open_unit(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RandomStream::uniform(std::uint64_t index) const noexcept {
  const auto r = Philox4x32::block(counter(index >> 1, 1), key_);
  const std::uint64_t bits = (index & 1u) == 0
                                 ? (static_cast<std::uint64_t>(r[1]) << 32) | r[0]
                                 : (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
  return to_open_unit(bits);
}

double RandomStream::normal(std::uint64_t index) const noexcept {
  return normal_pair(index >> 1)[index & 1u];
}

void RandomStream::fill_normal(std::span<double> out, std::uint64_t first) const noexcept {
  std::size_t i = 0;
  std::uint64_t idx = first;
  if ((idx & 1u) != 0 && i < out.size()) {
    out[i++] = normal(idx++);
  }
  for (; i + 1 < out.size(); i += 2, idx += 2) {
    const auto pair = normal_pair(idx >> 1);
    out[i] = pair[0];
    out[i + 1] = pair[1];
  }
  if (i < out.size()) out[i] = normal(idx);
}

}  // namespace lqmfg
