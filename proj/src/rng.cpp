#include "jamgame/rng.hpp"

#include <cmath>
#include <numbers>

namespace jamgame {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in (0, 1): never returns 0, so log() is safe.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Stream::Stream(std::uint64_t seed, StreamId id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, id_(id) {}

Philox4x32::Counter Stream::block(std::uint32_t draw) const {
  return Philox4x32::generate(
      {draw, id_.lane, static_cast<std::uint32_t>(id_.trial),
       static_cast<std::uint32_t>(id_.trial >> 32)},
      key_);
}

double Stream::uniform(std::uint32_t draw) const {
  const auto b = block(draw);
  return to_unit(b[0], b[1]);
}

std::pair<double, double> Stream::normal_pair(std::uint32_t draw) const {
  const auto b = block(draw);
  const double u1 = to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double Stream::normal(std::uint32_t k) const {
  const auto [z0, z1] = normal_pair(k / 2);
  return (k % 2 == 0) ? z0 : z1;
}

}  // namespace jamgame
