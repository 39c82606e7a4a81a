#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace jamgame {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (key, counter), so a stream can be
/// addressed directly by index and any partition of work across threads
/// reproduces the same numbers.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Identifies one independent random stream: a trial index and a lane
/// within that trial (sensor id, jammer, initializer, ...).
struct StreamId {
  std::uint64_t trial = 0;
  std::uint32_t lane = 0;
};

/// Reserved lanes. Sensor lanes are 0..n-1.
inline constexpr std::uint32_t kJammerLane = 0xFFFF'FFFFu;
inline constexpr std::uint32_t kInitLane = 0xFFFF'FFFEu;

class Stream {
 public:
  Stream(std::uint64_t seed, StreamId id);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint32_t draw) const;

  /// Two independent standard normals (Box-Muller on one Philox block).
  std::pair<double, double> normal_pair(std::uint32_t draw) const;

  /// k-th standard normal of the stream; consecutive pairs share a block.
  double normal(std::uint32_t k) const;

 private:
  Philox4x32::Counter block(std::uint32_t draw) const;

  Philox4x32::Key key_;
  StreamId id_;
};

}  // namespace jamgame
