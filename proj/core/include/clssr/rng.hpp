#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace clssr {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
//
// Counter-based generation is what makes the simulator reproducible under
// parallelism: every (seed, label) pair owns an independent stream, and the
// values drawn from a stream depend only on its key and draw index, never on
// which thread consumed them.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t key);

  // One 10-round keyed bijection of a 128-bit counter block. Exposed so the
  // known-answer vectors from the reference implementation can be checked.
  static Block bijection(Block counter, Key key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double next_unit();

  // Standard normal via Box-Muller.
  double next_gaussian();

  // Circularly symmetric complex normal with E|z|^2 = 1.
  std::complex<double> next_cgaussian();

 private:
  void refill();

  Key key_;
  Block counter_{0, 0, 0, 0};
  Block buffer_{};
  int buffered_ = 0;
};

// Collision-resistant-enough 64-bit stream key from a master seed and a
// human-readable label such as "<scenario-id>/binrep/eve0". Labels keep the
// purpose of every stream auditable and make draws independent of call order.
std::uint64_t derive_stream_key(std::uint64_t seed, std::string_view label);

inline Philox4x32 make_stream(std::uint64_t seed, std::string_view label) {
  return Philox4x32(derive_stream_key(seed, label));
}

}  // namespace clssr
