#include "clssr/rng.hpp"

#include <cmath>
#include <numbers>

namespace clssr {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Block round_once(Philox4x32::Block x,
                                    const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t key)
    : key_{static_cast<std::uint32_t>(key),
           static_cast<std::uint32_t>(key >> 32)} {}

Philox4x32::Block Philox4x32::bijection(Block counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    counter = round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

void Philox4x32::refill() {
  buffer_ = bijection(counter_, key_);
  buffered_ = 4;
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
}

std::uint32_t Philox4x32::next_u32() {
  if (buffered_ == 0) refill();
  return buffer_[4 - buffered_--];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double Philox4x32::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox4x32::next_gaussian() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Philox4x32::next_cgaussian() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-std::log1p(-u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::uint64_t derive_stream_key(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^ h);
}

}  // namespace clssr
