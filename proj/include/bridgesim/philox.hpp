#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Counter-based RNG: Philox4x32-10. Every draw is addressed by
// (seed, stream word, two 32-bit indices, slot), so any sub-stream can be
// regenerated in isolation and batch kernels need no shared state.
namespace bridgesim::rng {

// stream tags (low byte of the stream word; higher bytes carry a sub-id,
// e.g. the chain index for MCMC streams)
enum Stream : uint32_t {
  kWiener = 0,
  kPcnInnovation = 1,
  kMetropolis = 2,
  kWeightInit = 3,
};

inline constexpr uint32_t stream_word(uint32_t tag, uint32_t subid = 0) {
  return tag | (subid << 8);
}

namespace detail {
inline constexpr uint32_t kMul0 = 0xD2511F53u;
inline constexpr uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round(std::array<uint32_t, 4>& x, uint32_t k0, uint32_t k1) {
  const uint64_t p0 = static_cast<uint64_t>(kMul0) * x[0];
  const uint64_t p1 = static_cast<uint64_t>(kMul1) * x[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}
}  // namespace detail

// one 128-bit block; counter words are (slot, index_a, index_b, stream)
inline std::array<uint32_t, 4> block(uint64_t seed, uint32_t slot, uint32_t index_a,
                                     uint32_t index_b, uint32_t stream) {
  std::array<uint32_t, 4> x{slot, index_a, index_b, stream};
  uint32_t k0 = static_cast<uint32_t>(seed);
  uint32_t k1 = static_cast<uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    detail::round(x, k0, k1);
    k0 += detail::kWeyl0;
    k1 += detail::kWeyl1;
  }
  return x;
}

// uniform on (0,1): 53 random bits, offset half an ulp so 0 and 1 are excluded
inline double to_unit(uint32_t hi, uint32_t lo) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

inline double uniform(uint64_t seed, uint32_t slot, uint32_t index_a, uint32_t index_b,
                      uint32_t stream) {
  const auto w = block(seed, slot, index_a, index_b, stream);
  return to_unit(w[0], w[1]);
}

// two independent N(0,1) draws per block via Box-Muller
inline void normal_pair(uint64_t seed, uint32_t slot, uint32_t index_a, uint32_t index_b,
                        uint32_t stream, double& z0, double& z1) {
  const auto w = block(seed, slot, index_a, index_b, stream);
  const double u1 = to_unit(w[0], w[1]);
  const double u2 = to_unit(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 6.283185307179586477 * u2;
  z0 = r * std::cos(phi);
  z1 = r * std::sin(phi);
}

// n standard normals addressed by (index_a, index_b); slot enumerates pairs
inline void fill_normals(uint64_t seed, uint32_t index_a, uint32_t index_b, uint32_t stream,
                         double* out, int n) {
  int i = 0;
  for (uint32_t slot = 0; i < n; ++slot, i += 2) {
    double z0, z1;
    normal_pair(seed, slot, index_a, index_b, stream, z0, z1);
    out[i] = z0;
    if (i + 1 < n) out[i + 1] = z1;
  }
}

inline void fill_uniforms(uint64_t seed, uint32_t index_a, uint32_t index_b, uint32_t stream,
                          double* out, int n) {
  int i = 0;
  for (uint32_t slot = 0; i < n; ++slot, i += 2) {
    const auto w = block(seed, slot, index_a, index_b, stream);
    out[i] = to_unit(w[0], w[1]);
    if (i + 1 < n) out[i + 1] = to_unit(w[2], w[3]);
  }
}

}  // namespace bridgesim::rng
