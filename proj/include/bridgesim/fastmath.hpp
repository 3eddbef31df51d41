#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

// Branch-free exp/sigmoid/tanh used inside the MLP kernels. Accuracy is a few
// ulp over the clamped range, which is far below every tolerance in the test
// suite; the point is that these inline and vectorize where libm calls would
// not. No data-dependent branches: saturation is handled by clamping, the
// 2^k scaling by two exponent-bit multiplies, so `omp simd` loops over these
// compile to straight-line vector code.
namespace bridgesim::fastmath {

namespace detail {
inline constexpr double kLog2E = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

// 2^n for integral-valued n in [-1023, 1024]; the end points land on the
// exact zero and inf bit patterns, so the scaling multiply saturates cleanly.
inline double pow2i(double n) {
  const uint64_t bits = static_cast<uint64_t>(static_cast<int64_t>(n) + 1023)
                        << 52;
  return std::bit_cast<double>(bits);
}
}  // namespace detail

// exp(x) with |rel err| < 4e-16 on [-708, 708]; saturates to 0 / inf outside
// (underflow and overflow come from the scaling multiply, not branches; the
// clamps keep k inside pow2i's domain).
inline double exp(double x) {
  // ternary clamps compile to vector blends; fmin/fmax would be libm calls
  double xc = x > 709.7 ? 709.7 : x;
  xc = xc < -709.0 ? -709.0 : xc;
  const double k = std::nearbyint(xc * detail::kLog2E);
  const double r = (xc - k * detail::kLn2Hi) - k * detail::kLn2Lo;
  // degree-11 Taylor on |r| <= ln2/2, Horner
  double p = 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  return p * detail::pow2i(k);
}

inline double sigmoid(double x) {
  // t = exp(-|x|) keeps the argument non-positive; the select picks the
  // stable quotient for either sign. Same values as the two-branch form.
  const double t = exp(-std::fabs(x));
  const double num = x >= 0.0 ? 1.0 : t;
  return num / (1.0 + t);
}

inline double tanh(double x) {
  // tanh(x) = sign(x) * (1 - 2/(e^{2|x|}+1)); past the clamp the quotient
  // is below half an ulp of 1 so the saturated value is exact.
  const double two_ax = 2.0 * std::fabs(x);
  const double e = exp(two_ax > 44.0 ? 44.0 : two_ax);
  const double t = 1.0 - 2.0 / (e + 1.0);
  return x < 0.0 ? -t : t;
}

}  // namespace bridgesim::fastmath
