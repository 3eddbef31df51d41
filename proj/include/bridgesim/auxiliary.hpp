#pragma once

#include <functional>
#include <vector>

#include "bridgesim/linalg.hpp"

namespace bridgesim {

// Linear process dXt = (beta(t) + B(t) Xt) dt + sigma(t) dWt used to build the
// tractable terminal density. Coefficients are constant for every bundled
// model; the callable form exists for custom schemes.
class LinearAuxiliary {
 public:
  using VecFn = std::function<void(double, double*)>;
  using MatFn = std::function<void(double, linalg::Matrix&)>;

  static LinearAuxiliary constants(std::vector<double> beta, linalg::Matrix B,
                                   linalg::Matrix sigma);
  LinearAuxiliary(int d, int dw, VecFn beta, MatFn B, MatFn sigma);

  int dim() const { return d_; }
  int noise_dim() const { return dw_; }
  bool is_constant() const { return constant_; }

  void beta(double t, double* out) const;
  void Bmat(double t, linalg::Matrix& out) const;
  void sigma(double t, linalg::Matrix& out) const;
  // a~ = sigma sigma^T, exactly symmetric
  void atilde(double t, linalg::Matrix& out) const;

  // beta(t) + B(t) x; the guided-proposal weight and the linear model adapter
  // both evaluate through here, so "model == auxiliary" cancels bitwise
  void drift(double t, const double* x, double* out) const;

  // constant-coefficient fast access (valid only when is_constant())
  const std::vector<double>& beta_c() const { return beta_c_; }
  const linalg::Matrix& B_c() const { return B_c_; }
  const linalg::Matrix& sigma_c() const { return sigma_c_; }
  const linalg::Matrix& atilde_c() const { return atilde_c_; }

 private:
  int d_ = 0;
  int dw_ = 0;
  bool constant_ = false;
  std::vector<double> beta_c_;
  linalg::Matrix B_c_, sigma_c_, atilde_c_;
  VecFn beta_fn_;
  MatFn B_fn_, sigma_fn_;
};

}  // namespace bridgesim
