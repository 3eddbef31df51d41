#include "bridgesim/auxiliary.hpp"

#include <stdexcept>

namespace bridgesim {

LinearAuxiliary LinearAuxiliary::constants(std::vector<double> beta, linalg::Matrix B,
                                           linalg::Matrix sigma) {
  const int d = static_cast<int>(beta.size());
  if (B.rows != d || B.cols != d)
    throw std::invalid_argument("LinearAuxiliary: B must be d x d");
  if (sigma.rows != d || sigma.cols < 1)
    throw std::invalid_argument("LinearAuxiliary: sigma must have d rows");
  LinearAuxiliary aux(d, sigma.cols, VecFn{}, MatFn{}, MatFn{});
  aux.constant_ = true;
  aux.beta_c_ = std::move(beta);
  aux.B_c_ = std::move(B);
  aux.sigma_c_ = std::move(sigma);
  aux.atilde_c_ = linalg::sandwich(aux.sigma_c_, linalg::Matrix::identity(aux.dw_));
  return aux;
}

LinearAuxiliary::LinearAuxiliary(int d, int dw, VecFn beta, MatFn B, MatFn sigma)
    : d_(d), dw_(dw), beta_fn_(std::move(beta)), B_fn_(std::move(B)),
      sigma_fn_(std::move(sigma)) {}

void LinearAuxiliary::beta(double t, double* out) const {
  if (constant_) {
    for (int i = 0; i < d_; ++i) out[i] = beta_c_[i];
    return;
  }
  beta_fn_(t, out);
}

void LinearAuxiliary::Bmat(double t, linalg::Matrix& out) const {
  if (constant_) {
    out = B_c_;
    return;
  }
  B_fn_(t, out);
}

void LinearAuxiliary::sigma(double t, linalg::Matrix& out) const {
  if (constant_) {
    out = sigma_c_;
    return;
  }
  sigma_fn_(t, out);
}

void LinearAuxiliary::atilde(double t, linalg::Matrix& out) const {
  if (constant_) {
    out = atilde_c_;
    return;
  }
  linalg::Matrix s;
  sigma_fn_(t, s);
  out = linalg::sandwich(s, linalg::Matrix::identity(s.cols));
}

void LinearAuxiliary::drift(double t, const double* x, double* out) const {
  if (constant_) {
    for (int i = 0; i < d_; ++i) out[i] = beta_c_[i];
    linalg::matvec_acc(B_c_, x, 1.0, out);
    return;
  }
  beta_fn_(t, out);
  linalg::Matrix B;
  B_fn_(t, B);
  linalg::matvec_acc(B, x, 1.0, out);
}

}  // namespace bridgesim
