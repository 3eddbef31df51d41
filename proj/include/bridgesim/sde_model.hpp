#pragma once

#include <string>

namespace bridgesim {

// Time-homogeneous coefficients dX = b(t,X) dt + sigma(t,X) dW.
// The vjp hooks are what the unrolled-loss backward sweep needs; models with
// constant diffusion inherit the no-op versions.
class SdeModel {
 public:
  virtual ~SdeModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int noise_dim() const = 0;

  virtual void drift(double t, const double* x, double* out) const = 0;
  // row-major dim() x noise_dim()
  virtual void diffusion(double t, const double* x, double* out) const = 0;
  virtual bool constant_diffusion() const { return true; }

  // xbar += J_b(t,x)^T cot
  virtual void drift_vjp(double t, const double* x, const double* cot,
                         double* xbar) const = 0;

  // xbar += d<cot, sigma(t,x) w>/dx for fixed w; no-op for constant diffusion
  virtual void diffusion_vjp(double /*t*/, const double* /*x*/, const double* /*w*/,
                             const double* /*cot*/, double* /*xbar*/) const {}

  // xbar += coeff * d tr(a(t,x) S)/dx, S symmetric d x d; no-op for constant diffusion
  virtual void a_trace_grad(double /*t*/, const double* /*x*/, const double* /*S*/,
                            double /*coeff*/, double* /*xbar*/) const {}
};

}  // namespace bridgesim
