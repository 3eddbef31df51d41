#pragma once

#include <memory>
#include <vector>

#include "bridgesim/auxiliary.hpp"
#include "bridgesim/observation.hpp"
#include "bridgesim/sde_model.hpp"

namespace bridgesim {

// dx = gamma dt + sigma dW
class BrownianModel : public SdeModel {
 public:
  BrownianModel(double gamma, double sigma);
  std::string name() const override { return "brownian"; }
  int dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  double gamma() const { return gamma_; }
  double sigma() const { return sigma_; }

 private:
  double gamma_, sigma_;
};

// dx = gamma (mu - x) dt + sigma dW
class OuModel : public SdeModel {
 public:
  OuModel(double gamma, double mu, double sigma);
  std::string name() const override { return "ou"; }
  int dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  double gamma() const { return gamma_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

 private:
  double gamma_, mu_, sigma_;
};

// two-gene switch with Hill-type activation, isotropic noise
class CellModel : public SdeModel {
 public:
  explicit CellModel(double sigma = 0.1);
  std::string name() const override { return "cell"; }
  int dim() const override { return 2; }
  int noise_dim() const override { return 2; }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

// FitzHugh-Nagumo, noise only on the recovery coordinate (hypo-elliptic)
class FhnModel : public SdeModel {
 public:
  FhnModel(double chi, double s, double gamma, double alpha, double sigma);
  std::string name() const override { return "fhn"; }
  int dim() const override { return 2; }
  int noise_dim() const override { return 1; }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  double chi() const { return chi_; }
  double s() const { return s_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  double sigma() const { return sigma_; }

 private:
  double chi_, s_, gamma_, alpha_, sigma_;
};

// n landmarks in R^p driven by a Gaussian-kernel diffusion field, zero drift;
// state x = (x_1, ..., x_n) flattened, noise dimension = state dimension
class LandmarkModel : public SdeModel {
 public:
  LandmarkModel(int n, int space_dim, double alpha, double kappa);
  std::string name() const override { return "landmark"; }
  int dim() const override { return n_ * p_; }
  int noise_dim() const override { return n_ * p_; }
  bool constant_diffusion() const override { return false; }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  void diffusion_vjp(double t, const double* x, const double* w, const double* cot,
                     double* xbar) const override;
  void a_trace_grad(double t, const double* x, const double* S, double coeff,
                    double* xbar) const override;
  double kernel(const double* xi, const double* xj) const;
  int n_landmarks() const { return n_; }
  int space_dim() const { return p_; }
  double alpha() const { return alpha_; }
  double kappa() const { return kappa_; }

 private:
  int n_, p_;
  double alpha_, kappa_;
};

// linear dynamics borrowed from an auxiliary spec; drift/diffusion evaluate
// through the very same LinearAuxiliary code, so a guided system built from
// this model and that auxiliary cancels its weight exactly
class LinearSdeModel : public SdeModel {
 public:
  explicit LinearSdeModel(LinearAuxiliary aux, std::string label = "linear");
  std::string name() const override { return label_; }
  int dim() const override { return aux_.dim(); }
  int noise_dim() const override { return aux_.noise_dim(); }
  bool constant_diffusion() const override { return aux_.is_constant(); }
  void drift(double t, const double* x, double* out) const override;
  void diffusion(double t, const double* x, double* out) const override;
  void drift_vjp(double t, const double* x, const double* cot, double* xbar) const override;
  const LinearAuxiliary& aux() const { return aux_; }

 private:
  LinearAuxiliary aux_;
  std::string label_;
};

// the linearization each bundled model pairs with for conditioning; FHN uses a
// Taylor expansion at the observed value, landmarks freeze the kernel field at
// the target configuration
LinearAuxiliary default_auxiliary(const SdeModel& model, const ObservationScheme& obs);

// landmark positions on an axis-aligned ellipse at n equal angles
std::vector<double> ellipse_landmarks(int n, double a, double b, double cx = 0.0,
                                      double cy = 0.0);

}  // namespace bridgesim
