#include "bridgesim/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace bridgesim {

namespace {

struct BrownianBridgeSde : SdeModel {
  double T, v, sigma;
  BrownianBridgeSde(double T_, double v_, double s_) : T(T_), v(v_), sigma(s_) {}
  std::string name() const override { return "brownian-bridge"; }
  int dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  void drift(double t, const double* x, double* out) const override {
    out[0] = (v - x[0]) / (T - t);
  }
  void diffusion(double, const double*, double* out) const override { out[0] = sigma; }
  void drift_vjp(double t, const double*, const double* cot, double* xbar) const override {
    xbar[0] += -cot[0] / (T - t);
  }
};

struct OuBridgeSde : SdeModel {
  double T, v, gamma, mu, sigma;
  OuBridgeSde(double T_, double v_, double g, double m, double s)
      : T(T_), v(v_), gamma(g), mu(m), sigma(s) {}
  std::string name() const override { return "ou-bridge"; }
  int dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  double pull(double t, double x) const {
    const double tau = T - t;
    const double e = std::exp(-gamma * tau);
    const double den = -std::expm1(-2.0 * gamma * tau);  // 1 - e^{-2 gamma tau}
    return 2.0 * gamma * e / den * ((v - mu) - e * (x - mu));
  }
  void drift(double t, const double* x, double* out) const override {
    out[0] = gamma * (mu - x[0]) + pull(t, x[0]);
  }
  void diffusion(double, const double*, double* out) const override { out[0] = sigma; }
  void drift_vjp(double t, const double*, const double* cot, double* xbar) const override {
    const double tau = T - t;
    const double e = std::exp(-gamma * tau);
    const double den = -std::expm1(-2.0 * gamma * tau);
    xbar[0] += (-gamma - 2.0 * gamma * e * e / den) * cot[0];
  }
};

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

}  // namespace

std::unique_ptr<SdeModel> analytic_bridge(const SdeModel& model, double T, double v) {
  if (const auto* bm = dynamic_cast<const BrownianModel*>(&model))
    return std::make_unique<BrownianBridgeSde>(T, v, bm->sigma());
  if (const auto* ou = dynamic_cast<const OuModel*>(&model))
    return std::make_unique<OuBridgeSde>(T, v, ou->gamma(), ou->mu(), ou->sigma());
  throw std::invalid_argument("analytic_bridge: no closed form for model " + model.name());
}

OptimalControl optimal_control(const SdeModel& model, double T, double x0, double v,
                               double eps2) {
  OptimalControl oc;
  if (const auto* bm = dynamic_cast<const BrownianModel*>(&model)) {
    const double gamma = bm->gamma();
    const double sigma = bm->sigma();
    oc.theta = [gamma, sigma](double, double) { return -gamma / sigma; };
    const double var = sigma * sigma * T + eps2;
    oc.bound = log_normal_pdf(v, x0, var) - log_normal_pdf(v, x0 + gamma * T, var);
    return oc;
  }
  if (const auto* ou = dynamic_cast<const OuModel*>(&model)) {
    const double g = ou->gamma(), mu = ou->mu(), s = ou->sigma();
    oc.theta = [g, mu, s, T, v](double t, double x) {
      const double tau = T - t;
      const double e = std::exp(-g * tau);
      const double den = -std::expm1(-2.0 * g * tau);
      // exact pull minus the Brownian-auxiliary pull, scaled back by sigma
      return 2.0 * g * e / (s * den) * ((v - mu) - e * (x - mu)) - (v - x) / (s * tau);
    };
    const double m0T = mu + (x0 - mu) * std::exp(-g * T);
    const double var = s * s / (2.0 * g) * (-std::expm1(-2.0 * g * T));
    oc.bound = log_normal_pdf(v, x0, s * s * T + eps2) - log_normal_pdf(v, m0T, var + eps2);
    return oc;
  }
  throw std::invalid_argument("optimal_control: no closed form for model " + model.name());
}

}  // namespace bridgesim
