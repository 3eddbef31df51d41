#include "bridgesim/models.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bridgesim {

namespace {
// Hill terms for the cell switch: activation u and repression w share the
// half-saturation constant 2^-4
constexpr double kHillC = 0.0625;
inline double hill_u(double z) {
  const double z4 = z * z * z * z;
  return z4 / (kHillC + z4);
}
inline double hill_w(double z) {
  const double z4 = z * z * z * z;
  return kHillC / (kHillC + z4);
}
inline double hill_du(double z) {
  const double z4 = z * z * z * z;
  const double den = kHillC + z4;
  return 4.0 * kHillC * z * z * z / (den * den);
}
}  // namespace

BrownianModel::BrownianModel(double gamma, double sigma) : gamma_(gamma), sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("brownian: sigma must be positive");
}
void BrownianModel::drift(double, const double*, double* out) const { out[0] = gamma_; }
void BrownianModel::diffusion(double, const double*, double* out) const { out[0] = sigma_; }
void BrownianModel::drift_vjp(double, const double*, const double*, double*) const {}

OuModel::OuModel(double gamma, double mu, double sigma)
    : gamma_(gamma), mu_(mu), sigma_(sigma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ou: gamma must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("ou: sigma must be positive");
}
void OuModel::drift(double, const double* x, double* out) const {
  out[0] = gamma_ * (mu_ - x[0]);
}
void OuModel::diffusion(double, const double*, double* out) const { out[0] = sigma_; }
void OuModel::drift_vjp(double, const double*, const double* cot, double* xbar) const {
  xbar[0] -= gamma_ * cot[0];
}

CellModel::CellModel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("cell: sigma must be positive");
}
void CellModel::drift(double, const double* x, double* out) const {
  out[0] = hill_u(x[0]) + hill_w(x[1]) - x[0];
  out[1] = hill_u(x[1]) + hill_w(x[0]) - x[1];
}
void CellModel::diffusion(double, const double*, double* out) const {
  out[0] = sigma_;
  out[1] = 0.0;
  out[2] = 0.0;
  out[3] = sigma_;
}
void CellModel::drift_vjp(double, const double* x, const double* cot, double* xbar) const {
  const double d0 = hill_du(x[0]);
  const double d1 = hill_du(x[1]);
  // J = [[du(x0)-1, -du(x1)], [-du(x0), du(x1)-1]]
  xbar[0] += (d0 - 1.0) * cot[0] - d0 * cot[1];
  xbar[1] += -d1 * cot[0] + (d1 - 1.0) * cot[1];
}

FhnModel::FhnModel(double chi, double s, double gamma, double alpha, double sigma)
    : chi_(chi), s_(s), gamma_(gamma), alpha_(alpha), sigma_(sigma) {
  if (!(chi != 0.0)) throw std::invalid_argument("fhn: chi must be nonzero");
  if (!(sigma > 0.0)) throw std::invalid_argument("fhn: sigma must be positive");
}
void FhnModel::drift(double, const double* x, double* out) const {
  out[0] = (x[0] - x[0] * x[0] * x[0] - x[1] + s_) / chi_;
  out[1] = gamma_ * x[0] - x[1] + alpha_;
}
void FhnModel::diffusion(double, const double*, double* out) const {
  out[0] = 0.0;
  out[1] = sigma_;
}
void FhnModel::drift_vjp(double, const double* x, const double* cot, double* xbar) const {
  xbar[0] += (1.0 - 3.0 * x[0] * x[0]) / chi_ * cot[0] + gamma_ * cot[1];
  xbar[1] += -1.0 / chi_ * cot[0] - cot[1];
}

LandmarkModel::LandmarkModel(int n, int space_dim, double alpha, double kappa)
    : n_(n), p_(space_dim), alpha_(alpha), kappa_(kappa) {
  if (n < 2) throw std::invalid_argument("landmark: need at least 2 landmarks");
  if (space_dim < 1) throw std::invalid_argument("landmark: space_dim must be >= 1");
  if (!(alpha > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("landmark: alpha and kappa must be positive");
}

double LandmarkModel::kernel(const double* xi, const double* xj) const {
  double d2 = 0.0;
  for (int a = 0; a < p_; ++a) {
    const double dv = xi[a] - xj[a];
    d2 += dv * dv;
  }
  return 0.5 * alpha_ * std::exp(-d2 / (2.0 * kappa_ * kappa_));
}

void LandmarkModel::drift(double, const double*, double* out) const {
  std::memset(out, 0, sizeof(double) * static_cast<size_t>(dim()));
}
void LandmarkModel::drift_vjp(double, const double*, const double*, double*) const {}

void LandmarkModel::diffusion(double, const double* x, double* out) const {
  const int d = dim();
  std::memset(out, 0, sizeof(double) * static_cast<size_t>(d) * d);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j) {
      const double k = kernel(x + i * p_, x + j * p_);
      for (int a = 0; a < p_; ++a) {
        out[(i * p_ + a) * d + (j * p_ + a)] = k;
        out[(j * p_ + a) * d + (i * p_ + a)] = k;
      }
    }
}

void LandmarkModel::diffusion_vjp(double, const double* x, const double* w,
                                  const double* cot, double* xbar) const {
  // d<cot, Q(x) w>/dx, Q blocks k(x_i, x_j) I_p
  const double inv_k2 = 1.0 / (kappa_ * kappa_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j) {
      const double k = kernel(x + i * p_, x + j * p_);
      double cw = 0.0;  // <cot_i, w_j> + <cot_j, w_i>
      for (int a = 0; a < p_; ++a)
        cw += cot[i * p_ + a] * w[j * p_ + a] + cot[j * p_ + a] * w[i * p_ + a];
      for (int a = 0; a < p_; ++a) {
        const double g = k * (x[j * p_ + a] - x[i * p_ + a]) * inv_k2 * cw;
        xbar[i * p_ + a] += g;
        xbar[j * p_ + a] -= g;
      }
    }
}

void LandmarkModel::a_trace_grad(double, const double* x, const double* S, double coeff,
                                 double* xbar) const {
  // d tr(Q Q^T S)/dx = 2 <dQ, S Q>_F per coordinate, S symmetric
  const int d = dim();
  std::vector<double> Q(static_cast<size_t>(d) * d);
  diffusion(0.0, x, Q.data());
  std::vector<double> U(static_cast<size_t>(d) * d, 0.0);  // S Q
  for (int r = 0; r < d; ++r) {
    const double* srow = S + static_cast<size_t>(r) * d;
    double* urow = U.data() + static_cast<size_t>(r) * d;
    for (int k = 0; k < d; ++k) {
      const double sv = srow[k];
      if (sv == 0.0) continue;
      const double* qrow = Q.data() + static_cast<size_t>(k) * d;
      for (int c = 0; c < d; ++c) urow[c] += sv * qrow[c];
    }
  }
  // block traces T_ij = sum_a U[(i,a),(j,a)]
  std::vector<double> bt(static_cast<size_t>(n_) * n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int a = 0; a < p_; ++a) s += U[(i * p_ + a) * static_cast<size_t>(d) + j * p_ + a];
      bt[i * static_cast<size_t>(n_) + j] = s;
    }
  const double inv_k2 = 1.0 / (kappa_ * kappa_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j) {
      const double k = kernel(x + i * p_, x + j * p_);
      const double tsum = bt[i * static_cast<size_t>(n_) + j] + bt[j * static_cast<size_t>(n_) + i];
      for (int a = 0; a < p_; ++a) {
        const double g =
            coeff * 2.0 * k * (x[j * p_ + a] - x[i * p_ + a]) * inv_k2 * tsum;
        xbar[i * p_ + a] += g;
        xbar[j * p_ + a] -= g;
      }
    }
}

LinearSdeModel::LinearSdeModel(LinearAuxiliary aux, std::string label)
    : aux_(std::move(aux)), label_(std::move(label)) {}
void LinearSdeModel::drift(double t, const double* x, double* out) const {
  aux_.drift(t, x, out);
}
void LinearSdeModel::diffusion(double t, const double* x, double* out) const {
  if (aux_.is_constant()) {
    const auto& s = aux_.sigma_c();
    std::memcpy(out, s.a.data(), sizeof(double) * s.a.size());
    return;
  }
  linalg::Matrix s;
  aux_.sigma(t, s);
  std::memcpy(out, s.a.data(), sizeof(double) * s.a.size());
  (void)x;
}
void LinearSdeModel::drift_vjp(double t, const double* x, const double* cot,
                               double* xbar) const {
  (void)x;
  if (aux_.is_constant()) {
    const auto& B = aux_.B_c();
    for (int j = 0; j < B.cols; ++j) {
      double s = 0.0;
      for (int i = 0; i < B.rows; ++i) s += B.at(i, j) * cot[i];
      xbar[j] += s;
    }
    return;
  }
  linalg::Matrix B;
  aux_.Bmat(t, B);
  for (int j = 0; j < B.cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < B.rows; ++i) s += B.at(i, j) * cot[i];
    xbar[j] += s;
  }
}

LinearAuxiliary default_auxiliary(const SdeModel& model, const ObservationScheme& obs) {
  const int d = model.dim();
  if (obs.state_dim() != d)
    throw std::invalid_argument("default_auxiliary: observation does not match model dim");

  if (const auto* bm = dynamic_cast<const BrownianModel*>(&model)) {
    linalg::Matrix s(1, 1);
    s.at(0, 0) = bm->sigma();
    return LinearAuxiliary::constants({0.0}, linalg::Matrix(1, 1), s);
  }
  if (const auto* ou = dynamic_cast<const OuModel*>(&model)) {
    // scaled Brownian motion; the Taylor alternative is rarely worth the extra terms
    linalg::Matrix s(1, 1);
    s.at(0, 0) = ou->sigma();
    return LinearAuxiliary::constants({0.0}, linalg::Matrix(1, 1), s);
  }
  if (const auto* cm = dynamic_cast<const CellModel*>(&model)) {
    linalg::Matrix B(2, 2);
    B.at(0, 0) = -1.0;
    B.at(1, 1) = -1.0;
    linalg::Matrix s(2, 2);
    s.at(0, 0) = cm->sigma();
    s.at(1, 1) = cm->sigma();
    return LinearAuxiliary::constants({1.0, 1.0}, B, s);
  }
  if (const auto* fm = dynamic_cast<const FhnModel*>(&model)) {
    // first coordinate observed; expand -x^3 at the observed value:
    // -x^3 ~= 2 v^3 - 3 v^2 x
    if (obs.obs_dim() != 1 || obs.L.at(0, 0) != 1.0 || obs.L.at(0, 1) != 0.0)
      throw std::invalid_argument(
          "default_auxiliary: fhn expects observation of the first coordinate");
    const double v = obs.v[0];
    const double chi = fm->chi();
    linalg::Matrix B(2, 2);
    B.at(0, 0) = (1.0 - 3.0 * v * v) / chi;
    B.at(0, 1) = -1.0 / chi;
    B.at(1, 0) = fm->gamma();
    B.at(1, 1) = -1.0;
    linalg::Matrix s(2, 1);
    s.at(1, 0) = fm->sigma();
    return LinearAuxiliary::constants({(2.0 * v * v * v + fm->s()) / chi, fm->alpha()}, B, s);
  }
  if (const auto* lm = dynamic_cast<const LandmarkModel*>(&model)) {
    if (obs.obs_dim() != d)
      throw std::invalid_argument("default_auxiliary: landmark expects full observation");
    linalg::Matrix s(d, d);
    lm->diffusion(0.0, obs.v.data(), s.a.data());
    return LinearAuxiliary::constants(std::vector<double>(d, 0.0), linalg::Matrix(d, d), s);
  }
  if (const auto* lin = dynamic_cast<const LinearSdeModel*>(&model)) return lin->aux();
  throw std::invalid_argument("default_auxiliary: no linearization known for model " +
                              model.name());
}

std::vector<double> ellipse_landmarks(int n, double a, double b, double cx, double cy) {
  std::vector<double> x(static_cast<size_t>(n) * 2);
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * M_PI * i / n;
    x[2 * i] = cx + a * std::cos(phi);
    x[2 * i + 1] = cy + b * std::sin(phi);
  }
  return x;
}

}  // namespace bridgesim
