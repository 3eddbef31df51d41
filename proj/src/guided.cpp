#include "bridgesim/guided.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "bridgesim/errors.hpp"
#include "bridgesim/linalg.hpp"
#include "bridgesim/parallel.hpp"

namespace bridgesim {

namespace {

bool all_finite(const double* x, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

// sigma (d x dw) applied as sigma sigma^T vec
void apply_ssT(const linalg::Matrix& sigma, const double* vec, double* tmp_dw, double* out) {
  const int d = sigma.rows;
  const int dw = sigma.cols;
  for (int j = 0; j < dw; ++j) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += sigma.at(i, j) * vec[i];
    tmp_dw[j] = s;
  }
  for (int i = 0; i < d; ++i) out[i] = linalg::dot(sigma.row(i), tmp_dw, dw);
}

}  // namespace

GuidedSystem::Scratch::Scratch(const GuidedSystem& sys) {
  const int d = sys.dim();
  const int dw = sys.noise_dim();
  b.resize(d);
  btil.resize(d);
  r.resize(d);
  ar.resize(d);
  sr.resize(std::max(d, dw));
  tmp.resize(std::max(d, dw));
  sigma = linalg::Matrix(d, dw);
}

GuidedSystem::GuidedSystem(std::shared_ptr<const SdeModel> model, LinearAuxiliary aux,
                           ObservationScheme obs, TimeGrid grid, std::vector<double> x0)
    : model_(std::move(model)), aux_(std::move(aux)), obs_(std::move(obs)), grid_(grid),
      x0_(std::move(x0)) {
  const int d = model_->dim();
  const int dw = model_->noise_dim();
  std::vector<std::string> issues;
  if (obs_.state_dim() != d) issues.push_back("conditioning.L: columns must equal model dim");
  if (aux_.dim() != d) issues.push_back("auxiliary: dimension must equal model dim");
  if (aux_.noise_dim() != dw) issues.push_back("auxiliary: noise dimension must match model");
  if (static_cast<int>(x0_.size()) != d) issues.push_back("x0: length must equal model dim");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  sol_ = solve_backward_odes(aux_, obs_, grid_);

  sigma_is_const_ = model_->constant_diffusion();
  if (sigma_is_const_) {
    sigma_const_ = linalg::Matrix(d, dw);
    model_->diffusion(0.0, x0_.data(), sigma_const_.a.data());
  }
  if (aux_.is_constant()) Bt_const_ = linalg::transpose(aux_.B_c());

  a_eq_ = sigma_is_const_ && aux_.is_constant() && aux_.sigma_c().rows == d &&
          aux_.sigma_c().cols == dw && aux_.sigma_c().a == sigma_const_.a;

  // nearly noise-free full-state conditioning should use a matched terminal
  // diffusion; warn (only) when it does not
  bool full_state = obs_.obs_dim() == d;
  if (full_state) {
    const linalg::Matrix eye = linalg::Matrix::identity(d);
    full_state = linalg::frobenius_dist(obs_.L, eye) < 1e-12;
  }
  if (full_state) {
    double max_sig = 0.0;
    for (int i = 0; i < d; ++i) max_sig = std::max(max_sig, obs_.Sigma.at(i, i));
    if (max_sig < 1e-6) {
      linalg::Matrix a_model(d, d);
      {
        linalg::Matrix sig(d, dw);
        model_->diffusion(grid_.T, obs_.v.data(), sig.a.data());
        a_model = linalg::sandwich(sig, linalg::Matrix::identity(dw));
      }
      linalg::Matrix a_til(d, d);
      aux_.atilde(grid_.T, a_til);
      const double rel = linalg::frobenius_dist(a_model, a_til) /
                         (1e-300 + std::sqrt(linalg::dot(a_model.a.data(), a_model.a.data(),
                                                         static_cast<int>(a_model.a.size()))));
      if (rel > 1e-6) {
        mismatch_warning_ = true;
        std::fprintf(stderr,
                     "warning: auxiliary diffusion at t = T differs from the model's "
                     "(relative gap %.2e) under nearly noise-free full-state "
                     "conditioning; the weight may degenerate near the endpoint\n",
                     rel);
      }
    }
  }
}

void GuidedSystem::apply_a(int m, const double* x, const double* vec, double* out,
                           Scratch& ws) const {
  if (sigma_is_const_) {
    apply_ssT(sigma_const_, vec, ws.tmp.data(), out);
    return;
  }
  model_->diffusion(grid_.t(m), x, ws.sigma.a.data());
  apply_ssT(ws.sigma, vec, ws.tmp.data(), out);
}

void GuidedSystem::guided_drift(int m, const double* x, double* out, Scratch& ws) const {
  const int d = dim();
  const double t = grid_.t(m);
  model_->drift(t, x, ws.b.data());
  sol_.guiding_score(m, x, ws.r.data());
  apply_a(m, x, ws.r.data(), ws.ar.data(), ws);
  for (int i = 0; i < d; ++i) out[i] = ws.b[i] + ws.ar[i];
}

double GuidedSystem::g_functional(int m, const double* x, Scratch& ws) const {
  model_->drift(grid_.t(m), x, ws.b.data());
  sol_.guiding_score(m, x, ws.r.data());
  if (!sigma_is_const_ && !a_eq_) model_->diffusion(grid_.t(m), x, ws.sigma.a.data());
  return g_from_parts(m, x, ws);
}

double GuidedSystem::g_from_parts(int m, const double* x, Scratch& ws) const {
  const int d = dim();
  const double t = grid_.t(m);
  aux_.drift(t, x, ws.btil.data());
  double g = 0.0;
  for (int i = 0; i < d; ++i) g += (ws.b[i] - ws.btil[i]) * ws.r[i];
  if (a_eq_) return g;

  // - 1/2 tr((a - a~) H) + 1/2 (|sigma^T r|^2 - |sigma~^T r|^2)
  const linalg::Matrix& H = sol_.Htilde[m];
  const linalg::Matrix* sig = sigma_is_const_ ? &sigma_const_ : &ws.sigma;
  double tr_aH = 0.0;
  for (int c = 0; c < sig->cols; ++c) {
    for (int i = 0; i < d; ++i) {
      double hs = 0.0;
      for (int j = 0; j < d; ++j) hs += H.at(i, j) * sig->at(j, c);
      tr_aH += sig->at(i, c) * hs;
    }
  }
  g -= 0.5 * (tr_aH - sol_.tr_atilde_H[m]);

  double q_a = 0.0;
  for (int c = 0; c < sig->cols; ++c) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += sig->at(i, c) * ws.r[i];
    q_a += s * s;
  }
  const linalg::Matrix& st = sol_.sigma_tilde[m];
  double q_at = 0.0;
  for (int c = 0; c < st.cols; ++c) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += st.at(i, c) * ws.r[i];
    q_at += s * s;
  }
  g += 0.5 * (q_a - q_at);
  return g;
}

void GuidedSystem::g_gradient(int m, const double* x, double* out, Scratch& ws) const {
  const int d = dim();
  const double t = grid_.t(m);
  model_->drift(t, x, ws.b.data());
  aux_.drift(t, x, ws.btil.data());
  sol_.guiding_score(m, x, ws.r.data());
  const linalg::Matrix& H = sol_.Htilde[m];

  // (J_b - B~)^T r
  std::memset(out, 0, sizeof(double) * d);
  model_->drift_vjp(t, x, ws.r.data(), out);
  if (aux_.is_constant()) {
    linalg::matvec_acc(Bt_const_, ws.r.data(), -1.0, out);
  } else {
    linalg::Matrix B;
    aux_.Bmat(t, B);
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += B.at(i, j) * ws.r[i];
      out[j] -= s;
    }
  }

  // - H (b - b~ + (a - a~) r); apply_a scribbles on ws.tmp, so it runs first
  if (!a_eq_) {
    apply_a(m, x, ws.r.data(), ws.ar.data(), ws);
    const linalg::Matrix& st = sol_.sigma_tilde[m];
    std::vector<double> stw(st.cols);
    for (int c = 0; c < st.cols; ++c) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += st.at(i, c) * ws.r[i];
      stw[c] = s;
    }
    // ar := (a - a~) r
    for (int i = 0; i < d; ++i) ws.ar[i] -= linalg::dot(st.row(i), stw.data(), st.cols);
  }
  for (int i = 0; i < d; ++i) {
    ws.tmp[i] = ws.b[i] - ws.btil[i];
    if (!a_eq_) ws.tmp[i] += ws.ar[i];
  }
  linalg::matvec_acc(H, ws.tmp.data(), -1.0, out);

  // state-dependent diffusion contributes -1/2 d tr(a(x)(H - r r^T))/dx
  if (!sigma_is_const_) {
    linalg::Matrix S = H;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) S.at(i, j) -= ws.r[i] * ws.r[j];
    model_->a_trace_grad(t, x, S.a.data(), -0.5, out);
  }
}

void GuidedSystem::guided_drift(int m, const double* x, double* out) const {
  Scratch ws(*this);
  guided_drift(m, x, out, ws);
}
double GuidedSystem::g_functional(int m, const double* x) const {
  Scratch ws(*this);
  return g_functional(m, x, ws);
}
void GuidedSystem::g_gradient(int m, const double* x, double* out) const {
  Scratch ws(*this);
  g_gradient(m, x, out, ws);
}

bool GuidedSystem::try_sample(const WienerPath& w, Trajectory& traj) const {
  const int d = dim();
  const int dw = noise_dim();
  if (w.dw != dw) throw ValidationError("wiener path noise dimension does not match model");
  if (w.grid.M != grid_.M) throw ValidationError("wiener path grid does not match system");

  Scratch ws(*this);
  traj = Trajectory(grid_, d);
  std::memcpy(traj.state(0), x0_.data(), sizeof(double) * d);
  traj.log_psi = 0.0;
  const double dt = grid_.dt();
  const linalg::Matrix* sig = &sigma_const_;

  for (int m = 0; m < grid_.M; ++m) {
    const double* x = traj.state(m);
    double* xn = traj.state(m + 1);
    const double t = grid_.t(m);

    model_->drift(t, x, ws.b.data());
    sol_.guiding_score(m, x, ws.r.data());
    apply_a(m, x, ws.r.data(), ws.ar.data(), ws);
    if (!sigma_is_const_) sig = &ws.sigma;  // filled by apply_a

    traj.log_psi += g_from_parts(m, x, ws) * dt;

    const double* dW = w.step(m);
    for (int i = 0; i < d; ++i) {
      double v = x[i] + (ws.b[i] + ws.ar[i]) * dt;
      v += linalg::dot(sig->row(i), dW, dw);
      xn[i] = v;
    }
    if (!all_finite(xn, d) || !std::isfinite(traj.log_psi)) return false;
  }
  traj.loss_integrand = -traj.log_psi;
  return true;
}

Trajectory GuidedSystem::sample(const WienerPath& w) const {
  Trajectory traj;
  if (!try_sample(w, traj))
    throw NonFiniteState("guided sample left the finite range (model " + model_->name() +
                         ")");
  return traj;
}

std::vector<Trajectory> GuidedSystem::sample_batch(int n_paths, uint64_t seed,
                                                   bool parallel) const {
  std::vector<Trajectory> out(n_paths);
  std::vector<int> bad(n_paths, 0);
  const int nthreads = parallel ? worker_count() : 1;
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (int i = 0; i < n_paths; ++i) {
    const WienerPath w = sample_wiener(grid_, noise_dim(), seed, static_cast<uint32_t>(i));
    if (!try_sample(w, out[i])) bad[i] = 1;
  }
  for (int i = 0; i < n_paths; ++i)
    if (bad[i])
      throw NonFiniteState("guided batch: path " + std::to_string(i) +
                           " left the finite range");
  return out;
}

}  // namespace bridgesim
