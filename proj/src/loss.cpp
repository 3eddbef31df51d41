#include "bridgesim/loss.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "bridgesim/errors.hpp"
#include "bridgesim/parallel.hpp"

namespace bridgesim {

namespace {

bool all_finite(const double* x, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

}  // namespace

NeuralBridge::Workspace::Workspace(const GuidedSystem& sys, const NeuralDrift& net)
    : ws(sys) {
  const int d = sys.dim();
  const int dw = sys.noise_dim();
  const int M = sys.grid().M;
  sigma = linalg::Matrix(d, dw);
  states.resize(static_cast<size_t>(M + 1) * d);
  tape.resize(static_cast<size_t>(M) * net.tape_size());
  thetas.resize(static_cast<size_t>(M) * dw);
  inp.resize(1 + d);
  in_grad.resize(1 + d);
  mu.resize(d);
  cot_dt.resize(d);
  xbar.resize(d);
  xbar_new.resize(d);
  gbuf.resize(d);
  axb.resize(d);
  rbuf.resize(d);
  thbar.resize(dw);
  svec.resize(dw);
  scot.resize(dw);
  srbuf.resize(dw);
  mlp_scratch.resize(net.scratch_size());
}

NeuralBridge::NeuralBridge(const GuidedSystem& sys, const NeuralDrift& net)
    : sys_(sys), net_(net) {
  std::vector<std::string> issues;
  if (net_.arch().in != 1 + sys_.dim())
    issues.push_back("net: input width must be 1 + state dimension");
  if (net_.arch().out != sys_.noise_dim())
    issues.push_back("net: output width must equal the noise dimension");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  sigma_is_const_ = sys_.model().constant_diffusion();
  if (sigma_is_const_) {
    sigma_const_ = linalg::Matrix(sys_.dim(), sys_.noise_dim());
    sys_.model().diffusion(0.0, sys_.x0().data(), sigma_const_.a.data());
  }
}

bool NeuralBridge::try_sample(const WienerPath& w, Trajectory& traj,
                              Workspace& lws) const {
  const int d = sys_.dim();
  const int dw = sys_.noise_dim();
  const TimeGrid& grid = sys_.grid();
  if (w.dw != dw) throw ValidationError("wiener path noise dimension does not match model");
  if (w.grid.M != grid.M) throw ValidationError("wiener path grid does not match system");

  traj = Trajectory(grid, d);
  std::memcpy(traj.state(0), sys_.x0().data(), sizeof(double) * d);
  traj.log_psi = 0.0;
  traj.loss_integrand = 0.0;
  const double dt = grid.dt();
  const linalg::Matrix* sig = &sigma_const_;
  double* th = lws.thetas.data();  // one step reused

  for (int m = 0; m < grid.M; ++m) {
    const double* x = traj.state(m);
    double* xn = traj.state(m + 1);

    lws.inp[0] = grid.t(m) / grid.T;
    std::memcpy(lws.inp.data() + 1, x, sizeof(double) * d);
    net_.forward(lws.inp.data(), th, lws.mlp_scratch.data());

    sys_.guided_drift(m, x, lws.mu.data(), lws.ws);
    const double g = sys_.g_functional(m, x, lws.ws);
    if (!sigma_is_const_) sig = &lws.ws.sigma;  // filled by the evaluators above

    double ss = 0.0;
    for (int j = 0; j < dw; ++j) ss += th[j] * th[j];
    traj.log_psi += g * dt;
    traj.loss_integrand += (0.5 * ss - g) * dt;

    const double* dW = w.step(m);
    for (int i = 0; i < d; ++i) {
      const double sth = linalg::dot(sig->row(i), th, dw);
      double v = x[i] + (lws.mu[i] + sth) * dt;
      v += linalg::dot(sig->row(i), dW, dw);
      xn[i] = v;
    }
    if (!all_finite(xn, d) || !std::isfinite(traj.log_psi) ||
        !std::isfinite(traj.loss_integrand))
      return false;
  }
  return true;
}

Trajectory NeuralBridge::sample(const WienerPath& w) const {
  Workspace lws(sys_, net_);
  Trajectory traj;
  if (!try_sample(w, traj, lws))
    throw NonFiniteState("neural bridge path left the finite range");
  return traj;
}

std::vector<Trajectory> NeuralBridge::sample_batch(int n_paths, uint64_t seed,
                                                   uint32_t base_index, bool parallel,
                                                   int* n_aborted) const {
  std::vector<Trajectory> out(n_paths);
  std::vector<int> bad(n_paths, 0);
  const int nthreads = parallel ? worker_count() : 1;
#pragma omp parallel num_threads(nthreads)
  {
    Workspace lws(sys_, net_);
#pragma omp for schedule(static)
    for (int i = 0; i < n_paths; ++i) {
      const WienerPath w = sample_wiener(sys_.grid(), sys_.noise_dim(), seed,
                                         base_index + static_cast<uint32_t>(i));
      if (!try_sample(w, out[i], lws)) bad[i] = 1;
    }
  }
  std::vector<Trajectory> kept;
  kept.reserve(n_paths);
  int aborted = 0;
  for (int i = 0; i < n_paths; ++i) {
    if (bad[i]) {
      ++aborted;
      continue;
    }
    kept.push_back(std::move(out[i]));
  }
  if (n_aborted) *n_aborted = aborted;
  if (kept.empty())
    throw BatchFailure("neural sample batch: every path left the finite range");
  return kept;
}

bool NeuralBridge::path_loss_grad(const WienerPath& w, Workspace& lws, double* loss,
                                  double* pgrad) const {
  const int d = sys_.dim();
  const int dw = sys_.noise_dim();
  const TimeGrid& grid = sys_.grid();
  if (w.dw != dw) throw ValidationError("wiener path noise dimension does not match model");
  if (w.grid.M != grid.M) throw ValidationError("wiener path grid does not match system");

  const double dt = grid.dt();
  const size_t tsz = net_.tape_size();
  const SdeModel& model = sys_.model();
  const BackwardOdeSolution& sol = sys_.odes();
  double* st = lws.states.data();
  std::memcpy(st, sys_.x0().data(), sizeof(double) * d);

  double lsum = 0.0;
  const linalg::Matrix* sig = &sigma_const_;
  for (int m = 0; m < grid.M; ++m) {
    const double* x = st + static_cast<size_t>(m) * d;
    double* xn = st + static_cast<size_t>(m + 1) * d;
    double* th = lws.thetas.data() + static_cast<size_t>(m) * dw;

    lws.inp[0] = grid.t(m) / grid.T;
    std::memcpy(lws.inp.data() + 1, x, sizeof(double) * d);
    net_.forward_tape(lws.inp.data(), lws.tape.data() + static_cast<size_t>(m) * tsz, th);

    sys_.guided_drift(m, x, lws.mu.data(), lws.ws);
    const double g = sys_.g_functional(m, x, lws.ws);
    if (!sigma_is_const_) sig = &lws.ws.sigma;

    double ss = 0.0;
    for (int j = 0; j < dw; ++j) ss += th[j] * th[j];
    lsum += (0.5 * ss - g) * dt;

    const double* dW = w.step(m);
    for (int i = 0; i < d; ++i) {
      const double sth = linalg::dot(sig->row(i), th, dw);
      double v = x[i] + (lws.mu[i] + sth) * dt;
      v += linalg::dot(sig->row(i), dW, dw);
      xn[i] = v;
    }
    if (!all_finite(xn, d) || !std::isfinite(lsum)) return false;
  }
  *loss = lsum;

  // adjoint sweep; xbar enters each step as d loss / d x_{m+1}
  std::fill(lws.xbar.begin(), lws.xbar.end(), 0.0);
  for (int m = grid.M - 1; m >= 0; --m) {
    const double* x = st + static_cast<size_t>(m) * d;
    const double t = grid.t(m);
    const double* th = lws.thetas.data() + static_cast<size_t>(m) * dw;
    const double* dW = w.step(m);

    if (!sigma_is_const_) {
      model.diffusion(t, x, lws.sigma.a.data());
      sig = &lws.sigma;
    }

    // cotangent on theta: the running cost plus the drift contribution
    for (int j = 0; j < dw; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += sig->at(i, j) * lws.xbar[i];
      lws.svec[j] = s;
      lws.thbar[j] = dt * (th[j] + s);
    }
    net_.backward_tape(lws.tape.data() + static_cast<size_t>(m) * tsz, lws.thbar.data(),
                       pgrad, lws.in_grad.data(), lws.mlp_scratch.data());

    for (int i = 0; i < d; ++i) {
      lws.xbar_new[i] = lws.xbar[i] + lws.in_grad[1 + i];
      lws.cot_dt[i] = dt * lws.xbar[i];
    }
    model.drift_vjp(t, x, lws.cot_dt.data(), lws.xbar_new.data());

    // a r~ term: -H (a xbar) dt plus the state dependence of a itself
    sys_.apply_a(m, x, lws.xbar.data(), lws.axb.data(), lws.ws);
    linalg::matvec_acc(sol.Htilde[m], lws.axb.data(), -dt, lws.xbar_new.data());
    if (!sigma_is_const_) {
      sys_.guiding_score(m, x, lws.rbuf.data());
      for (int j = 0; j < dw; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += sig->at(i, j) * lws.rbuf[i];
        lws.srbuf[j] = s;
        lws.scot[j] = dt * lws.svec[j];
      }
      model.diffusion_vjp(t, x, lws.srbuf.data(), lws.cot_dt.data(), lws.xbar_new.data());
      model.diffusion_vjp(t, x, lws.scot.data(), lws.rbuf.data(), lws.xbar_new.data());
      model.diffusion_vjp(t, x, th, lws.cot_dt.data(), lws.xbar_new.data());
      model.diffusion_vjp(t, x, dW, lws.xbar.data(), lws.xbar_new.data());
    }

    sys_.g_gradient(m, x, lws.gbuf.data(), lws.ws);
    for (int i = 0; i < d; ++i) lws.xbar_new[i] -= dt * lws.gbuf[i];
    std::swap(lws.xbar, lws.xbar_new);
  }
  return true;
}

LossResult NeuralBridge::loss_and_grad(const std::vector<WienerPath>& batch,
                                       bool parallel) const {
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw ValidationError("loss_and_grad: empty batch");
  const size_t np = net_.n_params();
  std::vector<double> losses(n, 0.0);
  std::vector<double> grads(static_cast<size_t>(n) * np, 0.0);
  std::vector<int> bad(n, 0);
  const int nthreads = parallel ? worker_count() : 1;
#pragma omp parallel num_threads(nthreads)
  {
    Workspace lws(sys_, net_);
#pragma omp for schedule(static)
    for (int p = 0; p < n; ++p) {
      if (!path_loss_grad(batch[p], lws, &losses[p],
                          grads.data() + static_cast<size_t>(p) * np))
        bad[p] = 1;
    }
  }

  LossResult res;
  res.batch_size = n;
  res.grad.assign(np, 0.0);
  double lsum = 0.0;
  for (int p = 0; p < n; ++p) {
    if (bad[p]) continue;
    ++res.survivors;
    lsum += losses[p];
    const double* g = grads.data() + static_cast<size_t>(p) * np;
    for (size_t k = 0; k < np; ++k) res.grad[k] += g[k];
  }
  if (res.survivors == 0)
    throw BatchFailure("loss_and_grad: every path in the batch left the finite range");
  res.loss = lsum / res.survivors;
  const double inv = 1.0 / res.survivors;
  for (size_t k = 0; k < np; ++k) res.grad[k] *= inv;
  return res;
}

}  // namespace bridgesim
