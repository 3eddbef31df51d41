#include "bridgesim/euler.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

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

bool try_euler_maruyama(const SdeModel& model, const std::vector<double>& x0,
                        const WienerPath& w, Trajectory& traj) {
  const int d = model.dim();
  const int dw = model.noise_dim();
  if (static_cast<int>(x0.size()) != d)
    throw std::invalid_argument("euler_maruyama: x0 size does not match model dim");
  if (w.dw != dw)
    throw std::invalid_argument("euler_maruyama: wiener noise dim does not match model");

  traj = Trajectory(w.grid, d);
  std::memcpy(traj.state(0), x0.data(), sizeof(double) * d);
  if (!all_finite(traj.state(0), d)) return false;

  const double dt = w.grid.dt();
  std::vector<double> b(d);
  std::vector<double> sig(static_cast<size_t>(d) * dw);
  const bool const_sigma = model.constant_diffusion();
  if (const_sigma) model.diffusion(0.0, x0.data(), sig.data());

  for (int m = 0; m < w.grid.M; ++m) {
    const double t = w.grid.t(m);
    const double* x = traj.state(m);
    double* xn = traj.state(m + 1);
    model.drift(t, x, b.data());
    if (!const_sigma) model.diffusion(t, x, sig.data());
    const double* dW = w.step(m);
    for (int i = 0; i < d; ++i) {
      double v = x[i] + b[i] * dt;
      const double* srow = sig.data() + static_cast<size_t>(i) * dw;
      for (int j = 0; j < dw; ++j) v += srow[j] * dW[j];
      xn[i] = v;
    }
    if (!all_finite(xn, d)) return false;
  }
  return true;
}

Trajectory euler_maruyama(const SdeModel& model, const std::vector<double>& x0,
                          const WienerPath& w) {
  Trajectory traj;
  if (!try_euler_maruyama(model, x0, w, traj))
    throw NonFiniteState("euler_maruyama: state left the finite range (model " +
                         model.name() + ")");
  return traj;
}

std::vector<Trajectory> sample_forward_batch(const SdeModel& model,
                                             const std::vector<double>& x0,
                                             const TimeGrid& grid, int n_paths,
                                             uint64_t seed, bool parallel) {
  std::vector<Trajectory> out(n_paths);
  const int dw = model.noise_dim();
  std::vector<int> bad(n_paths, 0);
  const int nthreads = parallel ? worker_count() : 1;
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (int i = 0; i < n_paths; ++i) {
    const WienerPath w = sample_wiener(grid, dw, seed, static_cast<uint32_t>(i));
    if (!try_euler_maruyama(model, x0, w, out[i])) bad[i] = 1;
  }
  for (int i = 0; i < n_paths; ++i)
    if (bad[i])
      throw NonFiniteState("sample_forward_batch: path " + std::to_string(i) +
                           " left the finite range");
  return out;
}

}  // namespace bridgesim
