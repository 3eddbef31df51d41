// Timing harness: serial reference vs OpenMP batch kernels (must agree
// bitwise), plus per-path cost of forward / guided / neural sampling.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bridgesim/config.hpp"
#include "bridgesim/euler.hpp"
#include "bridgesim/loss.hpp"
#include "bridgesim/parallel.hpp"
#include "bridgesim/wiener.hpp"

using namespace bridgesim;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool same_states(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].states.size() != b[i].states.size()) return false;
    if (std::memcmp(a[i].states.data(), b[i].states.data(),
                    a[i].states.size() * sizeof(double)) != 0)
      return false;
    if (a[i].log_psi != b[i].log_psi) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path;
  int n_batch = 2000, n_loss = 100, n_per_path = 500;
  uint64_t seed = 42;
  CLI::App app{"bridgesim benchmarks"};
  app.add_option("--config", config_path, "experiment config")->required();
  app.add_option("--batch", n_batch, "paths per batch benchmark");
  app.add_option("--loss-batch", n_loss, "paths per loss benchmark");
  app.add_option("--per-path", n_per_path, "paths per per-path cost benchmark");
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg = load_config(config_path);
  GuidedSystem sys = make_system(cfg);
  NeuralDrift net = make_net(cfg, sys);
  NeuralBridge bridge(sys, net);
  std::printf("model %s, d=%d, M=%d, workers=%d\n", cfg.model.c_str(), sys.dim(),
              sys.grid().M, worker_count());

  // batch sampling: serial reference vs OpenMP
  double t0 = now_s();
  std::vector<Trajectory> ser = sys.sample_batch(n_batch, seed, /*parallel=*/false);
  double t1 = now_s();
  std::vector<Trajectory> par = sys.sample_batch(n_batch, seed, /*parallel=*/true);
  double t2 = now_s();
  std::printf("guided batch %d paths: serial %.3f s, parallel %.3f s, speedup %.2fx, "
              "bitwise %s\n",
              n_batch, t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
              same_states(ser, par) ? "identical" : "DIFFERENT");

  // loss + gradient: serial reference vs OpenMP
  std::vector<WienerPath> batch;
  batch.reserve(n_loss);
  for (int j = 0; j < n_loss; ++j)
    batch.push_back(sample_wiener(sys.grid(), sys.noise_dim(), seed,
                                  static_cast<uint32_t>(j)));
  t0 = now_s();
  LossResult ls = bridge.loss_and_grad(batch, /*parallel=*/false);
  t1 = now_s();
  LossResult lp = bridge.loss_and_grad(batch, /*parallel=*/true);
  t2 = now_s();
  const bool grads_same = ls.loss == lp.loss && ls.grad == lp.grad;
  std::printf("loss+grad %d paths: serial %.3f s, parallel %.3f s, speedup %.2fx, "
              "bitwise %s\n",
              n_loss, t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1),
              grads_same ? "identical" : "DIFFERENT");

  // per-path cost: unconditioned forward vs guided vs neural
  const std::vector<double> x0 = sys.x0();
  const SdeModel& model = sys.model();
  Trajectory traj(sys.grid(), sys.dim());
  t0 = now_s();
  int ok_fwd = 0;
  for (int i = 0; i < n_per_path; ++i) {
    WienerPath w = sample_wiener(sys.grid(), sys.noise_dim(), seed + 1,
                                 static_cast<uint32_t>(i));
    ok_fwd += try_euler_maruyama(model, x0, w, traj);
  }
  t1 = now_s();
  int ok_gd = 0;
  for (int i = 0; i < n_per_path; ++i) {
    WienerPath w = sample_wiener(sys.grid(), sys.noise_dim(), seed + 1,
                                 static_cast<uint32_t>(i));
    ok_gd += sys.try_sample(w, traj);
  }
  double t2b = now_s();
  NeuralBridge::Workspace ws(sys, net);
  int ok_nn = 0;
  for (int i = 0; i < n_per_path; ++i) {
    WienerPath w = sample_wiener(sys.grid(), sys.noise_dim(), seed + 1,
                                 static_cast<uint32_t>(i));
    ok_nn += bridge.try_sample(w, traj, ws);
  }
  double t3 = now_s();
  const double us_fwd = 1e6 * (t1 - t0) / n_per_path;
  const double us_gd = 1e6 * (t2b - t1) / n_per_path;
  const double us_nn = 1e6 * (t3 - t2b) / n_per_path;
  std::printf("per-path: forward %.1f us (%d ok), guided %.1f us (%d ok), "
              "neural %.1f us (%d ok)\n",
              us_fwd, ok_fwd, us_gd, ok_gd, us_nn, ok_nn);
  std::printf("ratios: guided/forward %.2fx, neural/forward %.2fx\n", us_gd / us_fwd,
              us_nn / us_fwd);
  return 0;
}
