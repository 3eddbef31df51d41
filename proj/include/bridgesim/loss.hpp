#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/guided.hpp"
#include "bridgesim/mlp.hpp"

namespace bridgesim {

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d mean-loss / d params
  int survivors = 0;
  int batch_size = 0;
};

// Guided proposal with a learned drift correction,
//   dX = (b + a r~ + sigma theta) dt + sigma dW,
// and the control cost sum_m (1/2 |theta|^2 - G) dt along the path. The
// gradient runs back through the whole unrolled Euler recursion, so it carries
// the pathwise dependence of every state on the parameters.
class NeuralBridge {
 public:
  // arch must read (t/T, x) and emit a noise-space vector
  NeuralBridge(const GuidedSystem& sys, const NeuralDrift& net);

  const GuidedSystem& system() const { return sys_; }
  const NeuralDrift& net() const { return net_; }

  // per-worker buffers; tape spans the full unroll
  struct Workspace {
    GuidedSystem::Scratch ws;
    linalg::Matrix sigma;                       // refreshed per step when state dependent
    std::vector<double> states;                 // (M+1) x d, loss path only
    std::vector<double> tape;                   // M x tape_size
    std::vector<double> thetas;                 // M x dw
    std::vector<double> inp, in_grad;           // 1 + d
    std::vector<double> mu, cot_dt, xbar, xbar_new, gbuf, axb, rbuf;  // d
    std::vector<double> thbar, svec, scot, srbuf;                     // dw
    std::vector<double> mlp_scratch;
    Workspace(const GuidedSystem& sys, const NeuralDrift& net);
  };

  // log_psi accumulates sum G dt along the realized path and loss_integrand
  // the control cost; with zero parameters both agree bitwise with the plain
  // guided sampler
  bool try_sample(const WienerPath& w, Trajectory& traj, Workspace& lws) const;
  Trajectory sample(const WienerPath& w) const;  // throws NonFiniteState

  // aborted paths are dropped (order of the rest preserved); all-aborted is a
  // BatchFailure
  std::vector<Trajectory> sample_batch(int n_paths, uint64_t seed,
                                       uint32_t base_index = 0, bool parallel = true,
                                       int* n_aborted = nullptr) const;

  // one path: control cost into *loss, d loss / d params accumulated into
  // pgrad (n_params, caller-zeroed); false when the path left the finite range
  bool path_loss_grad(const WienerPath& w, Workspace& lws, double* loss,
                      double* pgrad) const;

  // mean over surviving paths; summation runs in path order so serial and
  // parallel results are identical
  LossResult loss_and_grad(const std::vector<WienerPath>& batch,
                           bool parallel = true) const;

 private:
  const GuidedSystem& sys_;
  const NeuralDrift& net_;
  linalg::Matrix sigma_const_;
  bool sigma_is_const_ = false;
};

}  // namespace bridgesim
