#include "bridgesim/train.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bridgesim/analytic.hpp"
#include "bridgesim/errors.hpp"
#include "bridgesim/loss.hpp"

namespace bridgesim {

void TrainConfig::validate() const {
  std::vector<std::string> issues;
  if (batch_size < 1) issues.push_back("train.batch_size: must be >= 1");
  if (iterations < 1) issues.push_back("train.iterations: must be >= 1");
  if (!(learning_rate > 0.0)) issues.push_back("train.learning_rate: must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) issues.push_back("train.beta1: must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) issues.push_back("train.beta2: must lie in [0, 1)");
  if (!(adam_eps > 0.0)) issues.push_back("train.adam_eps: must be > 0");
  if (!(clip_norm > 0.0)) issues.push_back("train.clip_norm: must be > 0");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& st, double lr, const TrainConfig& cfg) {
  st.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  for (size_t k = 0; k < params.size(); ++k) {
    st.m[k] = cfg.beta1 * st.m[k] + (1.0 - cfg.beta1) * grad[k];
    st.v[k] = cfg.beta2 * st.v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
    const double mhat = st.m[k] / bc1;
    const double vhat = st.v[k] / bc2;
    params[k] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

double scheduled_lr(const TrainConfig& cfg, int iter) {
  if (cfg.schedule == TrainConfig::Schedule::kConstant) return cfg.learning_rate;
  const double frac = static_cast<double>(iter) / cfg.iterations;
  return 0.5 * cfg.learning_rate * (1.0 + std::cos(M_PI * frac));
}

TrainTrace train(const GuidedSystem& sys, NeuralDrift& net, const TrainConfig& cfg,
                 const TrainCallback& cb) {
  cfg.validate();
  NeuralBridge nb(sys, net);
  AdamState adam(net.n_params());

  TrainTrace trace;
  trace.loss.reserve(cfg.iterations);
  trace.grad_norm.reserve(cfg.iterations);

  // scalar linear models carry a closed-form optimum to converge against
  if (sys.dim() == 1 && sys.obs().obs_dim() == 1) {
    try {
      trace.lower_bound = optimal_control(sys.model(), sys.grid().T, sys.x0()[0],
                                          sys.obs().v[0], sys.obs().Sigma.at(0, 0))
                              .bound;
      trace.has_lower_bound = true;
    } catch (const std::invalid_argument&) {
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<WienerPath> batch(cfg.batch_size);
  for (int k = 0; k < cfg.iterations; ++k) {
    const uint32_t base = static_cast<uint32_t>(k) * static_cast<uint32_t>(cfg.batch_size);
    for (int j = 0; j < cfg.batch_size; ++j)
      batch[j] = sample_wiener(sys.grid(), sys.noise_dim(), cfg.seed,
                               base + static_cast<uint32_t>(j));

    LossResult res = nb.loss_and_grad(batch);
    const double gnorm =
        std::sqrt(linalg::dot(res.grad.data(), res.grad.data(),
                              static_cast<int>(res.grad.size())));
    clip_gradient(res.grad, cfg.clip_norm);
    adam_step(net.params(), res.grad, adam, scheduled_lr(cfg, k), cfg);

    trace.loss.push_back(res.loss);
    trace.grad_norm.push_back(gnorm);
    trace.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cb) cb(k, res.loss, gnorm, trace.elapsed_s);
  }
  trace.final_params = net.params();
  return trace;
}

}  // namespace bridgesim
