#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "bridgesim/guided.hpp"
#include "bridgesim/mlp.hpp"

namespace bridgesim {

struct TrainConfig {
  int batch_size = 50;
  int iterations = 1000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 1.0;
  uint64_t seed = 0;
  enum class Schedule { kConstant, kCosine };
  Schedule schedule = Schedule::kConstant;

  void validate() const;  // throws ValidationError listing every problem
};

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// standard bias-corrected update; lr arrives post-schedule
void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& st, double lr, const TrainConfig& cfg);

// constant, or cosine decay lr/2 (1 + cos(pi k/K))
double scheduled_lr(const TrainConfig& cfg, int iter);

struct TrainTrace {
  std::vector<double> loss;       // per iteration, batch estimate
  std::vector<double> grad_norm;  // per iteration, before clipping
  double elapsed_s = 0.0;
  std::vector<double> final_params;
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  bool has_lower_bound = false;
};

using TrainCallback =
    std::function<void(int iter, double loss, double grad_norm, double elapsed_s)>;

// fresh Wiener batch per iteration (stream index k*N + j), then
// loss_and_grad -> clip -> adam; net is updated in place
TrainTrace train(const GuidedSystem& sys, NeuralDrift& net, const TrainConfig& cfg,
                 const TrainCallback& cb = nullptr);

}  // namespace bridgesim
