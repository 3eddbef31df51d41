#pragma once

#include <functional>
#include <memory>

#include "bridgesim/models.hpp"
#include "bridgesim/sde_model.hpp"

namespace bridgesim {

// Exact conditioned dynamics and the exact variational quantities exist for
// the scalar linear models only; anything else throws std::invalid_argument.

// SDE whose paths are distributed as the model conditioned on X_T = v
// (observation noise ignored; used as the reference sampler)
std::unique_ptr<SdeModel> analytic_bridge(const SdeModel& model, double T, double v);

struct OptimalControl {
  // the drift correction that makes the learned bridge exact
  std::function<double(double t, double x)> theta;
  // log htilde(0,x0) - log h(0,x0): what the trained loss converges to
  double bound = 0.0;
};

OptimalControl optimal_control(const SdeModel& model, double T, double x0, double v,
                               double eps2);

}  // namespace bridgesim
