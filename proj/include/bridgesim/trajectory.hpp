#pragma once

#include <string>
#include <vector>

#include "bridgesim/grid.hpp"

namespace bridgesim {

struct Trajectory {
  TimeGrid grid;
  int dim = 0;
  std::vector<double> states;  // (M+1) x dim
  double log_psi = 0.0;        // accumulated Girsanov weight exponent
  double loss_integrand = 0.0; // accumulated control cost (neural paths)

  Trajectory() = default;
  Trajectory(const TimeGrid& g, int d)
      : grid(g), dim(d), states(static_cast<size_t>(g.M + 1) * d, 0.0) {}

  double* state(int m) { return states.data() + static_cast<size_t>(m) * dim; }
  const double* state(int m) const { return states.data() + static_cast<size_t>(m) * dim; }
};

// header "t,x_0,...,x_{d-1}", 17 significant digits so values round-trip
std::string to_csv(const Trajectory& traj);
void write_csv(const Trajectory& traj, const std::string& path);
Trajectory read_csv(const std::string& path);

}  // namespace bridgesim
