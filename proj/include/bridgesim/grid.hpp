#pragma once

#include <cmath>
#include <stdexcept>

namespace bridgesim {

// uniform grid 0 = t_0 < ... < t_M = T
struct TimeGrid {
  double T = 1.0;
  int M = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, int steps) : T(horizon), M(steps) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be positive");
    if (M < 1) throw std::invalid_argument("TimeGrid: M must be >= 1");
  }

  double dt() const { return T / M; }
  double t(int m) const { return m * T / M; }
  int nodes() const { return M + 1; }
};

}  // namespace bridgesim
