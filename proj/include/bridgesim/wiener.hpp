#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/grid.hpp"
#include "bridgesim/philox.hpp"

namespace bridgesim {

// increments dW_m ~ N(0, dt I_{dw}), row m contiguous
struct WienerPath {
  TimeGrid grid;
  int dw = 1;
  std::vector<double> incr;  // grid.M x dw

  double* step(int m) { return incr.data() + static_cast<size_t>(m) * dw; }
  const double* step(int m) const { return incr.data() + static_cast<size_t>(m) * dw; }
};

// Deterministic in (seed, index, stream): each step draws its own counter
// block, so a path can be regenerated (or proposed against) per step.
inline WienerPath sample_wiener(const TimeGrid& grid, int dw, uint64_t seed,
                                uint32_t index = 0,
                                uint32_t stream = rng::stream_word(rng::kWiener)) {
  WienerPath w;
  w.grid = grid;
  w.dw = dw;
  w.incr.resize(static_cast<size_t>(grid.M) * dw);
  const double sdt = std::sqrt(grid.dt());
  for (int m = 0; m < grid.M; ++m) {
    double* row = w.step(m);
    rng::fill_normals(seed, static_cast<uint32_t>(m), index, stream, row, dw);
    for (int j = 0; j < dw; ++j) row[j] *= sdt;
  }
  return w;
}

}  // namespace bridgesim
