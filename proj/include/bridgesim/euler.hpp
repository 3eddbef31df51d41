#pragma once

#include <cstdint>
#include <vector>

#include "bridgesim/sde_model.hpp"
#include "bridgesim/trajectory.hpp"
#include "bridgesim/wiener.hpp"

namespace bridgesim {

// x_{m+1} = x_m + b(t_m, x_m) dt + sigma(t_m, x_m) dW_m.
// Throws NonFiniteState as soon as a state stops being finite.
Trajectory euler_maruyama(const SdeModel& model, const std::vector<double>& x0,
                          const WienerPath& w);

// non-throwing variant; returns false and leaves traj truncated at the bad step
bool try_euler_maruyama(const SdeModel& model, const std::vector<double>& x0,
                        const WienerPath& w, Trajectory& traj);

// batch forward sampling, path i drawn with wiener index i. OpenMP over paths;
// identical output for any thread count (per-path RNG, ordered writes).
std::vector<Trajectory> sample_forward_batch(const SdeModel& model,
                                             const std::vector<double>& x0,
                                             const TimeGrid& grid, int n_paths,
                                             uint64_t seed, bool parallel = true);

}  // namespace bridgesim
