#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bridgesim/guided.hpp"

namespace bridgesim {

// Metropolis over Wiener increments: propose w' = eta w + sqrt(1-eta^2) z,
// accept with min(1, exp(log_psi' - log_psi)). All randomness is addressed by
// (seed, chain, iteration), so a chain is a pure function of its inputs.
struct PcnState {
  WienerPath w;
  Trajectory traj;  // integration of w under the guided system
  double eta = 0.98;
  long accepted = 0;
  long proposed = 0;
};

// draws initial increments from the plain Wiener stream, skipping to the next
// index when a draw integrates to a non-finite path; throws NonFiniteState
// when max_attempts draws all fail
PcnState pcn_init(const GuidedSystem& sys, double eta, uint64_t seed,
                  uint32_t chain = 0, int max_attempts = 100);

// one proposal; non-finite integrations auto-reject. Returns acceptance.
bool pcn_step(const GuidedSystem& sys, PcnState& st, uint64_t seed, uint32_t chain,
              uint32_t iter);

struct PcnResult {
  std::vector<Trajectory> samples;
  long accepted = 0;
  long proposed = 0;
  double acceptance = 0.0;
};

// steps i = 1..iters, recording after step i when i > burn_in and
// (i - burn_in) % thin == 0; a sink receives each sample instead of the
// result vector when given
PcnResult pcn_chain(const GuidedSystem& sys, double eta, long iters, long burn_in,
                    long thin, uint64_t seed, uint32_t chain = 0,
                    const std::function<void(long, const Trajectory&)>& sink = nullptr);

}  // namespace bridgesim
