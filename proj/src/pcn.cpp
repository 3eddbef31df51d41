#include "bridgesim/pcn.hpp"

#include <cmath>
#include <string>

#include "bridgesim/errors.hpp"

namespace bridgesim {

namespace {

void validate_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw ValidationError("pcn.eta: must lie in [0, 1]");
}

}  // namespace

PcnState pcn_init(const GuidedSystem& sys, double eta, uint64_t seed, uint32_t chain,
                  int max_attempts) {
  validate_eta(eta);
  PcnState st;
  st.eta = eta;
  for (int a = 0; a < max_attempts; ++a) {
    st.w = sample_wiener(sys.grid(), sys.noise_dim(), seed, static_cast<uint32_t>(a),
                         rng::stream_word(rng::kWiener, chain));
    if (sys.try_sample(st.w, st.traj)) return st;
  }
  throw NonFiniteState("pcn init: no finite path in " + std::to_string(max_attempts) +
                       " draws");
}

bool pcn_step(const GuidedSystem& sys, PcnState& st, uint64_t seed, uint32_t chain,
              uint32_t iter) {
  st.proposed += 1;
  const double eta = st.eta;
  const double mix = std::sqrt(1.0 - eta * eta);

  WienerPath prop = sample_wiener(sys.grid(), sys.noise_dim(), seed, iter,
                                  rng::stream_word(rng::kPcnInnovation, chain));
  for (size_t i = 0; i < prop.incr.size(); ++i)
    prop.incr[i] = eta * st.w.incr[i] + mix * prop.incr[i];

  Trajectory traj;
  if (!sys.try_sample(prop, traj)) return false;  // auto-reject

  const double log_a = traj.log_psi - st.traj.log_psi;
  double u;
  rng::fill_uniforms(seed, iter, 0, rng::stream_word(rng::kMetropolis, chain), &u, 1);
  if (!(log_a >= 0.0 || u < std::exp(log_a))) return false;

  st.w = std::move(prop);
  st.traj = std::move(traj);
  st.accepted += 1;
  return true;
}

PcnResult pcn_chain(const GuidedSystem& sys, double eta, long iters, long burn_in,
                    long thin, uint64_t seed, uint32_t chain,
                    const std::function<void(long, const Trajectory&)>& sink) {
  validate_eta(eta);
  std::vector<std::string> issues;
  if (iters < 1) issues.push_back("pcn.iters: must be >= 1");
  if (burn_in < 0 || burn_in >= iters)
    issues.push_back("pcn.burn_in: must lie in [0, iters)");
  if (thin < 1) issues.push_back("pcn.thin: must be >= 1");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  PcnState st = pcn_init(sys, eta, seed, chain);
  PcnResult res;
  long n_samples = 0;
  for (long i = 1; i <= iters; ++i) {
    pcn_step(sys, st, seed, chain, static_cast<uint32_t>(i));
    if (i > burn_in && (i - burn_in) % thin == 0) {
      if (sink)
        sink(n_samples, st.traj);
      else
        res.samples.push_back(st.traj);
      ++n_samples;
    }
  }
  res.accepted = st.accepted;
  res.proposed = st.proposed;
  res.acceptance = st.proposed > 0
                       ? static_cast<double>(st.accepted) / static_cast<double>(st.proposed)
                       : 0.0;
  return res;
}

}  // namespace bridgesim
