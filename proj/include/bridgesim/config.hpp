#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bridgesim/guided.hpp"
#include "bridgesim/mlp.hpp"
#include "bridgesim/train.hpp"

namespace bridgesim {

// landmark positions laid out on an axis-aligned ellipse, materialized at load
struct EllipseSpec {
  int n = 0;
  double a = 1.0, b = 1.0, cx = 0.0, cy = 0.0;
};

// a state vector given literally or as an ellipse of 2-d landmarks
struct StateSpec {
  std::vector<double> values;
  std::optional<EllipseSpec> ellipse;

  std::vector<double> materialize() const;
  size_t size() const;
};

struct ConditioningConfig {
  bool identity = true;   // L = I_d
  linalg::Matrix L;       // used when !identity
  StateSpec v;
  double eps2 = 1e-6;     // Sigma = eps2 * I
};

struct NetConfig {
  std::vector<int> hidden = {32, 32, 32};
  std::string activation = "lipswish";
  double cap = 0.0;       // <= 0 picks the architecture default
  uint64_t init_seed = 1;
};

struct PcnConfig {
  double eta = 0.98;
  int iterations = 10000;
  int burn_in = 0;
  int thin = 1;
  int chains = 1;
};

// explicit constant-coefficient auxiliary, replacing the per-model default
struct AuxOverride {
  std::vector<double> beta;
  linalg::Matrix B;
  linalg::Matrix sigma;
};

struct ExperimentConfig {
  std::string model;                     // registry key
  std::map<std::string, double> params;  // flat numeric model parameters
  StateSpec x0;
  ConditioningConfig cond;
  double T = 1.0;
  int M = 100;
  std::optional<AuxOverride> aux;
  NetConfig net;
  TrainConfig train;
  PcnConfig pcn;
  uint64_t seed = 0;
  std::string output_dir = "out";
};

// throws ParseError on bad JSON, ValidationError listing every bad field
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

// canonical JSON rendering; load(serialize(cfg)) == cfg field for field
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical rendering
uint64_t config_hash(const ExperimentConfig& cfg);

std::shared_ptr<SdeModel> make_model(const ExperimentConfig& cfg);
ObservationScheme make_observation(const ExperimentConfig& cfg, int dim);
LinearAuxiliary make_auxiliary(const ExperimentConfig& cfg, const SdeModel& model,
                               const ObservationScheme& obs);
GuidedSystem make_system(const ExperimentConfig& cfg);
MlpArchitecture make_arch(const NetConfig& net, int dim, int noise_dim);
// fresh network with weights drawn from net.init_seed
NeuralDrift make_net(const ExperimentConfig& cfg, const GuidedSystem& sys);

// dir/manifest.json with the config hash and seed; creates dir if needed
void write_manifest(const std::string& dir, const std::string& subcommand,
                    const ExperimentConfig& cfg);

}  // namespace bridgesim
