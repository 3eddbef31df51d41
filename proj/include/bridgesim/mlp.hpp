#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bridgesim {

enum class Activation { kTanh, kLipSwish };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);

// fully connected map (t/T, x) -> R^{d_w}; the final layer is squashed through
// cap*tanh(z/cap) so the learned drift stays bounded
struct MlpArchitecture {
  int in = 0;
  std::vector<int> hidden;
  int out = 0;
  Activation act = Activation::kLipSwish;
  double cap = 0.0;  // <= 0 picks the default 10*sqrt(out)

  std::vector<int> widths() const;
  int n_layers() const { return static_cast<int>(hidden.size()) + 1; }
  size_t n_params() const;
  double effective_cap() const;
  void validate() const;
};

class NeuralDrift {
 public:
  explicit NeuralDrift(MlpArchitecture arch);

  const MlpArchitecture& arch() const { return arch_; }
  size_t n_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases
  void init_params(uint64_t seed);

  size_t scratch_size() const { return 2 * static_cast<size_t>(maxw_); }
  size_t tape_size() const { return tape_size_; }

  void forward(const double* input, double* out, double* scratch) const;
  void forward(const double* input, double* out) const;
  void forward_tape(const double* input, double* tape, double* out) const;
  // accumulates into pgrad (n_params), writes d<cot,f>/d input into in_grad
  void backward_tape(const double* tape, const double* cot, double* pgrad,
                     double* in_grad, double* scratch) const;

  // n paths in lockstep, lane-major: inputs[k*n + lane]; per lane bitwise
  // identical to forward() (same per-neuron accumulation order)
  void forward_lanes(int n, const double* inputs, double* outs, double* scratch) const;
  size_t lanes_scratch_size(int n) const { return 2 * static_cast<size_t>(maxw_) * n; }

 private:
  MlpArchitecture arch_;
  std::vector<int> w_;        // layer widths, in first
  std::vector<size_t> off_;   // parameter offset per linear layer
  std::vector<double> params_;
  int maxw_ = 0;
  size_t tape_size_ = 0;
};

// scale to clip_norm when the l2 norm exceeds it
void clip_gradient(std::vector<double>& grad, double clip_norm);

void save_checkpoint(const std::string& path, const NeuralDrift& net, uint64_t seed);
NeuralDrift load_checkpoint(const std::string& path, uint64_t* seed_out = nullptr);

}  // namespace bridgesim
