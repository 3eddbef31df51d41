#include "bridgesim/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "bridgesim/errors.hpp"
#include "bridgesim/fastmath.hpp"
#include "bridgesim/philox.hpp"

namespace bridgesim {

namespace {

constexpr double kInvLip = 1.0 / 1.1;

inline double act_eval(Activation act, double z) {
  if (act == Activation::kTanh) return fastmath::tanh(z);
  return z * fastmath::sigmoid(z) * kInvLip;
}

// derivative from the pre-activation (and the cached value for tanh)
inline double act_deriv(Activation act, double z, double a) {
  if (act == Activation::kTanh) return 1.0 - a * a;
  const double s = fastmath::sigmoid(z);
  return (s + z * s * (1.0 - s)) * kInvLip;
}

}  // namespace

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "lipswish") return Activation::kLipSwish;
  throw ValidationError({"unknown activation '" + name + "' (want tanh or lipswish)"});
}

const char* activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "lipswish";
}

std::vector<int> MlpArchitecture::widths() const {
  std::vector<int> w;
  w.reserve(hidden.size() + 2);
  w.push_back(in);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

size_t MlpArchitecture::n_params() const {
  const auto w = widths();
  size_t n = 0;
  for (size_t l = 0; l + 1 < w.size(); ++l)
    n += static_cast<size_t>(w[l + 1]) * w[l] + w[l + 1];
  return n;
}

double MlpArchitecture::effective_cap() const {
  return cap > 0.0 ? cap : 10.0 * std::sqrt(static_cast<double>(out));
}

void MlpArchitecture::validate() const {
  std::vector<std::string> issues;
  if (in < 1) issues.push_back("input dimension must be >= 1");
  if (out < 1) issues.push_back("output dimension must be >= 1");
  if (hidden.empty()) issues.push_back("at least one hidden layer required");
  if (hidden.size() > 62) issues.push_back("too many hidden layers (max 62)");
  for (int h : hidden)
    if (h < 1) {
      issues.push_back("hidden widths must be >= 1");
      break;
    }
  if (!std::isfinite(cap)) issues.push_back("cap must be finite");
  if (!issues.empty()) throw ValidationError(issues);
}

NeuralDrift::NeuralDrift(MlpArchitecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  w_ = arch_.widths();
  off_.resize(w_.size());
  size_t n = 0;
  for (size_t l = 0; l + 1 < w_.size(); ++l) {
    off_[l] = n;
    n += static_cast<size_t>(w_[l + 1]) * w_[l] + w_[l + 1];
  }
  off_.back() = n;
  params_.assign(n, 0.0);
  for (int w : w_) maxw_ = std::max(maxw_, w);
  tape_size_ = static_cast<size_t>(arch_.in) + 2 * static_cast<size_t>(arch_.out);
  for (int h : arch_.hidden) tape_size_ += 2 * static_cast<size_t>(h);
}

void NeuralDrift::init_params(uint64_t seed) {
  std::fill(params_.begin(), params_.end(), 0.0);
  std::vector<double> u;
  const int L = arch_.n_layers();
  for (int l = 0; l < L; ++l) {
    const int fan_in = w_[l], fan_out = w_[l + 1];
    const size_t nw = static_cast<size_t>(fan_in) * fan_out;
    const double lim = std::sqrt(6.0 / (fan_in + fan_out));
    u.resize(nw);
    rng::fill_uniforms(seed, static_cast<uint32_t>(l), 0,
                       rng::stream_word(rng::kWeightInit), u.data(), nw);
    double* W = params_.data() + off_[l];
    for (size_t i = 0; i < nw; ++i) W[i] = lim * (2.0 * u[i] - 1.0);
  }
}

void NeuralDrift::forward(const double* input, double* out, double* scratch) const {
  const int L = arch_.n_layers();
  double* a0 = scratch;
  double* a1 = scratch + maxw_;
  const double* a_prev = input;
  for (int l = 0; l < L; ++l) {
    const int ni = w_[l], no = w_[l + 1];
    const double* W = params_.data() + off_[l];
    const double* b = W + static_cast<size_t>(ni) * no;
    double* z = (l % 2 == 0) ? a0 : a1;
    for (int j = 0; j < no; ++j) {
      double acc = b[j];
      const double* wr = W + static_cast<size_t>(j) * ni;
      for (int k = 0; k < ni; ++k) acc += wr[k] * a_prev[k];
      z[j] = acc;
    }
    if (l + 1 < L) {
      for (int j = 0; j < no; ++j) z[j] = act_eval(arch_.act, z[j]);
      a_prev = z;
    } else {
      const double c = arch_.effective_cap(), ic = 1.0 / c;
      for (int j = 0; j < no; ++j) out[j] = c * fastmath::tanh(z[j] * ic);
    }
  }
}

void NeuralDrift::forward(const double* input, double* out) const {
  std::vector<double> scratch(scratch_size());
  forward(input, out, scratch.data());
}

void NeuralDrift::forward_tape(const double* input, double* tape, double* out) const {
  const int L = arch_.n_layers();
  std::memcpy(tape, input, sizeof(double) * arch_.in);
  const double* a_prev = tape;
  double* cur = tape + arch_.in;
  for (int l = 0; l < L; ++l) {
    const int ni = w_[l], no = w_[l + 1];
    const double* W = params_.data() + off_[l];
    const double* b = W + static_cast<size_t>(ni) * no;
    double* z = cur;
    for (int j = 0; j < no; ++j) {
      double acc = b[j];
      const double* wr = W + static_cast<size_t>(j) * ni;
      for (int k = 0; k < ni; ++k) acc += wr[k] * a_prev[k];
      z[j] = acc;
    }
    double* a = cur + no;
    if (l + 1 < L) {
      for (int j = 0; j < no; ++j) a[j] = act_eval(arch_.act, z[j]);
      a_prev = a;
    } else {
      const double c = arch_.effective_cap(), ic = 1.0 / c;
      for (int j = 0; j < no; ++j) a[j] = c * fastmath::tanh(z[j] * ic);
      std::memcpy(out, a, sizeof(double) * no);
    }
    cur = a + no;
  }
}

void NeuralDrift::backward_tape(const double* tape, const double* cot, double* pgrad,
                                double* in_grad, double* scratch) const {
  const int L = arch_.n_layers();
  double* d0 = scratch;
  double* d1 = scratch + maxw_;

  // offsets of (z, a) per layer inside the tape
  const double* z_at[64];
  const double* a_at[64];
  {
    const double* cur = tape + arch_.in;
    for (int l = 0; l < L; ++l) {
      const int no = w_[l + 1];
      z_at[l] = cur;
      a_at[l] = cur + no;
      cur += 2 * static_cast<size_t>(no);
    }
  }

  // squashing layer: dz = cot * (1 - (y/c)^2)
  {
    const int no = arch_.out;
    const double c = arch_.effective_cap(), ic = 1.0 / c;
    const double* y = a_at[L - 1];
    for (int j = 0; j < no; ++j) {
      const double th = y[j] * ic;
      d0[j] = cot[j] * (1.0 - th * th);
    }
  }

  double* dz = d0;
  double* da = d1;
  for (int l = L - 1; l >= 0; --l) {
    const int ni = w_[l], no = w_[l + 1];
    const double* W = params_.data() + off_[l];
    const double* a_prev = (l == 0) ? tape : a_at[l - 1];
    double* gW = pgrad + off_[l];
    double* gb = gW + static_cast<size_t>(ni) * no;
    for (int j = 0; j < no; ++j) {
      const double d = dz[j];
      double* gr = gW + static_cast<size_t>(j) * ni;
      for (int k = 0; k < ni; ++k) gr[k] += d * a_prev[k];
      gb[j] += d;
    }
    double* dprev = (l == 0) ? in_grad : da;
    for (int k = 0; k < ni; ++k) dprev[k] = 0.0;
    for (int j = 0; j < no; ++j) {
      const double d = dz[j];
      const double* wr = W + static_cast<size_t>(j) * ni;
      for (int k = 0; k < ni; ++k) dprev[k] += wr[k] * d;
    }
    if (l > 0) {
      const double* z = z_at[l - 1];
      const double* a = a_at[l - 1];
      for (int k = 0; k < ni; ++k) da[k] *= act_deriv(arch_.act, z[k], a[k]);
      std::swap(dz, da);
    }
  }
}

namespace {

// z[j*n+p] = bias[j] + sum_k W[j*ni+k] * a[k*n+p], k ascending per (j, p) so
// each lane reproduces the scalar accumulation order bit for bit. Full blocks
// keep a 4x16 accumulator tile in registers; the stores happen once per tile
// instead of once per k. Activation is a separate flat pass over the layer:
// fusing it into the tile stores costs registers and measures slower.
void dense_lanes(int no, int ni, int n, const double* __restrict W,
                 const double* __restrict bias, const double* __restrict a,
                 double* __restrict z) {
  constexpr int JB = 8, PB = 16;
  for (int p0 = 0; p0 < n; p0 += PB) {
    const int pb = (n - p0 < PB) ? n - p0 : PB;
    int j0 = 0;
    if (pb == PB) {
      for (; j0 + JB <= no; j0 += JB) {
        double acc[JB][PB];
        for (int j = 0; j < JB; ++j) {
          const double bj = bias[j0 + j];
#pragma omp simd
          for (int p = 0; p < PB; ++p) acc[j][p] = bj;
        }
        for (int k = 0; k < ni; ++k) {
          const double* ak = a + static_cast<size_t>(k) * n + p0;
          for (int j = 0; j < JB; ++j) {
            const double c = W[static_cast<size_t>(j0 + j) * ni + k];
#pragma omp simd
            for (int p = 0; p < PB; ++p) acc[j][p] += c * ak[p];
          }
        }
        for (int j = 0; j < JB; ++j) {
          double* zj = z + static_cast<size_t>(j0 + j) * n + p0;
#pragma omp simd
          for (int p = 0; p < PB; ++p) zj[p] = acc[j][p];
        }
      }
    }
    for (; j0 < no; ++j0) {
      double* zj = z + static_cast<size_t>(j0) * n + p0;
      const double bj = bias[j0];
#pragma omp simd
      for (int p = 0; p < pb; ++p) zj[p] = bj;
      const double* wr = W + static_cast<size_t>(j0) * ni;
      for (int k = 0; k < ni; ++k) {
        const double ck = wr[k];
        const double* ak = a + static_cast<size_t>(k) * n + p0;
#pragma omp simd
        for (int p = 0; p < pb; ++p) zj[p] += ck * ak[p];
      }
    }
  }
}

}  // namespace

void NeuralDrift::forward_lanes(int n, const double* inputs, double* outs,
                                double* scratch) const {
  const int L = arch_.n_layers();
  double* b0 = scratch;
  double* b1 = scratch + static_cast<size_t>(maxw_) * n;
  const double* a_prev = inputs;
  for (int l = 0; l < L; ++l) {
    const int ni = w_[l], no = w_[l + 1];
    const double* W = params_.data() + off_[l];
    const double* b = W + static_cast<size_t>(ni) * no;
    if (l + 1 < L) {
      double* z = (l % 2 == 0) ? b0 : b1;
      dense_lanes(no, ni, n, W, b, a_prev, z);
      const int64_t m = static_cast<int64_t>(no) * n;
      if (arch_.act == Activation::kTanh) {
#pragma omp simd
        for (int64_t i = 0; i < m; ++i) z[i] = fastmath::tanh(z[i]);
      } else {
#pragma omp simd
        for (int64_t i = 0; i < m; ++i)
          z[i] = z[i] * fastmath::sigmoid(z[i]) * kInvLip;
      }
      a_prev = z;
    } else {
      const double c = arch_.effective_cap(), ic = 1.0 / c;
      dense_lanes(no, ni, n, W, b, a_prev, outs);
      const int64_t m = static_cast<int64_t>(no) * n;
#pragma omp simd
      for (int64_t i = 0; i < m; ++i) outs[i] = c * fastmath::tanh(outs[i] * ic);
    }
  }
}

void clip_gradient(std::vector<double>& grad, double clip_norm) {
  double s = 0.0;
  for (double g : grad) s += g * g;
  const double nrm = std::sqrt(s);
  if (nrm > clip_norm) {
    const double scale = clip_norm / nrm;
    for (double& g : grad) g *= scale;
  }
}

void save_checkpoint(const std::string& path, const NeuralDrift& net, uint64_t seed) {
  nlohmann::json j;
  j["format"] = "bridgesim-net-1";
  j["in"] = net.arch().in;
  j["hidden"] = net.arch().hidden;
  j["out"] = net.arch().out;
  j["activation"] = activation_name(net.arch().act);
  j["cap"] = net.arch().cap;
  j["seed"] = seed;
  j["params"] = net.params();
  std::ofstream f(path);
  if (!f) throw ValidationError({"cannot open checkpoint file for writing: " + path});
  f << j.dump(2) << "\n";
}

NeuralDrift load_checkpoint(const std::string& path, uint64_t* seed_out) {
  std::ifstream f(path);
  if (!f) throw ValidationError({"cannot open checkpoint file: " + path});
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ValidationError({"malformed checkpoint json: " + std::string(e.what())});
  }
  if (j.value("format", "") != "bridgesim-net-1")
    throw ValidationError("unrecognized checkpoint format");
  MlpArchitecture arch;
  arch.in = j.at("in").get<int>();
  arch.hidden = j.at("hidden").get<std::vector<int>>();
  arch.out = j.at("out").get<int>();
  arch.act = activation_from_name(j.at("activation").get<std::string>());
  arch.cap = j.at("cap").get<double>();
  NeuralDrift net(arch);
  auto p = j.at("params").get<std::vector<double>>();
  if (p.size() != net.n_params())
    throw ValidationError("checkpoint parameter count does not match architecture");
  net.params() = std::move(p);
  if (seed_out) *seed_out = j.value("seed", uint64_t{0});
  return net;
}

}  // namespace bridgesim
