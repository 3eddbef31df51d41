#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "bridgesim/errors.hpp"
#include "bridgesim/guided.hpp"
#include "bridgesim/loss.hpp"
#include "bridgesim/models.hpp"
#include "bridgesim/train.hpp"

using namespace bridgesim;
using linalg::Matrix;

namespace {

GuidedSystem brownian_system(double gamma, double sigma, double T, int M, double x0,
                             double v, double eps2) {
  auto model = std::make_shared<BrownianModel>(gamma, sigma);
  Matrix s(1, 1);
  s.at(0, 0) = sigma;
  auto aux = LinearAuxiliary::constants({0.0}, Matrix(1, 1), s);
  return GuidedSystem(model, aux, ObservationScheme::full_state({v}, eps2),
                      TimeGrid(T, M), {x0});
}

NeuralDrift make_net(const GuidedSystem& sys, std::vector<int> hidden, uint64_t seed) {
  MlpArchitecture a;
  a.in = 1 + sys.dim();
  a.hidden = std::move(hidden);
  a.out = sys.noise_dim();
  a.act = Activation::kLipSwish;
  NeuralDrift net(a);
  if (seed != 0) net.init_params(seed);
  return net;
}

}  // namespace

TEST_CASE("one adam step from zero moments follows the closed form") {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  std::vector<double> p = {0.5, -0.3};
  const std::vector<double> g = {0.1, -0.2};
  AdamState st(2);
  adam_step(p, g, st, cfg.learning_rate, cfg);
  CHECK(st.t == 1);
  for (int k = 0; k < 2; ++k) {
    const double expect =
        (k == 0 ? 0.5 : -0.3) - 0.01 * g[k] / (std::fabs(g[k]) + cfg.adam_eps);
    CHECK(p[k] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zero gradient leaves parameters untouched") {
  TrainConfig cfg;
  std::vector<double> p = {1.0, -2.0, 0.25};
  const std::vector<double> before = p;
  const std::vector<double> g = {0.0, 0.0, 0.0};
  AdamState st(3);
  adam_step(p, g, st, cfg.learning_rate, cfg);
  adam_step(p, g, st, cfg.learning_rate, cfg);
  for (int k = 0; k < 3; ++k) CHECK(p[k] == before[k]);
}

TEST_CASE("learning-rate schedules") {
  TrainConfig cfg;
  cfg.learning_rate = 7e-4;
  cfg.iterations = 100;
  CHECK(scheduled_lr(cfg, 0) == cfg.learning_rate);
  CHECK(scheduled_lr(cfg, 99) == cfg.learning_rate);

  cfg.schedule = TrainConfig::Schedule::kCosine;
  CHECK(scheduled_lr(cfg, 0) == doctest::Approx(cfg.learning_rate));
  CHECK(scheduled_lr(cfg, 50) == doctest::Approx(0.5 * cfg.learning_rate));
  double prev = scheduled_lr(cfg, 0);
  for (int k = 10; k < 100; k += 10) {
    const double cur = scheduled_lr(cfg, k);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("config validation collects every problem") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  cfg.iterations = 0;
  cfg.learning_rate = -1.0;
  try {
    cfg.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.issues.size() == 3);
  }
}

TEST_CASE("single-iteration training is a complete trace") {
  GuidedSystem sys = brownian_system(1.0, 1.0, 1.0, 10, 0.0, 0.2, 1e-3);
  NeuralDrift net = make_net(sys, {4}, 3);
  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.iterations = 1;
  cfg.seed = 5;
  int calls = 0;
  const TrainTrace tr = train(sys, net, cfg, [&](int, double, double, double) { ++calls; });
  CHECK(tr.loss.size() == 1);
  CHECK(tr.grad_norm.size() == 1);
  CHECK(std::isfinite(tr.loss[0]));
  CHECK(tr.grad_norm[0] > 0.0);
  CHECK(tr.final_params == net.params());
  CHECK(calls == 1);
}

TEST_CASE("same seed and config reproduce the training bitwise") {
  GuidedSystem sys = brownian_system(1.0, 1.0, 1.0, 20, 0.0, 0.2, 1e-3);
  TrainConfig cfg;
  cfg.batch_size = 10;
  cfg.iterations = 40;
  cfg.seed = 11;

  NeuralDrift net1 = make_net(sys, {6}, 21);
  NeuralDrift net2 = make_net(sys, {6}, 21);
  const TrainTrace t1 = train(sys, net1, cfg);
  const TrainTrace t2 = train(sys, net2, cfg);
  REQUIRE(t1.loss.size() == t2.loss.size());
  for (size_t k = 0; k < t1.loss.size(); ++k) CHECK(t1.loss[k] == t2.loss[k]);
  REQUIRE(net1.params().size() == net2.params().size());
  for (size_t k = 0; k < net1.params().size(); ++k)
    CHECK(net1.params()[k] == net2.params()[k]);
}

TEST_CASE("recorded gradient norm is the raw batch gradient") {
  GuidedSystem sys = brownian_system(1.0, 1.0, 1.0, 20, 0.0, 0.2, 1e-3);
  NeuralDrift net = make_net(sys, {6}, 33);
  const std::vector<double> p0 = net.params();
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.iterations = 2;
  cfg.seed = 13;
  cfg.clip_norm = 1e-3;  // far below any raw norm here
  const TrainTrace tr = train(sys, net, cfg);

  NeuralDrift probe = make_net(sys, {6}, 33);
  REQUIRE(probe.params() == p0);
  NeuralBridge nb(sys, probe);
  std::vector<WienerPath> batch;
  for (int j = 0; j < 4; ++j)
    batch.push_back(sample_wiener(sys.grid(), 1, cfg.seed, static_cast<uint32_t>(j)));
  const LossResult res = nb.loss_and_grad(batch);
  const double raw = std::sqrt(
      linalg::dot(res.grad.data(), res.grad.data(), static_cast<int>(res.grad.size())));
  CHECK(tr.grad_norm[0] == raw);
  CHECK(tr.grad_norm[0] > cfg.clip_norm);
}

TEST_CASE("bounds are attached exactly for the scalar linear models") {
  {
    GuidedSystem sys = brownian_system(1.0, 1.0, 1.0, 10, 0.0, 0.0, 1e-5);
    NeuralDrift net = make_net(sys, {4}, 2);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 1;
    const TrainTrace tr = train(sys, net, cfg);
    CHECK(tr.has_lower_bound);
    CHECK(tr.lower_bound == doctest::Approx(0.5).epsilon(1e-4));
  }
  {
    auto model = std::make_shared<OuModel>(1.7, 1.0, 0.3);
    ObservationScheme obs = ObservationScheme::full_state({1.0}, 1e-5);
    GuidedSystem sys(model, default_auxiliary(*model, obs), obs, TimeGrid(1.0, 10),
                     {0.0});
    NeuralDrift net = make_net(sys, {4}, 2);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 1;
    const TrainTrace tr = train(sys, net, cfg);
    CHECK(tr.has_lower_bound);
    CHECK(tr.lower_bound == doctest::Approx(-5.532266).epsilon(1e-4));
  }
  {
    auto model = std::make_shared<CellModel>();
    ObservationScheme obs = ObservationScheme::full_state({1.0, -0.1}, 1e-2);
    GuidedSystem sys(model, default_auxiliary(*model, obs), obs, TimeGrid(1.0, 10),
                     {0.1, -0.1});
    NeuralDrift net = make_net(sys, {4}, 2);
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.iterations = 1;
    const TrainTrace tr = train(sys, net, cfg);
    CHECK(!tr.has_lower_bound);
  }
}

TEST_CASE("a short run closes most of the gap to the brownian bound") {
  GuidedSystem sys = brownian_system(1.0, 1.0, 1.0, 50, 0.0, 0.0, 1e-5);
  NeuralDrift net = make_net(sys, {8}, 1);
  TrainConfig cfg;
  cfg.batch_size = 50;
  cfg.iterations = 500;
  cfg.seed = 7;
  const TrainTrace tr = train(sys, net, cfg);
  REQUIRE(static_cast<int>(tr.loss.size()) == cfg.iterations);

  double head = 0.0, tail = 0.0, tail2 = 0.0;
  for (int k = 0; k < 100; ++k) head += tr.loss[k];
  for (int k = 400; k < 500; ++k) {
    tail += tr.loss[k];
    tail2 += tr.loss[k] * tr.loss[k];
  }
  head /= 100.0;
  tail /= 100.0;
  const double sd = std::sqrt(std::max(0.0, tail2 / 100.0 - tail * tail));
  const double se = sd / 10.0;

  CHECK(head > 0.8);              // starts near the uncorrected value 1.0
  CHECK(tail < head - 0.25);      // most of the gap to 0.5 is gone
  CHECK(tail >= tr.lower_bound - 3.0 * se);
}
