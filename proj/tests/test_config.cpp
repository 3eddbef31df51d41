#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bridgesim/config.hpp"
#include "bridgesim/errors.hpp"
#include "bridgesim/models.hpp"
#include "bridgesim/wiener.hpp"

using namespace bridgesim;

namespace {

const std::vector<std::string> kBundled = {
    "brownian_bridge", "ou_bridge",  "cell_normal",      "cell_rare",
    "cell_multimodal", "fhn_normal", "fhn_rare",         "landmark_ellipse",
};

std::string config_path(const std::string& name) {
  return std::string(BRIDGESIM_CONFIG_DIR) + "/" + name + ".json";
}

bool mentions(const ValidationError& e, const std::string& field) {
  for (const auto& s : e.issues)
    if (s.find(field) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("every bundled config round-trips through the serializer") {
  for (const auto& name : kBundled) {
    CAPTURE(name);
    ExperimentConfig cfg = load_config(config_path(name));
    std::string s1 = serialize_config(cfg);
    ExperimentConfig cfg2 = parse_config_text(s1, name + " (reserialized)");
    std::string s2 = serialize_config(cfg2);
    CHECK(s1 == s2);
    CHECK(config_hash(cfg) == config_hash(cfg2));
  }
}

TEST_CASE("ou bridge config carries the documented parameters") {
  ExperimentConfig cfg = load_config(config_path("ou_bridge"));
  CHECK(cfg.model == "ou");
  CHECK(cfg.params.at("gamma") == 1.7);
  CHECK(cfg.params.at("mu") == 1.0);
  CHECK(cfg.params.at("sigma") == 0.3);
  REQUIRE(cfg.cond.v.values.size() == 1);
  CHECK(cfg.cond.v.values[0] == 1.0);
  CHECK(cfg.T == 1.0);
  CHECK(cfg.M == 500);
}

TEST_CASE("every bundled config builds a working system") {
  for (const auto& name : kBundled) {
    CAPTURE(name);
    ExperimentConfig cfg = load_config(config_path(name));
    GuidedSystem sys = make_system(cfg);
    CHECK(sys.dim() >= 1);
    CHECK(static_cast<int>(sys.x0().size()) == sys.dim());
    CHECK(sys.grid().M == cfg.M);
    NeuralDrift net = make_net(cfg, sys);
    CHECK(net.arch().in == 1 + sys.dim());
    CHECK(net.arch().out == sys.noise_dim());
    double wsum = 0.0;
    for (double p : net.params()) wsum += std::fabs(p);
    CHECK(wsum > 0.0);
  }
}

TEST_CASE("cell configs share the diffusion with their auxiliary") {
  ExperimentConfig cfg = load_config(config_path("cell_normal"));
  GuidedSystem sys = make_system(cfg);
  CHECK(sys.a_equals_atilde());
}

TEST_CASE("landmark ellipse materializes to landmark coordinates") {
  ExperimentConfig cfg = load_config(config_path("landmark_ellipse"));
  std::vector<double> x0 = cfg.x0.materialize();
  REQUIRE(x0.size() == 20);
  CHECK(x0[0] == doctest::Approx(1.0));
  CHECK(x0[1] == doctest::Approx(0.0));
  std::vector<double> v = cfg.cond.v.materialize();
  REQUIRE(v.size() == 20);
  CHECK(v[0] == doctest::Approx(0.6));
  GuidedSystem sys = make_system(cfg);
  CHECK(sys.dim() == 20);
  CHECK(sys.model().name() == "landmark");
}

TEST_CASE("validation reports every problem with its field path") {
  const std::string text = R"({
    "model": {"type": "nosuch"},
    "x0": [0.0],
    "conditioning": {"L": "identity", "v": [0.0], "eps2": -1.0},
    "grid": {"T": 1.0, "M": 0}
  })";
  try {
    parse_config_text(text, "inline");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues.size() >= 3);
    CHECK(mentions(e, "model.type"));
    CHECK(mentions(e, "conditioning.eps2"));
    CHECK(mentions(e, "grid.M"));
  }
}

TEST_CASE("wrong L column count names the conditioning matrix") {
  const std::string text = R"({
    "model": {"type": "cell", "sigma": 0.1},
    "x0": [0.0, 0.0],
    "conditioning": {"L": [[1.0, 0.0, 0.0]], "v": [1.0], "eps2": 1e-4},
    "grid": {"T": 1.0, "M": 10}
  })";
  try {
    parse_config_text(text, "inline");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "conditioning.L"));
  }
}

TEST_CASE("x0 dimension mismatch is caught") {
  const std::string text = R"({
    "model": {"type": "fhn", "chi": 0.1, "s": 0.0, "gamma": 1.5, "alpha": 0.8, "sigma": 0.3},
    "x0": [0.0],
    "conditioning": {"L": [[1.0, 0.0]], "v": [1.0], "eps2": 1e-4},
    "grid": {"T": 1.0, "M": 10}
  })";
  CHECK_THROWS_AS(parse_config_text(text, "inline"), ValidationError);
  try {
    parse_config_text(text, "inline");
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "x0"));
  }
}

TEST_CASE("unknown model parameter and activation are flagged") {
  const std::string text = R"({
    "model": {"type": "brownian", "gamma": 1.0, "sigma": 1.0, "rho": 2.0},
    "x0": [0.0],
    "conditioning": {"L": "identity", "v": [0.0], "eps2": 1e-4},
    "grid": {"T": 1.0, "M": 10},
    "net": {"hidden": [4], "activation": "swoosh"}
  })";
  try {
    parse_config_text(text, "inline");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "model.rho"));
    CHECK(mentions(e, "net.activation"));
  }
}

TEST_CASE("malformed json raises a parse error") {
  CHECK_THROWS_AS(parse_config_text("{ not json", "inline"), ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ParseError);
}

TEST_CASE("config hash tracks content") {
  ExperimentConfig a = load_config(config_path("brownian_bridge"));
  ExperimentConfig b = load_config(config_path("brownian_bridge"));
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 123;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("linear model requires and uses the auxiliary block") {
  const std::string bare = R"({
    "model": {"type": "linear"},
    "x0": [0.0],
    "conditioning": {"L": "identity", "v": [0.5], "eps2": 1e-4},
    "grid": {"T": 1.0, "M": 10}
  })";
  try {
    parse_config_text(bare, "inline");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "auxiliary"));
  }

  const std::string with_aux = R"({
    "model": {"type": "linear"},
    "x0": [0.0],
    "conditioning": {"L": "identity", "v": [0.5], "eps2": 1e-4},
    "grid": {"T": 1.0, "M": 10},
    "auxiliary": {"beta": [0.2], "B": [[-0.5]], "sigma": [[0.3]]}
  })";
  ExperimentConfig cfg = parse_config_text(with_aux, "inline");
  GuidedSystem sys = make_system(cfg);
  CHECK(sys.a_equals_atilde());
  Trajectory tr = sys.sample(sample_wiener(sys.grid(), sys.noise_dim(), 9, 0));
  CHECK(tr.log_psi == 0.0);
}

TEST_CASE("manifest lands in the output directory with the config hash") {
  ExperimentConfig cfg = load_config(config_path("brownian_bridge"));
  const std::string dir = "test_config_manifest_dir";
  write_manifest(dir, "train", cfg);
  std::ifstream in(dir + "/manifest.json");
  REQUIRE(in.good());
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("config_hash") != std::string::npos);
  CHECK(all.find("train") != std::string::npos);
  std::filesystem::remove_all(dir);
}
