#include "bridgesim/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bridgesim/errors.hpp"
#include "bridgesim/models.hpp"

namespace bridgesim {

using json = nlohmann::ordered_json;

std::vector<double> StateSpec::materialize() const {
  if (ellipse) {
    const EllipseSpec& e = *ellipse;
    return ellipse_landmarks(e.n, e.a, e.b, e.cx, e.cy);
  }
  return values;
}

size_t StateSpec::size() const {
  if (ellipse) return static_cast<size_t>(ellipse->n) * 2;
  return values.size();
}

namespace {

// every reader records problems instead of throwing so one pass reports all
struct Issues {
  std::vector<std::string> list;
  void add(const std::string& path, const std::string& msg) {
    list.push_back(path + ": " + msg);
  }
};

const json* child(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

bool read_num(const json& j, const std::string& path, Issues& iss, double* out) {
  if (!j.is_number()) {
    iss.add(path, "expected a number");
    return false;
  }
  *out = j.get<double>();
  return true;
}

bool read_int(const json& j, const std::string& path, Issues& iss, long* out) {
  double v = 0.0;
  if (!read_num(j, path, iss, &v)) return false;
  if (std::fabs(v - std::round(v)) > 1e-9) {
    iss.add(path, "expected an integer");
    return false;
  }
  *out = std::lround(v);
  return true;
}

bool read_vec(const json& j, const std::string& path, Issues& iss,
              std::vector<double>* out) {
  if (!j.is_array()) {
    iss.add(path, "expected an array of numbers");
    return false;
  }
  out->clear();
  for (size_t i = 0; i < j.size(); ++i) {
    double v = 0.0;
    if (!read_num(j[i], path + "[" + std::to_string(i) + "]", iss, &v)) return false;
    out->push_back(v);
  }
  return true;
}

bool read_mat(const json& j, const std::string& path, Issues& iss, linalg::Matrix* out) {
  if (!j.is_array() || j.empty()) {
    iss.add(path, "expected a non-empty array of rows");
    return false;
  }
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < j.size(); ++i) {
    std::vector<double> r;
    if (!read_vec(j[i], path + "[" + std::to_string(i) + "]", iss, &r)) return false;
    if (!rows.empty() && r.size() != rows.front().size()) {
      iss.add(path, "rows have unequal lengths");
      return false;
    }
    rows.push_back(std::move(r));
  }
  *out = linalg::Matrix(static_cast<int>(rows.size()),
                        static_cast<int>(rows.front().size()));
  for (int i = 0; i < out->rows; ++i)
    for (int c = 0; c < out->cols; ++c) out->at(i, c) = rows[i][c];
  return true;
}

bool read_state_spec(const json& j, const std::string& path, Issues& iss,
                     StateSpec* out) {
  if (j.is_array()) return read_vec(j, path, iss, &out->values);
  if (const json* e = child(j, "ellipse")) {
    EllipseSpec es;
    long n = 0;
    const json* jn = child(*e, "n");
    if (!jn || !read_int(*jn, path + ".ellipse.n", iss, &n) || n < 3) {
      iss.add(path + ".ellipse.n", "expected an integer >= 3");
      return false;
    }
    es.n = static_cast<int>(n);
    auto opt = [&](const char* key, double def, double* slot) {
      *slot = def;
      if (const json* g = child(*e, key))
        read_num(*g, path + ".ellipse." + key, iss, slot);
    };
    opt("a", 1.0, &es.a);
    opt("b", 1.0, &es.b);
    opt("cx", 0.0, &es.cx);
    opt("cy", 0.0, &es.cy);
    out->ellipse = es;
    return true;
  }
  iss.add(path, "expected an array or {\"ellipse\": {...}}");
  return false;
}

struct ModelSpec {
  std::set<std::string> required, optional;
};

const std::map<std::string, ModelSpec>& model_registry() {
  static const std::map<std::string, ModelSpec> reg = {
      {"brownian", {{"gamma", "sigma"}, {}}},
      {"ou", {{"gamma", "mu", "sigma"}, {}}},
      {"cell", {{}, {"sigma"}}},
      {"fhn", {{"chi", "s", "gamma", "alpha", "sigma"}, {}}},
      {"landmark", {{"n", "alpha", "kappa"}, {"space_dim"}}},
      {"linear", {{}, {}}},
  };
  return reg;
}

double param(const std::map<std::string, double>& p, const std::string& key,
             double def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

// model dim known before construction so cross checks can run on a bad config
int nominal_dim(const ExperimentConfig& cfg) {
  if (cfg.model == "brownian" || cfg.model == "ou") return 1;
  if (cfg.model == "cell" || cfg.model == "fhn") return 2;
  if (cfg.model == "landmark")
    return static_cast<int>(param(cfg.params, "n", 0) *
                            param(cfg.params, "space_dim", 2));
  if (cfg.model == "linear" && cfg.aux) return cfg.aux->B.rows;
  return -1;
}

std::string schedule_name(TrainConfig::Schedule s) {
  return s == TrainConfig::Schedule::kCosine ? "cosine" : "constant";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  Issues iss;
  ExperimentConfig cfg;

  if (!j.is_object()) {
    throw ValidationError({origin + ": top level must be a JSON object"});
  }

  // model
  if (const json* jm = child(j, "model")) {
    if (const json* jt = child(*jm, "type")) {
      if (jt->is_string()) cfg.model = jt->get<std::string>();
      else iss.add("model.type", "expected a string");
    } else {
      iss.add("model.type", "missing");
    }
    if (jm->is_object()) {
      for (auto it = jm->begin(); it != jm->end(); ++it) {
        if (it.key() == "type") continue;
        double v = 0.0;
        if (read_num(it.value(), "model." + it.key(), iss, &v))
          cfg.params[it.key()] = v;
      }
    }
  } else {
    iss.add("model", "missing");
  }

  auto reg = model_registry().find(cfg.model);
  if (reg == model_registry().end()) {
    if (!cfg.model.empty()) iss.add("model.type", "unknown model '" + cfg.model + "'");
  } else {
    for (const auto& req : reg->second.required)
      if (!cfg.params.count(req)) iss.add("model." + req, "missing");
    for (const auto& [key, val] : cfg.params) {
      (void)val;
      if (!reg->second.required.count(key) && !reg->second.optional.count(key))
        iss.add("model." + key, "unknown parameter for '" + cfg.model + "'");
    }
  }

  // x0
  if (const json* jx = child(j, "x0")) read_state_spec(*jx, "x0", iss, &cfg.x0);
  else iss.add("x0", "missing");

  // conditioning
  if (const json* jc = child(j, "conditioning")) {
    if (const json* jl = child(*jc, "L")) {
      if (jl->is_string() && jl->get<std::string>() == "identity") {
        cfg.cond.identity = true;
      } else if (jl->is_array()) {
        cfg.cond.identity = false;
        read_mat(*jl, "conditioning.L", iss, &cfg.cond.L);
      } else {
        iss.add("conditioning.L", "expected \"identity\" or an array of rows");
      }
    }
    if (const json* jv = child(*jc, "v"))
      read_state_spec(*jv, "conditioning.v", iss, &cfg.cond.v);
    else iss.add("conditioning.v", "missing");
    if (const json* je = child(*jc, "eps2"))
      read_num(*je, "conditioning.eps2", iss, &cfg.cond.eps2);
  } else {
    iss.add("conditioning", "missing");
  }
  if (!(cfg.cond.eps2 > 0.0)) iss.add("conditioning.eps2", "must be > 0");

  // grid
  if (const json* jg = child(j, "grid")) {
    if (const json* jt = child(*jg, "T")) read_num(*jt, "grid.T", iss, &cfg.T);
    else iss.add("grid.T", "missing");
    if (const json* jm = child(*jg, "M")) {
      long m = 0;
      if (read_int(*jm, "grid.M", iss, &m)) cfg.M = static_cast<int>(m);
    } else {
      iss.add("grid.M", "missing");
    }
  } else {
    iss.add("grid", "missing");
  }
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) iss.add("grid.T", "must be > 0");
  if (cfg.M < 1) iss.add("grid.M", "must be >= 1");

  // optional auxiliary override
  if (const json* ja = child(j, "auxiliary")) {
    AuxOverride ao;
    bool ok = true;
    if (const json* jb = child(*ja, "beta"))
      ok &= read_vec(*jb, "auxiliary.beta", iss, &ao.beta);
    else { iss.add("auxiliary.beta", "missing"); ok = false; }
    if (const json* jB = child(*ja, "B"))
      ok &= read_mat(*jB, "auxiliary.B", iss, &ao.B);
    else { iss.add("auxiliary.B", "missing"); ok = false; }
    if (const json* js = child(*ja, "sigma"))
      ok &= read_mat(*js, "auxiliary.sigma", iss, &ao.sigma);
    else { iss.add("auxiliary.sigma", "missing"); ok = false; }
    if (ok) cfg.aux = std::move(ao);
  }
  if (cfg.model == "linear" && !cfg.aux)
    iss.add("auxiliary", "required for model 'linear'");

  // net
  if (const json* jn = child(j, "net")) {
    if (const json* jh = child(*jn, "hidden")) {
      std::vector<double> h;
      if (read_vec(*jh, "net.hidden", iss, &h)) {
        cfg.net.hidden.clear();
        for (double w : h) {
          if (w < 1.0 || std::fabs(w - std::round(w)) > 1e-9) {
            iss.add("net.hidden", "widths must be integers >= 1");
            break;
          }
          cfg.net.hidden.push_back(static_cast<int>(std::lround(w)));
        }
      }
    }
    if (const json* ja = child(*jn, "activation")) {
      if (ja->is_string()) cfg.net.activation = ja->get<std::string>();
      else iss.add("net.activation", "expected a string");
    }
    if (const json* jc = child(*jn, "cap"))
      read_num(*jc, "net.cap", iss, &cfg.net.cap);
    if (const json* js = child(*jn, "init_seed")) {
      long s = 0;
      if (read_int(*js, "net.init_seed", iss, &s) && s >= 0)
        cfg.net.init_seed = static_cast<uint64_t>(s);
      else iss.add("net.init_seed", "must be a non-negative integer");
    }
  }
  try {
    (void)activation_from_name(cfg.net.activation);
  } catch (const std::exception&) {
    iss.add("net.activation", "unknown activation '" + cfg.net.activation + "'");
  }

  // train
  if (const json* jt = child(j, "train")) {
    long l = 0;
    if (const json* f = child(*jt, "batch_size"))
      if (read_int(*f, "train.batch_size", iss, &l)) cfg.train.batch_size = static_cast<int>(l);
    if (const json* f = child(*jt, "iterations"))
      if (read_int(*f, "train.iterations", iss, &l)) cfg.train.iterations = static_cast<int>(l);
    if (const json* f = child(*jt, "learning_rate"))
      read_num(*f, "train.learning_rate", iss, &cfg.train.learning_rate);
    if (const json* f = child(*jt, "beta1")) read_num(*f, "train.beta1", iss, &cfg.train.beta1);
    if (const json* f = child(*jt, "beta2")) read_num(*f, "train.beta2", iss, &cfg.train.beta2);
    if (const json* f = child(*jt, "adam_eps"))
      read_num(*f, "train.adam_eps", iss, &cfg.train.adam_eps);
    if (const json* f = child(*jt, "clip_norm"))
      read_num(*f, "train.clip_norm", iss, &cfg.train.clip_norm);
    if (const json* f = child(*jt, "schedule")) {
      if (f->is_string() && f->get<std::string>() == "constant")
        cfg.train.schedule = TrainConfig::Schedule::kConstant;
      else if (f->is_string() && f->get<std::string>() == "cosine")
        cfg.train.schedule = TrainConfig::Schedule::kCosine;
      else
        iss.add("train.schedule", "expected \"constant\" or \"cosine\"");
    }
    if (const json* f = child(*jt, "seed")) {
      if (read_int(*f, "train.seed", iss, &l) && l >= 0)
        cfg.train.seed = static_cast<uint64_t>(l);
      else iss.add("train.seed", "must be a non-negative integer");
    }
  }
  try {
    cfg.train.validate();
  } catch (const ValidationError& e) {
    for (const auto& s : e.issues) iss.list.push_back(s);
  }

  // pcn
  if (const json* jp = child(j, "pcn")) {
    long l = 0;
    if (const json* f = child(*jp, "eta")) read_num(*f, "pcn.eta", iss, &cfg.pcn.eta);
    if (const json* f = child(*jp, "iterations"))
      if (read_int(*f, "pcn.iterations", iss, &l)) cfg.pcn.iterations = static_cast<int>(l);
    if (const json* f = child(*jp, "burn_in"))
      if (read_int(*f, "pcn.burn_in", iss, &l)) cfg.pcn.burn_in = static_cast<int>(l);
    if (const json* f = child(*jp, "thin"))
      if (read_int(*f, "pcn.thin", iss, &l)) cfg.pcn.thin = static_cast<int>(l);
    if (const json* f = child(*jp, "chains"))
      if (read_int(*f, "pcn.chains", iss, &l)) cfg.pcn.chains = static_cast<int>(l);
  }
  if (!(cfg.pcn.eta >= 0.0 && cfg.pcn.eta <= 1.0)) iss.add("pcn.eta", "must lie in [0, 1]");
  if (cfg.pcn.iterations < 1) iss.add("pcn.iterations", "must be >= 1");
  if (cfg.pcn.burn_in < 0 || cfg.pcn.burn_in >= cfg.pcn.iterations)
    iss.add("pcn.burn_in", "must lie in [0, iterations)");
  if (cfg.pcn.thin < 1) iss.add("pcn.thin", "must be >= 1");
  if (cfg.pcn.chains < 1) iss.add("pcn.chains", "must be >= 1");

  // top level scalars
  if (const json* js = child(j, "seed")) {
    long l = 0;
    if (read_int(*js, "seed", iss, &l) && l >= 0) cfg.seed = static_cast<uint64_t>(l);
    else iss.add("seed", "must be a non-negative integer");
  }
  if (const json* jo = child(j, "output_dir")) {
    if (jo->is_string()) cfg.output_dir = jo->get<std::string>();
    else iss.add("output_dir", "expected a string");
  }

  // cross checks need the model dimension
  const int dim = nominal_dim(cfg);
  if (dim > 0) {
    if (cfg.x0.size() > 0 && static_cast<int>(cfg.x0.size()) != dim)
      iss.add("x0", "expected " + std::to_string(dim) + " entries, got " +
                        std::to_string(cfg.x0.size()));
    const int obs_rows = cfg.cond.identity ? dim : cfg.cond.L.rows;
    if (!cfg.cond.identity && cfg.cond.L.cols != dim)
      iss.add("conditioning.L", "expected " + std::to_string(dim) + " columns, got " +
                                    std::to_string(cfg.cond.L.cols));
    if (cfg.cond.v.size() > 0 && static_cast<int>(cfg.cond.v.size()) != obs_rows)
      iss.add("conditioning.v", "expected " + std::to_string(obs_rows) +
                                    " entries, got " + std::to_string(cfg.cond.v.size()));
    if (cfg.aux) {
      if (static_cast<int>(cfg.aux->beta.size()) != dim)
        iss.add("auxiliary.beta", "expected " + std::to_string(dim) + " entries");
      if (cfg.aux->B.rows != dim || cfg.aux->B.cols != dim)
        iss.add("auxiliary.B", "expected a " + std::to_string(dim) + "x" +
                                   std::to_string(dim) + " matrix");
      if (cfg.aux->sigma.rows != dim)
        iss.add("auxiliary.sigma", "expected " + std::to_string(dim) + " rows");
    }
  }

  if (!iss.list.empty()) throw ValidationError(std::move(iss.list));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

json vec_json(const std::vector<double>& v) { return json(v); }

json mat_json(const linalg::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json r = json::array();
    for (int c = 0; c < m.cols; ++c) r.push_back(m.at(i, c));
    rows.push_back(std::move(r));
  }
  return rows;
}

json state_json(const StateSpec& s) {
  if (s.ellipse) {
    const EllipseSpec& e = *s.ellipse;
    return json{{"ellipse",
                 json{{"n", e.n}, {"a", e.a}, {"b", e.b}, {"cx", e.cx}, {"cy", e.cy}}}};
  }
  return vec_json(s.values);
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  json jm;
  jm["type"] = cfg.model;
  for (const auto& [key, val] : cfg.params) jm[key] = val;
  j["model"] = std::move(jm);
  j["x0"] = state_json(cfg.x0);
  json jc;
  jc["L"] = cfg.cond.identity ? json("identity") : mat_json(cfg.cond.L);
  jc["v"] = state_json(cfg.cond.v);
  jc["eps2"] = cfg.cond.eps2;
  j["conditioning"] = std::move(jc);
  j["grid"] = json{{"T", cfg.T}, {"M", cfg.M}};
  if (cfg.aux) {
    j["auxiliary"] = json{{"beta", vec_json(cfg.aux->beta)},
                          {"B", mat_json(cfg.aux->B)},
                          {"sigma", mat_json(cfg.aux->sigma)}};
  }
  j["net"] = json{{"hidden", cfg.net.hidden},
                  {"activation", cfg.net.activation},
                  {"cap", cfg.net.cap},
                  {"init_seed", cfg.net.init_seed}};
  j["train"] = json{{"batch_size", cfg.train.batch_size},
                    {"iterations", cfg.train.iterations},
                    {"learning_rate", cfg.train.learning_rate},
                    {"beta1", cfg.train.beta1},
                    {"beta2", cfg.train.beta2},
                    {"adam_eps", cfg.train.adam_eps},
                    {"clip_norm", cfg.train.clip_norm},
                    {"schedule", schedule_name(cfg.train.schedule)},
                    {"seed", cfg.train.seed}};
  j["pcn"] = json{{"eta", cfg.pcn.eta},
                  {"iterations", cfg.pcn.iterations},
                  {"burn_in", cfg.pcn.burn_in},
                  {"thin", cfg.pcn.thin},
                  {"chains", cfg.pcn.chains}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::shared_ptr<SdeModel> make_model(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  if (cfg.model == "brownian")
    return std::make_shared<BrownianModel>(param(p, "gamma", 0.0), param(p, "sigma", 1.0));
  if (cfg.model == "ou")
    return std::make_shared<OuModel>(param(p, "gamma", 1.0), param(p, "mu", 0.0),
                                     param(p, "sigma", 1.0));
  if (cfg.model == "cell") return std::make_shared<CellModel>(param(p, "sigma", 0.1));
  if (cfg.model == "fhn")
    return std::make_shared<FhnModel>(param(p, "chi", 0.1), param(p, "s", 0.0),
                                      param(p, "gamma", 1.5), param(p, "alpha", 0.8),
                                      param(p, "sigma", 0.3));
  if (cfg.model == "landmark")
    return std::make_shared<LandmarkModel>(static_cast<int>(param(p, "n", 0)),
                                           static_cast<int>(param(p, "space_dim", 2)),
                                           param(p, "alpha", 0.3), param(p, "kappa", 0.5));
  if (cfg.model == "linear") {
    if (!cfg.aux) throw ValidationError("model 'linear' needs an auxiliary block");
    return std::make_shared<LinearSdeModel>(
        LinearAuxiliary::constants(cfg.aux->beta, cfg.aux->B, cfg.aux->sigma));
  }
  throw ValidationError("model.type: unknown model '" + cfg.model + "'");
}

ObservationScheme make_observation(const ExperimentConfig& cfg, int dim) {
  std::vector<double> v = cfg.cond.v.materialize();
  if (cfg.cond.identity) return ObservationScheme::full_state(std::move(v), cfg.cond.eps2);
  linalg::Matrix Sigma(cfg.cond.L.rows, cfg.cond.L.rows);
  for (int i = 0; i < Sigma.rows; ++i) Sigma.at(i, i) = cfg.cond.eps2;
  (void)dim;
  return ObservationScheme(cfg.cond.L, std::move(Sigma), std::move(v));
}

LinearAuxiliary make_auxiliary(const ExperimentConfig& cfg, const SdeModel& model,
                               const ObservationScheme& obs) {
  if (cfg.aux)
    return LinearAuxiliary::constants(cfg.aux->beta, cfg.aux->B, cfg.aux->sigma);
  return default_auxiliary(model, obs);
}

GuidedSystem make_system(const ExperimentConfig& cfg) {
  auto model = make_model(cfg);
  ObservationScheme obs = make_observation(cfg, model->dim());
  LinearAuxiliary aux = make_auxiliary(cfg, *model, obs);
  return GuidedSystem(model, std::move(aux), std::move(obs), TimeGrid(cfg.T, cfg.M),
                      cfg.x0.materialize());
}

MlpArchitecture make_arch(const NetConfig& net, int dim, int noise_dim) {
  MlpArchitecture arch;
  arch.in = 1 + dim;
  arch.hidden = net.hidden;
  arch.out = noise_dim;
  arch.act = activation_from_name(net.activation);
  arch.cap = net.cap;
  return arch;
}

NeuralDrift make_net(const ExperimentConfig& cfg, const GuidedSystem& sys) {
  NeuralDrift net(make_arch(cfg.net, sys.dim(), sys.noise_dim()));
  net.init_params(cfg.net.init_seed);
  return net;
}

void write_manifest(const std::string& dir, const std::string& subcommand,
                    const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  json j{{"subcommand", subcommand}, {"config_hash", hex}, {"seed", cfg.seed}};
  std::ofstream out(dir + "/manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace bridgesim
