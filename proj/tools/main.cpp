// bridgesim: guided diffusion bridge toolkit.
// Subcommands: odes forward guided pcn train sample hist compare.
// Exit codes: 0 ok, 1 bad input/config, 2 numerical failure at runtime.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bridgesim/analytics.hpp"
#include "bridgesim/config.hpp"
#include "bridgesim/errors.hpp"
#include "bridgesim/euler.hpp"
#include "bridgesim/linalg.hpp"
#include "bridgesim/loss.hpp"
#include "bridgesim/models.hpp"
#include "bridgesim/pcn.hpp"
#include "bridgesim/trajectory.hpp"
#include "bridgesim/train.hpp"
#include "bridgesim/wiener.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bridgesim;

namespace {

std::string pad5(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", i);
  return buf;
}

json jvec(const std::vector<double>& v) { return json(v); }

json jmat(const linalg::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json r = json::array();
    for (int c = 0; c < m.cols; ++c) r.push_back(m.at(i, c));
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

// bundled config lookup: explicit env dir, working dir, then next to the binary
std::string find_bundled(const std::string& name) {
  std::string file = name;
  if (file.size() < 5 || file.substr(file.size() - 5) != ".json") file += ".json";
  std::vector<fs::path> candidates;
  if (const char* env = std::getenv("BRIDGESIM_CONFIG_DIR"))
    candidates.push_back(fs::path(env) / file);
  candidates.push_back(fs::path("configs") / file);
  std::error_code ec;
  fs::path exe = fs::canonical("/proc/self/exe", ec);
  if (!ec) {
    fs::path dir = exe.parent_path();
    candidates.push_back(dir / "configs" / file);
    candidates.push_back(dir / ".." / "configs" / file);
    candidates.push_back(dir / ".." / ".." / "configs" / file);
  }
  for (const auto& c : candidates)
    if (fs::exists(c)) return c.string();
  std::string msg = "no bundled config '" + name + "'; searched:";
  for (const auto& c : candidates) msg += "\n  " + c.string();
  throw ParseError(msg);
}

struct ConfigArgs {
  std::string config, model;

  void attach(CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config, "path to an experiment config");
    auto* m = cmd->add_option("--model", model, "bundled config name");
    c->excludes(m);
    m->excludes(c);
  }
  ExperimentConfig resolve() const {
    if (!config.empty()) return load_config(config);
    if (!model.empty()) return load_config(find_bundled(model));
    throw ValidationError("pass --config <file> or --model <name>");
  }
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json stats_json(const std::vector<double>& v) {
  json j;
  j["mean"] = mean_of(v);
  j["stddev"] = sd_of(v);
  if (!v.empty()) {
    j["min"] = *std::min_element(v.begin(), v.end());
    j["max"] = *std::max_element(v.begin(), v.end());
  }
  return j;
}

std::vector<Trajectory> read_csv_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EmptyInput("no .csv files in " + dir);
  std::vector<Trajectory> trajs;
  trajs.reserve(files.size());
  for (const auto& f : files) trajs.push_back(read_csv(f));
  return trajs;
}

std::vector<double> marginal_values(const std::vector<Trajectory>& trajs, double t,
                                    int coord) {
  std::vector<double> vals;
  vals.reserve(trajs.size());
  for (const auto& tr : trajs) {
    const int m = std::clamp<long>(std::lround(t / tr.grid.dt()), 0, tr.grid.M);
    if (coord < 0 || coord >= tr.dim)
      throw ValidationError("coordinate out of range for the loaded trajectories");
    vals.push_back(tr.state(static_cast<int>(m))[coord]);
  }
  return vals;
}

// ---------------------------------------------------------------- subcommands

void run_odes(const ConfigArgs& ca, std::string out_dir) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  GuidedSystem sys = make_system(cfg);
  const BackwardOdeSolution& sol = sys.odes();
  fs::create_directories(out_dir);
  std::ofstream out(out_dir + "/odes.ndjson");
  if (!out) throw std::runtime_error("cannot write " + out_dir + "/odes.ndjson");
  for (int m = 0; m <= sys.grid().M; ++m) {
    json line;
    line["t"] = sys.grid().t(m);
    line["L"] = jmat(sol.L[m]);
    line["Mdag"] = jmat(sol.Mdag[m]);
    line["M"] = jmat(sol.M[m]);
    line["u"] = jvec(sol.u[m]);
    out << line.dump() << "\n";
  }
  write_manifest(out_dir, "odes", cfg);
  std::cout << out_dir << "/odes.ndjson: " << sys.grid().M + 1 << " nodes\n";
}

void run_forward(const ConfigArgs& ca, int paths, long seed_flag, std::string out_dir,
                 double filter_radius, int max_save) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  const uint64_t seed = seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.seed;
  auto model = make_model(cfg);
  ObservationScheme obs = make_observation(cfg, model->dim());
  TimeGrid grid(cfg.T, cfg.M);
  const std::vector<double> x0 = cfg.x0.materialize();
  fs::create_directories(out_dir);

  const bool filtering = filter_radius > 0.0;
  std::vector<double> resid(obs.obs_dim());
  Trajectory traj(grid, model->dim());
  int aborted = 0, survivors = 0, saved = 0;
  for (int i = 0; i < paths; ++i) {
    WienerPath w = sample_wiener(grid, model->noise_dim(), seed, static_cast<uint32_t>(i));
    if (!try_euler_maruyama(*model, x0, w, traj)) {
      ++aborted;
      continue;
    }
    bool keep = true;
    if (filtering) {
      linalg::matvec(obs.L, traj.state(grid.M), resid.data());
      double d2 = 0.0;
      for (int k = 0; k < obs.obs_dim(); ++k) {
        const double r = resid[k] - obs.v[k];
        d2 += r * r;
      }
      keep = std::sqrt(d2) <= filter_radius;
      if (keep) ++survivors;
    }
    if (keep && saved < max_save) {
      write_csv(traj, out_dir + "/path_" + pad5(i) + ".csv");
      ++saved;
    }
  }
  json summary;
  summary["paths"] = paths;
  summary["aborted"] = aborted;
  summary["saved"] = saved;
  if (filtering) {
    summary["filter_radius"] = filter_radius;
    summary["survivors"] = survivors;
  }
  write_json(out_dir + "/summary.json", summary);
  write_manifest(out_dir, "forward", cfg);
  std::cout << "forward: " << paths << " paths, " << aborted << " aborted";
  if (filtering) std::cout << ", " << survivors << " within radius " << filter_radius;
  std::cout << ", " << saved << " saved to " << out_dir << "\n";
}

void run_guided(const ConfigArgs& ca, int paths, long seed_flag, std::string out_dir) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  const uint64_t seed = seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.seed;
  GuidedSystem sys = make_system(cfg);
  fs::create_directories(out_dir);

  std::vector<Trajectory> kept;
  std::vector<double> log_psis;
  Trajectory traj(sys.grid(), sys.dim());
  int aborted = 0;
  for (int i = 0; i < paths; ++i) {
    WienerPath w =
        sample_wiener(sys.grid(), sys.noise_dim(), seed, static_cast<uint32_t>(i));
    if (!sys.try_sample(w, traj)) {
      ++aborted;
      continue;
    }
    write_csv(traj, out_dir + "/bridge_" + pad5(i) + ".csv");
    log_psis.push_back(traj.log_psi);
    kept.push_back(traj);
  }
  if (kept.empty()) throw BatchFailure("guided: every path left the finite range");
  EndpointReport rep = endpoint_report(kept, sys.obs());
  json summary;
  summary["paths"] = paths;
  summary["aborted"] = aborted;
  summary["mean_endpoint_error"] = rep.mean_error;
  summary["max_endpoint_error"] = rep.max_error;
  summary["log_psi"] = stats_json(log_psis);
  write_json(out_dir + "/summary.json", summary);
  write_manifest(out_dir, "guided", cfg);
  std::cout << "guided: " << kept.size() << "/" << paths << " paths to " << out_dir
            << ", mean endpoint error " << rep.mean_error << "\n";
}

void run_pcn(const ConfigArgs& ca, double eta_flag, long iters_flag, long burn_flag,
             long thin_flag, int chains_flag, long seed_flag, std::string out_dir,
             int max_save) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  if (eta_flag >= 0.0) cfg.pcn.eta = eta_flag;
  if (iters_flag > 0) cfg.pcn.iterations = static_cast<int>(iters_flag);
  if (burn_flag >= 0) cfg.pcn.burn_in = static_cast<int>(burn_flag);
  if (thin_flag > 0) cfg.pcn.thin = static_cast<int>(thin_flag);
  if (chains_flag > 0) cfg.pcn.chains = chains_flag;
  const uint64_t seed = seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.seed;
  GuidedSystem sys = make_system(cfg);
  fs::create_directories(out_dir);

  json chain_list = json::array();
  double acc_sum = 0.0;
  int saved = 0;
  for (int c = 0; c < cfg.pcn.chains; ++c) {
    long recorded = 0;
    auto sink = [&](long idx, const Trajectory& tr) {
      (void)idx;
      if (saved < max_save) {
        write_csv(tr, out_dir + "/chain" + std::to_string(c) + "_sample_" +
                          pad5(static_cast<int>(recorded)) + ".csv");
        ++saved;
      }
      ++recorded;
    };
    PcnResult res = pcn_chain(sys, cfg.pcn.eta, cfg.pcn.iterations, cfg.pcn.burn_in,
                              cfg.pcn.thin, seed, static_cast<uint32_t>(c), sink);
    json jc;
    jc["chain"] = c;
    jc["accepted"] = res.accepted;
    jc["proposed"] = res.proposed;
    jc["acceptance"] = res.acceptance;
    jc["recorded"] = recorded;
    chain_list.push_back(std::move(jc));
    acc_sum += res.acceptance;
  }
  json summary;
  summary["eta"] = cfg.pcn.eta;
  summary["iterations"] = cfg.pcn.iterations;
  summary["burn_in"] = cfg.pcn.burn_in;
  summary["thin"] = cfg.pcn.thin;
  summary["chains"] = std::move(chain_list);
  summary["acceptance_mean"] = acc_sum / cfg.pcn.chains;
  write_json(out_dir + "/summary.json", summary);
  write_manifest(out_dir, "pcn", cfg);
  std::cout << "pcn: " << cfg.pcn.chains << " chain(s), mean acceptance "
            << summary["acceptance_mean"].get<double>() << ", " << saved
            << " samples saved to " << out_dir << "\n";
}

void run_train(const ConfigArgs& ca, std::string ckpt, std::string log_path,
               long iters_flag, long batch_flag, long seed_flag, std::string out_dir) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  if (iters_flag > 0) cfg.train.iterations = static_cast<int>(iters_flag);
  if (batch_flag > 0) cfg.train.batch_size = static_cast<int>(batch_flag);
  if (seed_flag >= 0) cfg.train.seed = static_cast<uint64_t>(seed_flag);
  cfg.train.validate();
  if (ckpt.empty()) ckpt = out_dir + "/checkpoint.json";
  if (log_path.empty()) log_path = out_dir + "/train.ndjson";
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(ckpt).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(ckpt).parent_path());

  GuidedSystem sys = make_system(cfg);
  NeuralDrift net = make_net(cfg, sys);

  std::ofstream log(log_path);
  if (!log) throw std::runtime_error("cannot write " + log_path);
  log.precision(17);
  auto cb = [&](int iter, double loss, double grad_norm, double elapsed_s) {
    json line;
    line["iter"] = iter;
    line["loss"] = loss;
    line["grad_norm"] = grad_norm;
    line["elapsed_s"] = elapsed_s;
    log << line.dump() << "\n";
  };
  TrainTrace trace = train(sys, net, cfg.train, cb);
  save_checkpoint(ckpt, net, cfg.train.seed);
  write_manifest(out_dir, "train", cfg);

  const int K = static_cast<int>(trace.loss.size());
  const int tail = std::min(100, K);
  double tail_mean = 0.0;
  for (int k = K - tail; k < K; ++k) tail_mean += trace.loss[k];
  tail_mean /= tail;
  std::cout << "train: " << K << " iterations in " << trace.elapsed_s
            << " s, final-" << tail << " mean loss " << tail_mean;
  if (trace.has_lower_bound) std::cout << " (analytic bound " << trace.lower_bound << ")";
  std::cout << "\ncheckpoint: " << ckpt << "\nlog: " << log_path << "\n";
}

void run_sample(const ConfigArgs& ca, const std::string& ckpt, int paths,
                long seed_flag, std::string out_dir, int max_save) {
  ExperimentConfig cfg = ca.resolve();
  if (out_dir.empty()) out_dir = cfg.output_dir;
  const uint64_t seed = seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.seed;
  GuidedSystem sys = make_system(cfg);
  NeuralDrift net = load_checkpoint(ckpt);
  NeuralBridge bridge(sys, net);
  fs::create_directories(out_dir);

  NeuralBridge::Workspace ws(sys, net);
  std::vector<Trajectory> kept;
  std::vector<double> costs;
  Trajectory traj(sys.grid(), sys.dim());
  int aborted = 0, saved = 0;
  for (int i = 0; i < paths; ++i) {
    WienerPath w =
        sample_wiener(sys.grid(), sys.noise_dim(), seed, static_cast<uint32_t>(i));
    if (!bridge.try_sample(w, traj, ws)) {
      ++aborted;
      continue;
    }
    if (saved < max_save) {
      write_csv(traj, out_dir + "/neural_" + pad5(i) + ".csv");
      ++saved;
    }
    costs.push_back(traj.loss_integrand);
    kept.push_back(traj);
  }
  if (kept.empty()) throw BatchFailure("sample: every path left the finite range");
  EndpointReport rep = endpoint_report(kept, sys.obs());
  json summary;
  summary["paths"] = paths;
  summary["aborted"] = aborted;
  summary["saved"] = saved;
  summary["checkpoint"] = ckpt;
  summary["mean_endpoint_error"] = rep.mean_error;
  summary["max_endpoint_error"] = rep.max_error;
  summary["loss_integrand"] = stats_json(costs);
  write_json(out_dir + "/summary.json", summary);
  write_manifest(out_dir, "sample", cfg);
  std::cout << "sample: " << kept.size() << "/" << paths << " paths to " << out_dir
            << ", mean endpoint error " << rep.mean_error << "\n";
}

void run_hist(const std::string& in_dir, double t, int coord, int bins,
              const std::string& out_file) {
  std::vector<Trajectory> trajs = read_csv_dir(in_dir);
  MarginalHistogram h = marginal_histogram(trajs, t, coord, bins);
  json j;
  j["time"] = h.time;
  j["coordinate"] = h.coordinate;
  j["n_samples"] = h.n_samples;
  j["edges"] = jvec(h.edges);
  j["counts"] = json(h.counts);
  j["densities"] = jvec(h.densities());
  j["modes"] = mode_count(h);
  if (out_file.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(out_file, j);
    std::cout << "hist: " << h.n_samples << " samples -> " << out_file << "\n";
  }
}

void run_compare(const std::string& dir_a, const std::string& dir_b, double t,
                 int coord, int bins, const std::string& out_file) {
  std::vector<Trajectory> ta = read_csv_dir(dir_a);
  std::vector<Trajectory> tb = read_csv_dir(dir_b);
  std::vector<double> va = marginal_values(ta, t, coord);
  std::vector<double> vb = marginal_values(tb, t, coord);
  std::vector<double> pooled = va;
  pooled.insert(pooled.end(), vb.begin(), vb.end());
  MarginalHistogram pool = histogram_of_values(pooled, bins, t, coord);
  MarginalHistogram ha = histogram_of_values(va, pool.edges, t, coord);
  MarginalHistogram hb = histogram_of_values(vb, pool.edges, t, coord);
  json j;
  j["time"] = t;
  j["coordinate"] = coord;
  j["n_a"] = ha.n_samples;
  j["n_b"] = hb.n_samples;
  j["edges"] = jvec(pool.edges);
  j["densities_a"] = jvec(ha.densities());
  j["densities_b"] = jvec(hb.densities());
  j["tv"] = tv_distance(ha, hb);
  j["modes_a"] = mode_count(ha);
  j["modes_b"] = mode_count(hb);
  if (out_file.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(out_file, j);
    std::cout << "compare: tv " << j["tv"].get<double>() << " -> " << out_file << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guided diffusion bridges: simulate, sample exactly, learn"};
  app.require_subcommand(1);

  ConfigArgs odes_cfg;
  std::string odes_out;
  auto* odes = app.add_subcommand("odes", "dump the backward information filter");
  odes_cfg.attach(odes);
  odes->add_option("--out", odes_out, "output directory");

  ConfigArgs fwd_cfg;
  int fwd_paths = 100, fwd_max_save = 200;
  long fwd_seed = -1;
  double fwd_radius = 0.0;
  std::string fwd_out;
  auto* fwd = app.add_subcommand("forward", "unconditioned Euler-Maruyama paths");
  fwd_cfg.attach(fwd);
  fwd->add_option("--paths", fwd_paths, "number of paths")->check(CLI::PositiveNumber);
  fwd->add_option("--seed", fwd_seed, "RNG seed (default: config seed)");
  fwd->add_option("--out", fwd_out, "output directory");
  fwd->add_option("--filter-radius", fwd_radius,
                  "keep only paths with |L x_T - v| <= radius");
  fwd->add_option("--max-save", fwd_max_save, "cap on CSV files written");

  ConfigArgs gd_cfg;
  int gd_paths = 30;
  long gd_seed = -1;
  std::string gd_out;
  auto* gd = app.add_subcommand("guided", "guided proposal bridge paths");
  gd_cfg.attach(gd);
  gd->add_option("--paths", gd_paths, "number of paths")->check(CLI::PositiveNumber);
  gd->add_option("--seed", gd_seed, "RNG seed (default: config seed)");
  gd->add_option("--out", gd_out, "output directory");

  ConfigArgs pcn_cfg;
  double pcn_eta = -1.0;
  long pcn_iters = 0, pcn_burn = -1, pcn_thin = 0, pcn_seed = -1;
  int pcn_chains = 0, pcn_max_save = 1000;
  std::string pcn_out;
  auto* pc = app.add_subcommand("pcn", "exact bridge sampling by pCN on the noise");
  pcn_cfg.attach(pc);
  pc->add_option("--eta", pcn_eta, "pCN mixing parameter in [0,1]");
  pc->add_option("--iters", pcn_iters, "MCMC iterations");
  pc->add_option("--burn-in", pcn_burn, "discarded initial iterations");
  pc->add_option("--thin", pcn_thin, "record every thin-th iteration");
  pc->add_option("--chains", pcn_chains, "independent chains");
  pc->add_option("--seed", pcn_seed, "RNG seed (default: config seed)");
  pc->add_option("--out", pcn_out, "output directory");
  pc->add_option("--max-save", pcn_max_save, "cap on CSV files written");

  ConfigArgs tr_cfg;
  std::string tr_ckpt, tr_log, tr_out;
  long tr_iters = 0, tr_batch = 0, tr_seed = -1;
  auto* tr = app.add_subcommand("train", "learn the neural drift correction");
  tr_cfg.attach(tr);
  tr->add_option("--out", tr_ckpt, "checkpoint path (default: <output_dir>/checkpoint.json)");
  tr->add_option("--log", tr_log, "NDJSON training log path");
  tr->add_option("--iters", tr_iters, "override train.iterations");
  tr->add_option("--batch", tr_batch, "override train.batch_size");
  tr->add_option("--seed", tr_seed, "override train.seed");
  tr->add_option("--dir", tr_out, "output directory for manifest/log defaults");

  ConfigArgs sm_cfg;
  std::string sm_ckpt, sm_out;
  int sm_paths = 30, sm_max_save = 1000;
  long sm_seed = -1;
  auto* sm = app.add_subcommand("sample", "sample the trained neural bridge");
  sm_cfg.attach(sm);
  sm->add_option("--checkpoint", sm_ckpt, "trained checkpoint")->required();
  sm->add_option("--paths", sm_paths, "number of paths")->check(CLI::PositiveNumber);
  sm->add_option("--seed", sm_seed, "RNG seed (default: config seed)");
  sm->add_option("--out", sm_out, "output directory");
  sm->add_option("--max-save", sm_max_save, "cap on CSV files written");

  std::string h_in, h_out;
  double h_t = 0.0;
  int h_coord = 0, h_bins = 50;
  auto* hs = app.add_subcommand("hist", "marginal histogram of saved trajectories");
  hs->add_option("--in", h_in, "directory of trajectory CSVs")->required();
  hs->add_option("--t", h_t, "time slice")->required();
  hs->add_option("--coord", h_coord, "state coordinate");
  hs->add_option("--bins", h_bins, "bin count")->check(CLI::PositiveNumber);
  hs->add_option("--out", h_out, "output JSON (default: stdout)");

  std::string c_a, c_b, c_out;
  double c_t = 0.0;
  int c_coord = 0, c_bins = 50;
  auto* cp = app.add_subcommand("compare", "total-variation comparison of two sample sets");
  cp->add_option("--a", c_a, "first directory of CSVs")->required();
  cp->add_option("--b", c_b, "second directory of CSVs")->required();
  cp->add_option("--t", c_t, "time slice")->required();
  cp->add_option("--coord", c_coord, "state coordinate");
  cp->add_option("--bins", c_bins, "bin count")->check(CLI::PositiveNumber);
  cp->add_option("--out", c_out, "output JSON (default: stdout)");

  odes->callback([&] { run_odes(odes_cfg, odes_out); });
  fwd->callback([&] {
    run_forward(fwd_cfg, fwd_paths, fwd_seed, fwd_out, fwd_radius, fwd_max_save);
  });
  gd->callback([&] { run_guided(gd_cfg, gd_paths, gd_seed, gd_out); });
  pc->callback([&] {
    run_pcn(pcn_cfg, pcn_eta, pcn_iters, pcn_burn, pcn_thin, pcn_chains, pcn_seed,
            pcn_out, pcn_max_save);
  });
  tr->callback([&] {
    run_train(tr_cfg, tr_ckpt, tr_log, tr_iters, tr_batch, tr_seed, tr_out);
  });
  sm->callback([&] {
    run_sample(sm_cfg, sm_ckpt, sm_paths, sm_seed, sm_out, sm_max_save);
  });
  hs->callback([&] { run_hist(h_in, h_t, h_coord, h_bins, h_out); });
  cp->callback([&] { run_compare(c_a, c_b, c_t, c_coord, c_bins, c_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& s : e.issues) std::cerr << "  " << s << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
