#include "bridgesim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bridgesim/errors.hpp"
#include "bridgesim/linalg.hpp"

namespace bridgesim {

namespace {

std::vector<double> extract_marginal(const std::vector<Trajectory>& trajs, double t,
                                     int coordinate) {
  if (trajs.empty()) throw EmptyInput("marginal_histogram: no trajectories");
  const TimeGrid& grid = trajs.front().grid;
  int m = static_cast<int>(std::lround(t / grid.dt()));
  m = std::clamp(m, 0, grid.M);
  std::vector<double> vals;
  vals.reserve(trajs.size());
  for (const auto& tr : trajs) {
    if (coordinate < 0 || coordinate >= tr.dim)
      throw ValidationError("marginal_histogram: coordinate out of range");
    vals.push_back(tr.state(m)[coordinate]);
  }
  return vals;
}

std::vector<double> auto_edges(const std::vector<double>& values, int bins) {
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  if (span > 0.0) {
    lo -= 0.05 * span;
    hi += 0.05 * span;
  } else {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  return edges;
}

MarginalHistogram bin_values(const std::vector<double>& values,
                             std::vector<double> edges, double time, int coordinate) {
  if (values.empty()) throw EmptyInput("histogram: no values");
  if (edges.size() < 2) throw ValidationError("histogram: need at least one bin");
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1]))
      throw ValidationError("histogram: edges must increase strictly");

  MarginalHistogram h;
  h.time = time;
  h.coordinate = coordinate;
  const int bins = static_cast<int>(edges.size()) - 1;
  h.counts.assign(bins, 0);
  const double lo = edges.front(), hi = edges.back();
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int idx = static_cast<int>(std::floor((v - lo) / width));
    idx = std::clamp(idx, 0, bins - 1);
    h.counts[idx] += 1;
  }
  h.edges = std::move(edges);
  h.n_samples = static_cast<long>(values.size());
  return h;
}

}  // namespace

std::vector<double> MarginalHistogram::densities() const {
  std::vector<double> d(counts.size(), 0.0);
  if (n_samples == 0) return d;
  for (size_t i = 0; i < counts.size(); ++i)
    d[i] = static_cast<double>(counts[i]) / static_cast<double>(n_samples);
  return d;
}

MarginalHistogram marginal_histogram(const std::vector<Trajectory>& trajs, double t,
                                     int coordinate, int bins) {
  const auto vals = extract_marginal(trajs, t, coordinate);
  return bin_values(vals, auto_edges(vals, bins), t, coordinate);
}

MarginalHistogram marginal_histogram(const std::vector<Trajectory>& trajs, double t,
                                     int coordinate, std::vector<double> edges) {
  const auto vals = extract_marginal(trajs, t, coordinate);
  return bin_values(vals, std::move(edges), t, coordinate);
}

MarginalHistogram histogram_of_values(const std::vector<double>& values, int bins,
                                      double time, int coordinate) {
  if (values.empty()) throw EmptyInput("histogram: no values");
  return bin_values(values, auto_edges(values, bins), time, coordinate);
}

MarginalHistogram histogram_of_values(const std::vector<double>& values,
                                      std::vector<double> edges, double time,
                                      int coordinate) {
  return bin_values(values, std::move(edges), time, coordinate);
}

double tv_distance(const MarginalHistogram& a, const MarginalHistogram& b) {
  if (a.edges != b.edges)
    throw BinMismatch("tv_distance: histograms use different bin edges");
  const auto p = a.densities();
  const auto q = b.densities();
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

int mode_count(const MarginalHistogram& h, double min_prominence) {
  const auto d = h.densities();
  const int n = static_cast<int>(d.size());
  if (n == 0) return 0;
  double peak = 0.0;
  for (double v : d) peak = std::max(peak, v);
  if (peak <= 0.0) return 0;
  const double threshold = min_prominence * peak;

  int modes = 0;
  for (int i = 0; i < n; ++i) {
    // first bin of a plateau that stands above both flanks
    if (i > 0 && d[i - 1] >= d[i]) continue;
    int j = i;
    while (j + 1 < n && d[j + 1] == d[i]) ++j;
    if (j + 1 < n && d[j + 1] > d[i]) continue;

    // prominence: drop to the deepest saddle before higher ground, each side;
    // a missing flank reads as ground level
    double base_left = (i == 0) ? 0.0 : d[i];
    for (int k = i - 1; k >= 0; --k) {
      base_left = std::min(base_left, d[k]);
      if (d[k] > d[i]) break;
    }
    double base_right = (j == n - 1) ? 0.0 : d[i];
    for (int k = j + 1; k < n; ++k) {
      base_right = std::min(base_right, d[k]);
      if (d[k] > d[i]) break;
    }
    const double prominence = d[i] - std::max(base_left, base_right);
    if (prominence >= threshold) ++modes;
  }
  return modes;
}

EndpointReport endpoint_report(const std::vector<Trajectory>& trajs,
                               const ObservationScheme& obs) {
  if (trajs.empty()) throw EmptyInput("endpoint_report: no trajectories");
  const int dobs = obs.obs_dim();
  EndpointReport rep;
  std::vector<double> r(dobs);
  for (const auto& tr : trajs) {
    linalg::matvec(obs.L, tr.state(tr.grid.M), r.data());
    for (int i = 0; i < dobs; ++i) r[i] -= obs.v[i];
    const double e = std::sqrt(linalg::dot(r.data(), r.data(), dobs));
    rep.mean_error += e;
    rep.max_error = std::max(rep.max_error, e);
  }
  rep.n_paths = static_cast<int>(trajs.size());
  rep.mean_error /= rep.n_paths;
  return rep;
}

}  // namespace bridgesim
