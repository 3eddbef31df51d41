#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "bridgesim/analytics.hpp"
#include "bridgesim/errors.hpp"
#include "bridgesim/guided.hpp"
#include "bridgesim/models.hpp"
#include "bridgesim/observation.hpp"

using namespace bridgesim;

namespace {

Trajectory constant_traj(const TimeGrid& grid, const std::vector<double>& x) {
  Trajectory tr(grid, static_cast<int>(x.size()));
  for (int m = 0; m <= grid.M; ++m)
    std::copy(x.begin(), x.end(), tr.state(m));
  return tr;
}

MarginalHistogram hist_from_counts(const std::vector<long>& counts) {
  MarginalHistogram h;
  h.counts = counts;
  h.edges.resize(counts.size() + 1);
  for (size_t i = 0; i < h.edges.size(); ++i) h.edges[i] = static_cast<double>(i);
  h.n_samples = std::accumulate(counts.begin(), counts.end(), 0L);
  return h;
}

}  // namespace

TEST_CASE("constant trajectories land in a single bin containing the value") {
  TimeGrid grid(1.0, 4);
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 7; ++i) trajs.push_back(constant_traj(grid, {2.5}));

  MarginalHistogram h = marginal_histogram(trajs, 0.5, 0, 10);
  REQUIRE(h.counts.size() == 10);
  REQUIRE(h.edges.size() == 11);
  long total = 0;
  int occupied = 0, where = -1;
  for (size_t i = 0; i < h.counts.size(); ++i) {
    total += h.counts[i];
    if (h.counts[i] > 0) { ++occupied; where = static_cast<int>(i); }
  }
  CHECK(total == 7);
  CHECK(h.n_samples == 7);
  CHECK(occupied == 1);
  CHECK(h.edges[where] <= 2.5);
  CHECK(2.5 <= h.edges[where + 1]);

  std::vector<double> d = h.densities();
  CHECK(d[where] == 1.0);
}

TEST_CASE("pinned symmetric edges split two-point data evenly") {
  std::vector<double> vals;
  for (int i = 0; i < 30; ++i) vals.push_back(i % 2 ? 1.0 : -1.0);
  std::vector<double> edges = {-2.0, 0.0, 2.0};
  MarginalHistogram h = histogram_of_values(vals, edges);
  REQUIRE(h.counts.size() == 2);
  CHECK(h.counts[0] == 15);
  CHECK(h.counts[1] == 15);
  std::vector<double> d = h.densities();
  CHECK(d[0] == 0.5);
  CHECK(d[1] == 0.5);
}

TEST_CASE("brownian bridge midpoint variance matches the closed form") {
  // X bridge from 0 to 0 on [0,1] has Var X_t = t(1-t); at t=1/2 that is 1/4.
  auto model = std::make_shared<BrownianModel>(0.0, 1.0);
  linalg::Matrix s(1, 1);
  s.at(0, 0) = 1.0;
  auto aux = LinearAuxiliary::constants({0.0}, linalg::Matrix(1, 1), s);
  GuidedSystem sys(model, aux, ObservationScheme::full_state({0.0}, 1e-8),
                   TimeGrid(1.0, 100), {0.0});

  const int n = 20000;
  std::vector<Trajectory> trajs = sys.sample_batch(n, 1234);
  REQUIRE(static_cast<int>(trajs.size()) == n);

  MarginalHistogram h = marginal_histogram(trajs, 0.5, 0, 60);
  // moments straight from the marginal, histogram only for sanity
  std::vector<double> xs;
  xs.reserve(n);
  long in_hist = 0;
  for (const auto& c : h.counts) in_hist += c;
  CHECK(in_hist == n);
  for (const auto& tr : trajs) xs.push_back(tr.state(50)[0]);
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1);
  double se = 0.25 * std::sqrt(2.0 / (n - 1));
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(0.25 / n));
  CHECK(std::fabs(var - 0.25) < 3.0 * se + 0.005);
}

TEST_CASE("total variation distance identities") {
  std::vector<double> a = {0.1, 0.4, 0.2, 0.9, 1.3, 0.05};
  MarginalHistogram ha = histogram_of_values(a, 6);
  CHECK(tv_distance(ha, ha) == 0.0);

  std::vector<double> edges = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> left = {0.5, 1.5, 0.2, 1.9};
  std::vector<double> right = {2.5, 3.5, 2.2, 3.9};
  MarginalHistogram hl = histogram_of_values(left, edges);
  MarginalHistogram hr = histogram_of_values(right, edges);
  CHECK(tv_distance(hl, hr) == 1.0);
}

TEST_CASE("total variation is symmetric and obeys the triangle inequality") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  std::vector<double> edges = {0.0, 1.0, 2.0, 3.0, 4.0};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> va, vb, vc;
    for (int i = 0; i < 40; ++i) {
      va.push_back(unif(rng));
      vb.push_back(unif(rng));
      vc.push_back(unif(rng));
    }
    MarginalHistogram ha = histogram_of_values(va, edges);
    MarginalHistogram hb = histogram_of_values(vb, edges);
    MarginalHistogram hc = histogram_of_values(vc, edges);
    double ab = tv_distance(ha, hb);
    double bc = tv_distance(hb, hc);
    double ac = tv_distance(ha, hc);
    CHECK(ab == tv_distance(hb, ha));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ac <= ab + bc + 1e-15);
  }
}

TEST_CASE("mismatched bin edges are rejected") {
  std::vector<double> vals = {0.5, 1.5};
  MarginalHistogram a = histogram_of_values(vals, std::vector<double>{0.0, 1.0, 2.0});
  MarginalHistogram b = histogram_of_values(vals, std::vector<double>{0.0, 1.1, 2.0});
  CHECK_THROWS_AS(tv_distance(a, b), BinMismatch);
}

TEST_CASE("mode counting on hand built histograms") {
  CHECK(mode_count(hist_from_counts({0, 1, 5, 1, 0, 0, 6, 2, 0})) == 2);
  // middle bump has prominence 2/202 against threshold 0.05 * 100/202
  CHECK(mode_count(hist_from_counts({0, 100, 0, 2, 0, 100, 0})) == 2);
  // plateau counts once
  CHECK(mode_count(hist_from_counts({0, 3, 3, 3, 0})) == 1);
  CHECK(mode_count(hist_from_counts({0, 9, 0})) == 1);
  // monotone slope has a single mode at the high end
  CHECK(mode_count(hist_from_counts({1, 2, 3, 4, 5})) == 1);
  // all mass piled on one edge bin still registers
  CHECK(mode_count(hist_from_counts({7, 0, 0})) == 1);
}

TEST_CASE("mode counting separates two sampled clusters") {
  std::mt19937 rng(5);
  std::normal_distribution<double> lo(-2.0, 0.3), hi(2.0, 0.3);
  std::vector<double> vals;
  for (int i = 0; i < 4000; ++i) {
    vals.push_back(lo(rng));
    vals.push_back(hi(rng));
  }
  MarginalHistogram h = histogram_of_values(vals, 40);
  CHECK(mode_count(h) == 2);

  std::vector<double> one;
  for (int i = 0; i < 4000; ++i) one.push_back(lo(rng));
  MarginalHistogram h1 = histogram_of_values(one, 40);
  CHECK(mode_count(h1) == 1);
}

TEST_CASE("endpoint report measures distance to the conditioning target") {
  TimeGrid grid(1.0, 2);
  std::vector<Trajectory> trajs;
  Trajectory t1 = constant_traj(grid, {1.0, 0.0});
  Trajectory t2 = constant_traj(grid, {1.0, 2.0});
  trajs.push_back(t1);
  trajs.push_back(t2);

  ObservationScheme obs = ObservationScheme::full_state({1.0, 1.0}, 1e-6);
  EndpointReport rep = endpoint_report(trajs, obs);
  CHECK(rep.n_paths == 2);
  CHECK(rep.mean_error == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.max_error == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.mean_error <= rep.max_error);

  // partial observation: only the first coordinate is compared
  linalg::Matrix L(1, 2);
  L.at(0, 0) = 1.0;
  linalg::Matrix Sigma(1, 1);
  Sigma.at(0, 0) = 1e-6;
  ObservationScheme first(L, Sigma, {0.0});
  EndpointReport rep1 = endpoint_report(trajs, first);
  CHECK(rep1.mean_error == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(endpoint_report({}, obs), EmptyInput);
}

TEST_CASE("histogram is invariant under trajectory order") {
  TimeGrid grid(1.0, 3);
  std::vector<Trajectory> trajs;
  for (int i = 0; i < 9; ++i)
    trajs.push_back(constant_traj(grid, {0.3 * i - 1.0}));
  MarginalHistogram a = marginal_histogram(trajs, 1.0, 0, 12);
  std::reverse(trajs.begin(), trajs.end());
  MarginalHistogram b = marginal_histogram(trajs, 1.0, 0, 12);
  CHECK(a.edges == b.edges);
  CHECK(a.counts == b.counts);
}

TEST_CASE("marginal extraction snaps to the nearest grid node") {
  TimeGrid grid(1.0, 10);
  Trajectory tr(grid, 1);
  for (int m = 0; m <= 10; ++m) tr.state(m)[0] = static_cast<double>(m);
  std::vector<Trajectory> trajs = {tr};

  MarginalHistogram h = marginal_histogram(trajs, 0.34, 0, 4);
  // node 3 holds the value 3.0; a histogram of one value straddles it
  CHECK(h.edges.front() < 3.0);
  CHECK(h.edges.back() > 3.0);

  MarginalHistogram hT = marginal_histogram(trajs, 1.0, 0, 4);
  CHECK(hT.edges.front() < 10.0);
  CHECK(hT.edges.back() > 10.0);

  MarginalHistogram hover = marginal_histogram(trajs, 7.0, 0, 4);
  CHECK(hover.edges.front() < 10.0);
  CHECK(hover.edges.back() > 10.0);

  CHECK_THROWS_AS(marginal_histogram(trajs, 0.5, 3, 4), ValidationError);
  CHECK_THROWS_AS(marginal_histogram(std::vector<Trajectory>{}, 0.5, 0, 4), EmptyInput);
}
