#pragma once

#include <vector>

#include "bridgesim/observation.hpp"
#include "bridgesim/trajectory.hpp"

namespace bridgesim {

struct MarginalHistogram {
  double time = 0.0;
  int coordinate = 0;
  std::vector<double> edges;  // strictly increasing, counts.size() + 1
  std::vector<long> counts;
  long n_samples = 0;

  std::vector<double> densities() const;  // probability mass per bin
};

// histogram of coordinate at the grid node nearest t; range spans the
// empirical min/max padded by 5% (a degenerate range widens to +-1/2)
MarginalHistogram marginal_histogram(const std::vector<Trajectory>& trajs, double t,
                                     int coordinate, int bins = 50);
// same, binned onto caller-pinned edges (values outside clamp to the end bins)
MarginalHistogram marginal_histogram(const std::vector<Trajectory>& trajs, double t,
                                     int coordinate, std::vector<double> edges);
MarginalHistogram histogram_of_values(const std::vector<double>& values, int bins,
                                      double time = 0.0, int coordinate = 0);
MarginalHistogram histogram_of_values(const std::vector<double>& values,
                                      std::vector<double> edges, double time = 0.0,
                                      int coordinate = 0);

// 1/2 sum |p_i - q_i| over shared bins; BinMismatch when edges differ
double tv_distance(const MarginalHistogram& a, const MarginalHistogram& b);

// local maxima of the density whose prominence (height above the deepest
// saddle separating them from higher ground) exceeds min_prominence times the
// tallest bin
int mode_count(const MarginalHistogram& h, double min_prominence = 0.05);

struct EndpointReport {
  double mean_error = 0.0;  // mean over paths of |L x_M - v|
  double max_error = 0.0;
  int n_paths = 0;
};

EndpointReport endpoint_report(const std::vector<Trajectory>& trajs,
                               const ObservationScheme& obs);

}  // namespace bridgesim
