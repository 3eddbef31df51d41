#include "bridgesim/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bridgesim {

std::string to_csv(const Trajectory& traj) {
  std::string out = "t";
  for (int j = 0; j < traj.dim; ++j) {
    out += ",x_" + std::to_string(j);
  }
  out += '\n';
  char buf[32];
  for (int m = 0; m <= traj.grid.M; ++m) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.grid.t(m));
    out += buf;
    const double* x = traj.state(m);
    for (int j = 0; j < traj.dim; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", x[j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << to_csv(traj);
}

Trajectory read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  int dim = 0;
  for (char c : line)
    if (c == ',') ++dim;
  if (dim < 1) throw std::runtime_error(path + ": malformed header");

  std::vector<double> times;
  std::vector<double> states;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0)
        times.push_back(v);
      else
        states.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw std::runtime_error(path + ": inconsistent column count");
  }
  if (times.size() < 2) throw std::runtime_error(path + ": need at least two rows");

  Trajectory traj;
  traj.dim = dim;
  traj.grid = TimeGrid(times.back(), static_cast<int>(times.size()) - 1);
  traj.states = std::move(states);
  return traj;
}

}  // namespace bridgesim
