#pragma once

#include <vector>

#include "bridgesim/linalg.hpp"

namespace bridgesim {

// terminal observation V = L X_T + N(0, Sigma); L must have full row rank,
// Sigma must be SPD
struct ObservationScheme {
  linalg::Matrix L;      // dobs x d
  linalg::Matrix Sigma;  // dobs x dobs
  std::vector<double> v; // dobs

  ObservationScheme(linalg::Matrix L_, linalg::Matrix Sigma_, std::vector<double> v_);

  int obs_dim() const { return L.rows; }
  int state_dim() const { return L.cols; }

  // convenience for the fully-observed isotropic case
  static ObservationScheme full_state(std::vector<double> v, double eps2);
};

}  // namespace bridgesim
