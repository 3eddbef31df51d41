#pragma once

#include <vector>

#include "bridgesim/auxiliary.hpp"
#include "bridgesim/grid.hpp"
#include "bridgesim/linalg.hpp"
#include "bridgesim/observation.hpp"

namespace bridgesim {

// Node-wise solution of the backward system
//   dL = -L B dt,  L(T) = L_obs
//   dMdag = -L atilde L^T dt,  Mdag(T) = Sigma
//   du = -L beta dt,  u(T) = 0
// integrated with one RK4 step per grid interval, plus the derived guiding
// quantities Htilde = L^T M L and q = L^T M (v - u) with M = Mdag^{-1}.
struct BackwardOdeSolution {
  TimeGrid grid;
  int d = 0;
  int dobs = 0;
  std::vector<linalg::Matrix> L;        // dobs x d
  std::vector<linalg::Matrix> Mdag;     // dobs x dobs, exactly symmetric
  std::vector<linalg::Matrix> M;        // dobs x dobs
  std::vector<std::vector<double>> u;   // dobs
  std::vector<linalg::Matrix> Htilde;   // d x d, exactly symmetric
  std::vector<std::vector<double>> q;   // d
  std::vector<linalg::Matrix> sigma_tilde;  // d x dw at each node
  std::vector<double> tr_atilde_H;      // tr(atilde(t_m) Htilde_m)
  double max_jitter = 0.0;              // largest diagonal jitter spent on inversion

  // r(t_m, x) = q_m - Htilde_m x
  void guiding_score(int m, const double* x, double* r) const {
    const auto& qm = q[m];
    for (int i = 0; i < d; ++i) r[i] = qm[i];
    linalg::matvec_acc(Htilde[m], x, -1.0, r);
  }
  const linalg::Matrix& neg_hessian(int m) const { return Htilde[m]; }
};

// throws SingularMdag if Mdag cannot be inverted at some node
BackwardOdeSolution solve_backward_odes(const LinearAuxiliary& aux,
                                        const ObservationScheme& obs,
                                        const TimeGrid& grid);

}  // namespace bridgesim
