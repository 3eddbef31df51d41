#include "bridgesim/backward_odes.hpp"

#include <cmath>
#include <string>

#include "bridgesim/errors.hpp"

namespace bridgesim {

namespace {

using linalg::Matrix;

struct State {
  Matrix L;
  Matrix Mdag;
  std::vector<double> u;
};

struct Deriv {
  Matrix dL;
  Matrix dMdag;
  std::vector<double> du;
};

void eval_rhs(const LinearAuxiliary& aux, double t, const State& s, Deriv& d) {
  const int dobs = s.L.rows;
  const int dim = s.L.cols;
  Matrix B(dim, dim);
  aux.Bmat(t, B);
  Matrix at(dim, dim);
  aux.atilde(t, at);
  std::vector<double> beta(dim);
  aux.beta(t, beta.data());

  d.dL = Matrix(dobs, dim);
  for (int i = 0; i < dobs; ++i)
    for (int j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k) acc += s.L.at(i, k) * B.at(k, j);
      d.dL.at(i, j) = -acc;
    }

  const Matrix LaLt = linalg::sandwich(s.L, at);
  d.dMdag = Matrix(dobs, dobs);
  for (size_t i = 0; i < LaLt.a.size(); ++i) d.dMdag.a[i] = -LaLt.a[i];

  d.du.assign(dobs, 0.0);
  linalg::matvec_acc(s.L, beta.data(), -1.0, d.du.data());
}

void axpy(State& y, double h, const Deriv& d, const State& base) {
  const size_t nl = base.L.a.size();
  const size_t nm = base.Mdag.a.size();
  y.L = base.L;
  y.Mdag = base.Mdag;
  y.u = base.u;
  for (size_t i = 0; i < nl; ++i) y.L.a[i] += h * d.dL.a[i];
  for (size_t i = 0; i < nm; ++i) y.Mdag.a[i] += h * d.dMdag.a[i];
  for (size_t i = 0; i < y.u.size(); ++i) y.u[i] += h * d.du[i];
}

}  // namespace

BackwardOdeSolution solve_backward_odes(const LinearAuxiliary& aux,
                                        const ObservationScheme& obs,
                                        const TimeGrid& grid) {
  const int d = obs.state_dim();
  const int dobs = obs.obs_dim();
  if (aux.dim() != d)
    throw ValidationError("auxiliary dimension " + std::to_string(aux.dim()) +
                          " does not match observation state dimension " + std::to_string(d));

  BackwardOdeSolution sol;
  sol.grid = grid;
  sol.d = d;
  sol.dobs = dobs;
  const int M = grid.M;
  sol.L.resize(M + 1);
  sol.Mdag.resize(M + 1);
  sol.M.resize(M + 1);
  sol.u.resize(M + 1);
  sol.Htilde.resize(M + 1);
  sol.q.resize(M + 1);
  sol.sigma_tilde.resize(M + 1);
  sol.tr_atilde_H.resize(M + 1);

  State s{obs.L, obs.Sigma, std::vector<double>(dobs, 0.0)};
  sol.L[M] = s.L;
  sol.Mdag[M] = s.Mdag;
  sol.u[M] = s.u;

  const double h = -grid.dt();
  Deriv k1, k2, k3, k4;
  State tmp;
  for (int m = M; m > 0; --m) {
    const double t = grid.t(m);
    eval_rhs(aux, t, s, k1);
    axpy(tmp, h / 2, k1, s);
    eval_rhs(aux, t + h / 2, tmp, k2);
    axpy(tmp, h / 2, k2, s);
    eval_rhs(aux, t + h / 2, tmp, k3);
    axpy(tmp, h, k3, s);
    eval_rhs(aux, t + h, tmp, k4);

    for (size_t i = 0; i < s.L.a.size(); ++i)
      s.L.a[i] += h / 6 * (k1.dL.a[i] + 2 * k2.dL.a[i] + 2 * k3.dL.a[i] + k4.dL.a[i]);
    for (size_t i = 0; i < s.Mdag.a.size(); ++i)
      s.Mdag.a[i] +=
          h / 6 * (k1.dMdag.a[i] + 2 * k2.dMdag.a[i] + 2 * k3.dMdag.a[i] + k4.dMdag.a[i]);
    for (size_t i = 0; i < s.u.size(); ++i)
      s.u[i] += h / 6 * (k1.du[i] + 2 * k2.du[i] + 2 * k3.du[i] + k4.du[i]);

    // keep Mdag exactly symmetric against drift from rounding
    for (int i = 0; i < dobs; ++i)
      for (int j = 0; j < i; ++j) {
        const double v = 0.5 * (s.Mdag.at(i, j) + s.Mdag.at(j, i));
        s.Mdag.at(i, j) = v;
        s.Mdag.at(j, i) = v;
      }

    sol.L[m - 1] = s.L;
    sol.Mdag[m - 1] = s.Mdag;
    sol.u[m - 1] = s.u;
  }

  std::vector<double> vmu(dobs), Mv(dobs);
  for (int m = 0; m <= M; ++m) {
    const double jit = linalg::spd_inverse_jitter(sol.Mdag[m], sol.M[m]);
    if (jit < 0.0)
      throw SingularMdag("backward information matrix not invertible at node " +
                         std::to_string(m) + " (t = " + std::to_string(grid.t(m)) + ")");
    sol.max_jitter = std::max(sol.max_jitter, jit);

    const Matrix Lt = linalg::transpose(sol.L[m]);
    sol.Htilde[m] = linalg::sandwich(Lt, sol.M[m]);

    for (int i = 0; i < dobs; ++i) vmu[i] = obs.v[i] - sol.u[m][i];
    linalg::matvec(sol.M[m], vmu.data(), Mv.data());
    sol.q[m].assign(d, 0.0);
    linalg::matvec_acc(Lt, Mv.data(), 1.0, sol.q[m].data());

    aux.sigma(grid.t(m), sol.sigma_tilde[m]);
    // tr(atilde H) = <sigma~, H sigma~>_F
    const Matrix& st = sol.sigma_tilde[m];
    double tr = 0.0;
    for (int c = 0; c < st.cols; ++c) {
      for (int i = 0; i < d; ++i) {
        double hs = 0.0;
        for (int j = 0; j < d; ++j) hs += sol.Htilde[m].at(i, j) * st.at(j, c);
        tr += st.at(i, c) * hs;
      }
    }
    sol.tr_atilde_H[m] = tr;
  }
  return sol;
}

}  // namespace bridgesim
