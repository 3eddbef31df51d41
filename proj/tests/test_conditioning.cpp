#include <doctest.h>

#include <cmath>
#include <vector>

#include "bridgesim/backward_odes.hpp"
#include "bridgesim/errors.hpp"

using namespace bridgesim;
using linalg::Matrix;

namespace {

Matrix diag2(double a, double b) {
  Matrix m(2, 2);
  m.at(0, 0) = a;
  m.at(1, 1) = b;
  return m;
}

// closed forms for constant diagonal B: L(t) = L0 diag(e^{b_j (T-t)}),
// u(t) = L0 diag(phi_j) beta, Mdag(t) = Sigma + sum_kl L0_ik a_kl L0_jl phi_kl
double phi(double b, double tau) { return b == 0.0 ? tau : (std::exp(b * tau) - 1.0) / b; }

}  // namespace

TEST_CASE("scalar brownian auxiliary has the textbook closed form") {
  // beta=0, B=0, sigma~=sigma: L = 1, u = 0, Mdag(t) = eps2 + sigma^2 (T-t)
  const double sigma = 1.0, T = 1.0, eps2 = 1e-10;
  Matrix B(1, 1), S(1, 1);
  S.at(0, 0) = sigma;
  const auto aux = LinearAuxiliary::constants({0.0}, B, S);
  const ObservationScheme obs = ObservationScheme::full_state({0.3}, eps2);
  const TimeGrid grid(T, 100);
  const auto sol = solve_backward_odes(aux, obs, grid);

  for (int m = 0; m <= grid.M; ++m) {
    CHECK(sol.L[m].at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.u[m][0] == 0.0);
    CHECK(sol.Mdag[m].at(0, 0) ==
          doctest::Approx(eps2 + sigma * sigma * (T - grid.t(m))).epsilon(1e-13));
  }
  CHECK(sol.M[0].at(0, 0) == doctest::Approx(1.0 / (sigma * sigma * T + eps2)).epsilon(1e-13));
  CHECK(sol.max_jitter == 0.0);

  // guiding score at the eps->0 limit: r = (v - x)/(sigma^2 (T-t))
  double r;
  const double x = 0.1;
  sol.guiding_score(50, &x, &r);
  const double tau = T - grid.t(50);
  CHECK(r == doctest::Approx((0.3 - x) / (sigma * sigma * tau + eps2)).epsilon(1e-12));
}

TEST_CASE("constant diagonal systems match the matrix-exponential closed forms") {
  const double T = 1.0;
  const std::vector<double> beta = {0.4, -0.2};
  Matrix atl(2, 2);
  atl.at(0, 0) = 0.5;
  atl.at(0, 1) = 0.1;
  atl.at(1, 0) = 0.1;
  atl.at(1, 1) = 0.3;
  // sigma~ = chol(atl) so that sigma sigma^T reproduces atl
  Matrix sigma = atl;
  REQUIRE(linalg::cholesky(sigma));

  for (auto [b0, b1] : {std::pair{-1.0, -1.0}, std::pair{0.3, -0.7}}) {
    CAPTURE(b0);
    const auto aux = LinearAuxiliary::constants(beta, diag2(b0, b1), sigma);
    Matrix Sig(2, 2);
    Sig.at(0, 0) = 1e-4;
    Sig.at(1, 1) = 1e-4;
    const ObservationScheme obs(Matrix::identity(2), Sig, {0.5, -0.5});
    const TimeGrid grid(T, 200);
    const auto sol = solve_backward_odes(aux, obs, grid);

    const double bd[2] = {b0, b1};
    const Matrix ss = linalg::sandwich(sigma, Matrix::identity(2));
    for (int m = 0; m <= grid.M; m += 25) {
      const double tau = T - grid.t(m);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double Lij = (i == j) ? std::exp(bd[j] * tau) : 0.0;
          CHECK(sol.L[m].at(i, j) == doctest::Approx(Lij).epsilon(1e-9));
          const double Mij = Sig.at(i, j) + ss.at(i, j) * phi(bd[i] + bd[j], tau);
          CHECK(sol.Mdag[m].at(i, j) == doctest::Approx(Mij).epsilon(1e-8));
        }
      for (int i = 0; i < 2; ++i)
        CHECK(sol.u[m][i] == doctest::Approx(beta[i] * phi(bd[i], tau)).epsilon(1e-9));
    }
  }
}

TEST_CASE("B = -I contracts L toward zero, not away from it") {
  // L(t) = e^{B(T-t)} = e^{-(T-t)} I for B = -I
  const auto aux = LinearAuxiliary::constants({0.0, 0.0}, diag2(-1.0, -1.0),
                                              Matrix::identity(2));
  const ObservationScheme obs = ObservationScheme::full_state({0.0, 0.0}, 1e-4);
  const TimeGrid grid(1.0, 128);
  const auto sol = solve_backward_odes(aux, obs, grid);
  CHECK(sol.L[0].at(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(sol.L[0].at(0, 1) == doctest::Approx(0.0));
  CHECK(sol.L[0].at(0, 0) < 1.0);
}

TEST_CASE("inverse consistency and symmetry at every node") {
  const auto aux = LinearAuxiliary::constants({0.1, 0.0}, diag2(0.2, -0.5),
                                              diag2(0.6, 0.9));
  const ObservationScheme obs = ObservationScheme::full_state({1.0, 2.0}, 1e-6);
  const TimeGrid grid(2.0, 150);
  const auto sol = solve_backward_odes(aux, obs, grid);
  for (int m = 0; m <= grid.M; ++m) {
    const Matrix P = linalg::matmul(sol.M[m], sol.Mdag[m]);
    CHECK(linalg::frobenius_dist(P, Matrix::identity(2)) < 1e-8);
    CHECK(sol.Htilde[m].at(0, 1) == sol.Htilde[m].at(1, 0));
    CHECK(sol.Mdag[m].at(0, 1) == sol.Mdag[m].at(1, 0));
  }
}

TEST_CASE("information mass grows away from the endpoint") {
  // Mdag(t) - Mdag(t') is PSD for t < t' (integrand is PSD)
  const auto aux = LinearAuxiliary::constants({0.0, 0.0}, diag2(-0.3, 0.4),
                                              diag2(0.5, 0.7));
  const ObservationScheme obs = ObservationScheme::full_state({0.0, 0.0}, 1e-8);
  const TimeGrid grid(1.0, 100);
  const auto sol = solve_backward_odes(aux, obs, grid);
  for (int m = 0; m < grid.M; m += 10) {
    Matrix Dlt(2, 2);
    for (size_t i = 0; i < Dlt.a.size(); ++i)
      Dlt.a[i] = sol.Mdag[m].a[i] - sol.Mdag[m + 10].a[i];
    Dlt.at(0, 0) += 1e-14;
    Dlt.at(1, 1) += 1e-14;
    CHECK(linalg::is_spd(Dlt));
  }
}

TEST_CASE("guiding score is affine with slope -Htilde") {
  const auto aux = LinearAuxiliary::constants({0.2, -0.1}, diag2(-0.4, -0.9),
                                              diag2(0.8, 0.6));
  const ObservationScheme obs = ObservationScheme::full_state({0.7, 0.1}, 1e-6);
  const TimeGrid grid(1.0, 50);
  const auto sol = solve_backward_odes(aux, obs, grid);

  // exact at x=0: r(delta) - r(0) = -H delta with no rounding ambiguity
  const int m = 20;
  const double zero[2] = {0.0, 0.0};
  const double delta[2] = {0.25, -0.5};
  double r0[2], rd[2], hd[2];
  sol.guiding_score(m, zero, r0);
  sol.guiding_score(m, delta, rd);
  linalg::matvec(sol.neg_hessian(m), delta, hd);
  CHECK(rd[0] - r0[0] == -hd[0]);
  CHECK(rd[1] - r0[1] == -hd[1]);

  // general points at tight tolerance
  const double x[2] = {0.3, 0.9};
  const double y[2] = {0.3 + 0.125, 0.9 - 0.25};
  double rx[2], ry[2];
  sol.guiding_score(m, x, rx);
  sol.guiding_score(m, y, ry);
  const double dx[2] = {0.125, -0.25};
  linalg::matvec(sol.neg_hessian(m), dx, hd);
  CHECK(ry[0] - rx[0] == doctest::Approx(-hd[0]).epsilon(1e-12));
  CHECK(ry[1] - rx[1] == doctest::Approx(-hd[1]).epsilon(1e-12));
}

TEST_CASE("overflowing coefficients surface as SingularMdag") {
  const auto aux = LinearAuxiliary::constants({0.0}, [] {
    Matrix b(1, 1);
    b.at(0, 0) = -1e300;
    return b;
  }(), Matrix::identity(1));
  const ObservationScheme obs = ObservationScheme::full_state({0.0}, 1e-10);
  CHECK_THROWS_AS((void)solve_backward_odes(aux, obs, TimeGrid(1.0, 10)), SingularMdag);
}

TEST_CASE("observation scheme validation collects all issues") {
  Matrix L(1, 2);
  L.at(0, 0) = 1.0;
  Matrix Sig(2, 2);  // wrong size for 1-row L
  try {
    ObservationScheme bad(L, Sig, {1.0, 2.0});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues.size() == 2);  // Sigma size + v length
  }

  // rank-deficient L
  Matrix L2(2, 2);
  L2.at(0, 0) = 1.0;
  L2.at(0, 1) = 2.0;
  L2.at(1, 0) = 2.0;
  L2.at(1, 1) = 4.0;
  Matrix Sig2 = Matrix::identity(2);
  CHECK_THROWS_AS(ObservationScheme(L2, Sig2, {0.0, 0.0}), ValidationError);
}
