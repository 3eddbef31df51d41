#include "bridgesim/observation.hpp"

#include <cmath>
#include <string>

#include "bridgesim/errors.hpp"

namespace bridgesim {

ObservationScheme::ObservationScheme(linalg::Matrix L_, linalg::Matrix Sigma_,
                                     std::vector<double> v_)
    : L(std::move(L_)), Sigma(std::move(Sigma_)), v(std::move(v_)) {
  std::vector<std::string> issues;
  const int dobs = L.rows;
  const int d = L.cols;
  if (dobs < 1 || d < 1 || dobs > d)
    issues.push_back("conditioning.L: need 1 <= rows <= cols, got " + std::to_string(dobs) +
                     "x" + std::to_string(d));
  if (Sigma.rows != dobs || Sigma.cols != dobs)
    issues.push_back("conditioning.Sigma: must be " + std::to_string(dobs) + "x" +
                     std::to_string(dobs));
  if (static_cast<int>(v.size()) != dobs)
    issues.push_back("conditioning.v: length must equal rows of L");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  for (int i = 0; i < dobs; ++i)
    for (int j = 0; j < i; ++j) {
      const double scale = std::abs(Sigma.at(i, j)) + std::abs(Sigma.at(j, i)) + 1e-300;
      if (std::abs(Sigma.at(i, j) - Sigma.at(j, i)) > 1e-12 * scale)
        issues.push_back("conditioning.Sigma: not symmetric");
    }
  if (issues.empty() && !linalg::is_spd(Sigma))
    issues.push_back("conditioning.Sigma: not positive definite");
  // full row rank <=> L L^T is SPD
  if (issues.empty() && !linalg::is_spd(linalg::sandwich(L, linalg::Matrix::identity(d))))
    issues.push_back("conditioning.L: rows are not linearly independent");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

ObservationScheme ObservationScheme::full_state(std::vector<double> v, double eps2) {
  const int d = static_cast<int>(v.size());
  linalg::Matrix Sigma(d, d);
  for (int i = 0; i < d; ++i) Sigma.at(i, i) = eps2;
  return ObservationScheme(linalg::Matrix::identity(d), std::move(Sigma), std::move(v));
}

}  // namespace bridgesim
