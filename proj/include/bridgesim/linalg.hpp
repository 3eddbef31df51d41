#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Small dense helpers for the conditioning layer. Dimensions here are the
// observation/state sizes (<= a few dozen), so plain row-major loops beat any
// library round trip.
namespace bridgesim::linalg {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

// fixed-order blocked dot product; the 4 accumulators keep it deterministic
// while giving the compiler independent FMA lanes
inline double dot(const double* x, const double* y, int n) {
  if (n < 4) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

inline void matvec(const Matrix& m, const double* x, double* y) {
  for (int i = 0; i < m.rows; ++i) y[i] = dot(m.row(i), x, m.cols);
}

// y += alpha * M x
inline void matvec_acc(const Matrix& m, const double* x, double alpha, double* y) {
  for (int i = 0; i < m.rows; ++i) y[i] += alpha * dot(m.row(i), x, m.cols);
}

inline Matrix matmul(const Matrix& A, const Matrix& B) {
  Matrix C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = B.row(k);
      double* crow = C.row(i);
      for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
    }
  return C;
}

inline Matrix transpose(const Matrix& A) {
  Matrix T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

// A B A^T for symmetric B, keeping the result exactly symmetric
inline Matrix sandwich(const Matrix& A, const Matrix& B) {
  const Matrix AB = matmul(A, B);
  Matrix C(A.rows, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = dot(AB.row(i), A.row(j), A.cols);
      C.at(i, j) = v;
      C.at(j, i) = v;
    }
  return C;
}

inline double frobenius_dist(const Matrix& A, const Matrix& B) {
  double s = 0.0;
  for (size_t i = 0; i < A.a.size(); ++i) {
    const double d = A.a[i] - B.a[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// in-place lower Cholesky; false if any pivot is not strictly positive finite
inline bool cholesky(Matrix& A) {
  const int n = A.rows;
  for (int j = 0; j < n; ++j) {
    double d = A.at(j, j) - dot(A.row(j), A.row(j), j);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    A.at(j, j) = d;
    for (int i = j + 1; i < n; ++i) {
      const double v = (A.at(i, j) - dot(A.row(i), A.row(j), j)) / d;
      A.at(i, j) = v;
      A.at(j, i) = 0.0;
    }
  }
  return true;
}

inline bool is_spd(const Matrix& A) {
  Matrix C = A;
  return cholesky(C);
}

// inverse of SPD A via Cholesky; result exactly symmetric. false on failure.
inline bool spd_inverse(const Matrix& A, Matrix& out) {
  const int n = A.rows;
  Matrix L = A;
  if (!cholesky(L)) return false;
  // columns of the inverse by forward/back substitution on unit vectors
  out = Matrix(n, n);
  std::vector<double> y(n), x(n);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      s -= dot(L.row(i), y.data(), i);
      y[i] = s / L.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < n; ++k) s -= L.at(k, i) * x[k];
      x[i] = s / L.at(i, i);
    }
    for (int i = 0; i < n; ++i) out.at(i, c) = x[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (out.at(i, j) + out.at(j, i));
      out.at(i, j) = v;
      out.at(j, i) = v;
    }
  return true;
}

// SPD inverse with diagonal jitter escalation; returns the jitter used,
// or a negative value if every attempt failed
inline double spd_inverse_jitter(const Matrix& A, Matrix& out) {
  static constexpr double kJitter[] = {0.0, 1e-12, 1e-10};
  for (const double j : kJitter) {
    Matrix Aj = A;
    for (int i = 0; i < Aj.rows; ++i) Aj.at(i, i) += j;
    if (spd_inverse(Aj, out)) return j;
  }
  return -1.0;
}

}  // namespace bridgesim::linalg
