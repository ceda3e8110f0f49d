#include "odelab/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace odelab {

namespace {

void check_symmetric(const Matrix& m) {
  require(m.square(), Err::NotHermitian, "matrix not square");
  double scale = max_abs(m);
  double tol = 1e-12 * std::max(1.0, scale);
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j)
      require(std::fabs(m(i, j) - m(j, i)) <= tol, Err::NotHermitian,
              "symmetry violation beyond 1e-12 of matrix scale");
}

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = i + 1; j < a.cols; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

}  // namespace

EigResult eig_symmetric(const Matrix& m) {
  check_symmetric(m);
  int n = m.rows;
  Matrix a = m;
  // Work on the symmetrized copy so the rotations see exact symmetry.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  Matrix v = Matrix::identity(n);
  double scale = std::max(1.0, max_abs(a));
  const double stop = 1e-15 * scale * n;
  const int max_sweeps = 100;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(a) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double app = a(p, p), aqq = a(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i != p && i != q) {
            double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(p, i) = a(i, p);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(q, i) = a(i, q);
          }
          double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  require(offdiag_norm(a) <= 1e-10 * scale * n, Err::NoConvergence,
          "Jacobi sweeps exhausted before off-diagonal vanished");

  EigResult out;
  out.values.resize(size_t(n));
  std::vector<int> order(size_t(n), 0);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  out.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[size_t(k)] = a(order[size_t(k)], order[size_t(k)]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[size_t(k)]);
  }
  return out;
}

Vector eigvals_hermitian(const CMatrix& m) {
  require(m.rows == m.cols, Err::NotHermitian, "matrix not square");
  double scale = std::max(1.0, max_abs(m));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      require(std::abs(m(i, j) - std::conj(m(j, i))) <= 1e-12 * scale, Err::NotHermitian,
              "Hermitian violation beyond 1e-12 of matrix scale");
  if (max_imag(m) == 0.0) return eig_symmetric(real_part(m)).values;

  // Real embedding doubles each eigenvalue; collapse sorted pairs.
  EigResult full = eig_symmetric(embed_complex_as_real(m));
  Vector vals;
  vals.reserve(size_t(m.rows));
  for (size_t k = 0; k + 1 < full.values.size(); k += 2)
    vals.push_back(0.5 * (full.values[k] + full.values[k + 1]));
  return vals;
}

bool is_psd(const Matrix& m, double tol) {
  EigResult e = eig_symmetric(m);  // propagates NotHermitian
  double floor = -tol * std::max(1.0, max_abs(m));
  return e.values.empty() || e.values.front() >= floor;
}

double min_eigenvalue(const Matrix& m) {
  EigResult e = eig_symmetric(m);
  return e.values.empty() ? 0.0 : e.values.front();
}

double skew_spectral_radius(const Matrix& w) {
  require(w.square(), Err::NotSkew, "matrix not square");
  double scale = std::max(1.0, max_abs(w));
  for (int i = 0; i < w.rows; ++i)
    for (int j = 0; j < w.cols; ++j)
      require(std::fabs(w(i, j) + w(j, i)) <= 1e-12 * scale, Err::NotSkew,
              "skew symmetry violation");
  // i*W is Hermitian with purely imaginary entries; its embedding is the real
  // symmetric block matrix [[0, -W], [W, 0]].
  CMatrix h(w.rows, w.cols);
  for (int i = 0; i < w.rows; ++i)
    for (int j = 0; j < w.cols; ++j) h(i, j) = Complex(0.0, w(i, j));
  Vector vals = eigvals_hermitian(h);
  double r = 0.0;
  for (double v : vals) r = std::max(r, std::fabs(v));
  return r;
}

}  // namespace odelab
