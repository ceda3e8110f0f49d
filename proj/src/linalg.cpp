#include "odelab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace odelab {

const char* err_name(Err e) {
  switch (e) {
    case Err::DimMismatch: return "DimMismatch";
    case Err::NotHermitian: return "NotHermitian";
    case Err::NoConvergence: return "NoConvergence";
    case Err::ImplicitNoConvergence: return "ImplicitNoConvergence";
    case Err::NotReducible: return "NotReducible";
    case Err::NotSkew: return "NotSkew";
    case Err::NotOrthogonal: return "NotOrthogonal";
    case Err::NotUnitary: return "NotUnitary";
    case Err::NotNormalized: return "NotNormalized";
    case Err::BadPartition: return "BadPartition";
    case Err::UnsupportedSpec: return "UnsupportedSpec";
    case Err::SingularMatrix: return "SingularMatrix";
    case Err::OutOfRange: return "OutOfRange";
    case Err::TooLarge: return "TooLarge";
    case Err::ZeroProjection: return "ZeroProjection";
    case Err::NonFinite: return "NonFinite";
    case Err::BadConfig: return "BadConfig";
    case Err::IoError: return "IoError";
  }
  return "UnknownError";
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::scalar(int n, double v) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = v;
  return m;
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
  return m;
}

Vector zeros(int n) { return Vector(size_t(n), 0.0); }

double dot(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), Err::DimMismatch, "dot");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

Vector vec_add(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), Err::DimMismatch, "vec_add");
  Vector r(a);
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Vector vec_sub(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), Err::DimMismatch, "vec_sub");
  Vector r(a);
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

Vector vec_scale(double s, const Vector& v) {
  Vector r(v);
  for (double& x : r) x *= s;
  return r;
}

void axpy(double s, const Vector& x, Vector& y) {
  require(x.size() == y.size(), Err::DimMismatch, "axpy");
  for (size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

Vector hadamard(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), Err::DimMismatch, "hadamard");
  Vector r(a);
  for (size_t i = 0; i < b.size(); ++i) r[i] *= b[i];
  return r;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, Err::DimMismatch, "matrix add");
  Matrix r(a);
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, Err::DimMismatch, "matrix sub");
  Matrix r(a);
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, Err::DimMismatch, "matrix mul");
  Matrix r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

Matrix operator*(double s, const Matrix& m) {
  Matrix r(m);
  for (double& x : r.data) x *= s;
  return r;
}

Vector operator*(const Matrix& m, const Vector& v) {
  require(m.cols == int(v.size()), Err::DimMismatch, "matvec");
  Vector r(size_t(m.rows), 0.0);
  mat_vec_into(m, v.data(), r.data());
  return r;
}

void mat_vec_into(const Matrix& m, const double* v, double* out) {
  const double* row = m.data.data();
  for (int i = 0; i < m.rows; ++i, row += m.cols) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += row[j] * v[j];
    out[i] = s;
  }
}

Matrix transpose(const Matrix& m) {
  Matrix r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
  return r;
}

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (double x : m.data) v = std::max(v, std::fabs(x));
  return v;
}

double fro_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data) s += x * x;
  return std::sqrt(s);
}

bool all_finite(const Matrix& m) {
  for (double x : m.data)
    if (!std::isfinite(x)) return false;
  return true;
}

bool is_zero(const Matrix& m, double tol) {
  for (double x : m.data)
    if (std::fabs(x) > tol) return false;
  return true;
}

Matrix diag_embed(const Vector& d) {
  Matrix m(int(d.size()), int(d.size()));
  for (int i = 0; i < m.rows; ++i) m(i, i) = d[size_t(i)];
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < b.rows; ++k)
        for (int l = 0; l < b.cols; ++l) r(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
    }
  return r;
}

Matrix outer(const Vector& a, const Vector& b) {
  Matrix r(int(a.size()), int(b.size()));
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j) r(i, j) = a[size_t(i)] * b[size_t(j)];
  return r;
}

namespace {

// In-place LU with partial pivoting over a row-major buffer.
void lu_factor(std::vector<double>& a, std::vector<int>& perm, int n) {
  perm.resize(size_t(n));
  for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(a[size_t(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::fabs(a[size_t(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    require(best > 0.0 && std::isfinite(best), Err::SingularMatrix, "pivot vanished");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a[size_t(piv) * n + j], a[size_t(col) * n + j]);
      std::swap(perm[size_t(piv)], perm[size_t(col)]);
    }
    double d = a[size_t(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      double f = a[size_t(r) * n + col] / d;
      a[size_t(r) * n + col] = f;
      if (f == 0.0) continue;
      for (int j = col + 1; j < n; ++j) a[size_t(r) * n + j] -= f * a[size_t(col) * n + j];
    }
  }
}

void lu_solve(const std::vector<double>& lu, const std::vector<int>& perm, int n,
              const double* rhs, double* out) {
  for (int i = 0; i < n; ++i) out[i] = rhs[perm[size_t(i)]];
  for (int i = 1; i < n; ++i) {
    double s = out[i];
    for (int j = 0; j < i; ++j) s -= lu[size_t(i) * n + j] * out[j];
    out[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = out[i];
    for (int j = i + 1; j < n; ++j) s -= lu[size_t(i) * n + j] * out[j];
    out[i] = s / lu[size_t(i) * n + i];
  }
}

}  // namespace

Vector solve(Matrix a, Vector rhs) {
  require(a.square() && a.rows == int(rhs.size()), Err::DimMismatch, "solve");
  std::vector<int> perm;
  lu_factor(a.data, perm, a.rows);
  Vector out(rhs.size());
  lu_solve(a.data, perm, a.rows, rhs.data(), out.data());
  return out;
}

Matrix inverse(const Matrix& m) {
  require(m.square(), Err::DimMismatch, "inverse of non-square");
  int n = m.rows;
  std::vector<double> lu = m.data;
  std::vector<int> perm;
  lu_factor(lu, perm, n);
  Matrix inv(n, n);
  Vector e(size_t(n), 0.0), col(size_t(n), 0.0);
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[size_t(j)] = 1.0;
    lu_solve(lu, perm, n, e.data(), col.data());
    for (int i = 0; i < n; ++i) inv(i, j) = col[size_t(i)];
  }
  return inv;
}

LuSolver::LuSolver(Matrix a) {
  require(a.square(), Err::DimMismatch, "LuSolver needs square matrix");
  n_ = a.rows;
  lu_ = std::move(a.data);
  lu_factor(lu_, perm_, n_);
}

void LuSolver::solve_into(const double* rhs, double* out) const {
  lu_solve(lu_, perm_, n_, rhs, out);
}

Vector LuSolver::solve(const Vector& rhs) const {
  require(int(rhs.size()) == n_, Err::DimMismatch, "LuSolver rhs");
  Vector out(rhs.size());
  solve_into(rhs.data(), out.data());
  return out;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require(a.cols == b.rows, Err::DimMismatch, "cmatrix mul");
  CMatrix r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

CVector operator*(const CMatrix& m, const CVector& v) {
  require(m.cols == int(v.size()), Err::DimMismatch, "cmatvec");
  CVector r(size_t(m.rows), Complex(0.0, 0.0));
  for (int i = 0; i < m.rows; ++i) {
    Complex s(0.0, 0.0);
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[size_t(j)];
    r[size_t(i)] = s;
  }
  return r;
}

CMatrix adjoint(const CMatrix& m) {
  CMatrix r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

double max_abs(const CMatrix& m) {
  double v = 0.0;
  for (const Complex& x : m.data) v = std::max(v, std::abs(x));
  return v;
}

double norm2(const CVector& v) {
  double s = 0.0;
  for (const Complex& x : v) s += std::norm(x);
  return std::sqrt(s);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      Complex aij = a(i, j);
      if (aij == Complex(0.0, 0.0)) continue;
      for (int k = 0; k < b.rows; ++k)
        for (int l = 0; l < b.cols; ++l) r(i * b.rows + k, j * b.cols + l) = aij * b(k, l);
    }
  return r;
}

CMatrix to_complex(const Matrix& m) {
  CMatrix r(m.rows, m.cols);
  for (size_t i = 0; i < m.data.size(); ++i) r.data[i] = Complex(m.data[i], 0.0);
  return r;
}

double max_imag(const CMatrix& m) {
  double v = 0.0;
  for (const Complex& x : m.data) v = std::max(v, std::fabs(x.imag()));
  return v;
}

Matrix real_part(const CMatrix& m) {
  Matrix r(m.rows, m.cols);
  for (size_t i = 0; i < m.data.size(); ++i) r.data[i] = m.data[i].real();
  return r;
}

Matrix embed_complex_as_real(const CMatrix& m) {
  Matrix r(2 * m.rows, 2 * m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      double a = m(i, j).real();
      double b = m(i, j).imag();
      r(i, j) = a;
      r(i, j + m.cols) = -b;
      r(i + m.rows, j) = b;
      r(i + m.rows, j + m.cols) = a;
    }
  return r;
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(gen);
}

double Rng::gauss() {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(gen);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(gen);
}

Vector Rng::gauss_vector(int n) {
  Vector v(size_t(n), 0.0);
  for (double& x : v) x = gauss();
  return v;
}

Vector Rng::unit_vector(int n) {
  Vector v = gauss_vector(n);
  double nrm = norm2(v);
  while (nrm < 1e-12) {
    v = gauss_vector(n);
    nrm = norm2(v);
  }
  for (double& x : v) x /= nrm;
  return v;
}

Matrix Rng::gauss_matrix(int r, int c, double scale) {
  Matrix m(r, c);
  for (double& x : m.data) x = scale * gauss();
  return m;
}

Matrix Rng::random_skew(int n, double scale) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = scale * gauss();
      m(i, j) = v;
      m(j, i) = -v;
    }
  return m;
}

Matrix Rng::random_orthogonal(int n) {
  // Gram-Schmidt on a Gaussian matrix; deterministic given the generator state.
  Matrix g = gauss_matrix(n, n);
  Matrix q(n, n);
  for (int j = 0; j < n; ++j) {
    Vector col(size_t(n), 0.0);
    for (int i = 0; i < n; ++i) col[size_t(i)] = g(i, j);
    for (int prev = 0; prev < j; ++prev) {
      double proj = 0.0;
      for (int i = 0; i < n; ++i) proj += q(i, prev) * col[size_t(i)];
      for (int i = 0; i < n; ++i) col[size_t(i)] -= proj * q(i, prev);
    }
    double nrm = norm2(col);
    require(nrm > 1e-10, Err::SingularMatrix, "degenerate random orthogonal draw");
    for (int i = 0; i < n; ++i) q(i, j) = col[size_t(i)] / nrm;
  }
  return q;
}

}  // namespace odelab
