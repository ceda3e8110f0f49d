#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "odelab/errors.hpp"

namespace odelab {

using Vector = std::vector<double>;
using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Dense row-major real matrix. Deliberately small: the whole library runs at
// desk scale, so clarity beats cleverness here.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(size_t(r) * c, fill) {
    require(r >= 0 && c >= 0, Err::DimMismatch, "negative matrix dims");
  }

  double& operator()(int i, int j) { return data[size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return data[size_t(i) * cols + j]; }
  bool empty() const { return rows == 0 || cols == 0; }
  bool square() const { return rows == cols; }

  static Matrix identity(int n);
  static Matrix scalar(int n, double v);  // v * I
};

struct CMatrix {
  int rows = 0;
  int cols = 0;
  CVector data;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), data(size_t(r) * c, Complex(0.0, 0.0)) {}
  Complex& operator()(int i, int j) { return data[size_t(i) * cols + j]; }
  Complex operator()(int i, int j) const { return data[size_t(i) * cols + j]; }

  static CMatrix identity(int n);
};

// --- vector helpers -------------------------------------------------------

Vector zeros(int n);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double max_abs(const Vector& v);
Vector vec_add(const Vector& a, const Vector& b);
Vector vec_sub(const Vector& a, const Vector& b);
Vector vec_scale(double s, const Vector& v);
void axpy(double s, const Vector& x, Vector& y);  // y += s*x
Vector hadamard(const Vector& a, const Vector& b);
bool all_finite(const Vector& v);

// --- matrix helpers -------------------------------------------------------

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
Vector operator*(const Matrix& m, const Vector& v);
Matrix transpose(const Matrix& m);
double max_abs(const Matrix& m);
double fro_norm(const Matrix& m);
bool all_finite(const Matrix& m);
bool is_zero(const Matrix& m, double tol = 0.0);

// matvec into a preallocated buffer, the allocation-free path for hot loops
void mat_vec_into(const Matrix& m, const double* v, double* out);

Matrix diag_embed(const Vector& d);
Matrix kron(const Matrix& a, const Matrix& b);
Matrix outer(const Vector& a, const Vector& b);

// Gaussian elimination with partial pivoting.
Vector solve(Matrix a, Vector rhs);  // throws SingularMatrix
Matrix inverse(const Matrix& m);

// LU factorization cached for repeated solves against the same matrix.
struct LuSolver {
  explicit LuSolver(Matrix a);
  void solve_into(const double* rhs, double* out) const;
  Vector solve(const Vector& rhs) const;
  int dim() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

// --- complex helpers ------------------------------------------------------

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& m, const CVector& v);
CMatrix adjoint(const CMatrix& m);
double max_abs(const CMatrix& m);
double norm2(const CVector& v);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix to_complex(const Matrix& m);
double max_imag(const CMatrix& m);
Matrix real_part(const CMatrix& m);

// Embeds a complex matrix H = A + iB as the real matrix [[A, -B], [B, A]].
// Hermitian H maps to a symmetric embedding whose spectrum is that of H with
// every eigenvalue doubled.
Matrix embed_complex_as_real(const CMatrix& m);

// --- deterministic randomness ---------------------------------------------

struct Rng {
  explicit Rng(uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi);
  double gauss();
  int uniform_int(int lo, int hi);  // inclusive
  Vector gauss_vector(int n);
  Vector unit_vector(int n);
  Matrix gauss_matrix(int r, int c, double scale = 1.0);
  Matrix random_skew(int n, double scale = 1.0);
  Matrix random_orthogonal(int n);

  std::mt19937_64 gen;
};

}  // namespace odelab
