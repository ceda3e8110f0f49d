#pragma once

#include "odelab/linalg.hpp"

namespace odelab {

struct EigResult {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

// Cyclic Jacobi rotations for real symmetric matrices. Input symmetry is
// checked against 1e-12 * max|entry| and violations throw NotHermitian.
EigResult eig_symmetric(const Matrix& m);

// Hermitian complex matrices go through the real 2n x 2n embedding, which
// doubles every eigenvalue; the doubled spectrum is collapsed before returning.
Vector eigvals_hermitian(const CMatrix& m);

// min eigenvalue >= -tol * max(1, max|entry|). Throws NotHermitian on
// asymmetric input rather than guessing.
bool is_psd(const Matrix& m, double tol = 1e-10);

double min_eigenvalue(const Matrix& m);

// Largest |eigenvalue| of a real skew matrix W, computed from the Hermitian
// matrix iW via the complex-to-real embedding. Throws NotSkew.
double skew_spectral_radius(const Matrix& w);

}  // namespace odelab
