#include "odelab/clockham.hpp"

#include <cmath>

#include "odelab/eig.hpp"

namespace odelab {

namespace {

constexpr int kMaxJointDim = 4096;
constexpr double kUnitTol = 1e-12;

// Writes src into dst starting at block row br, block column bc (block size s).
void add_block(Matrix& dst, const Matrix& src, int br, int bc, int s, double sign) {
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) dst(br * s + i, bc * s + j) += sign * src(i, j);
}

void add_identity_block(Matrix& dst, int b, int s) {
  for (int i = 0; i < s; ++i) dst(b * s + i, b * s + i) += 1.0;
}

}  // namespace

int ClockProgram::step_count() const {
  return mode == ProgramMode::unitary ? int(unitaries.size()) : int(writes.size());
}

Matrix ClockProgram::step_matrix(int j) const {
  require(j >= 1 && j <= step_count(), Err::OutOfRange, "step index outside the program");
  if (mode == ProgramMode::unitary) return unitaries[size_t(j - 1)];
  return outer(writes[size_t(j - 1)], reads[size_t(j - 1)]);
}

bool ClockProgram::chained(double tol) const {
  if (mode == ProgramMode::unitary) return true;
  for (size_t j = 0; j + 1 < writes.size(); ++j)
    if (std::abs(std::abs(dot(writes[j], reads[j + 1])) - 1.0) > tol) return false;
  return true;
}

void ClockProgram::validate() const {
  require(data_dim >= 1, Err::BadConfig, "data register must have positive dimension");
  if (mode == ProgramMode::unitary) {
    for (const Matrix& u : unitaries) {
      require(u.rows == data_dim && u.cols == data_dim, Err::DimMismatch,
              "step matrices must be square on the data register");
      require(max_abs(transpose(u) * u - Matrix::identity(data_dim)) <= kUnitTol,
              Err::NotUnitary, "step matrix is not orthogonal");
    }
  } else {
    require(reads.size() == writes.size(), Err::DimMismatch,
            "each step needs one read and one write vector");
    for (size_t j = 0; j < reads.size(); ++j) {
      require(int(reads[j].size()) == data_dim && int(writes[j].size()) == data_dim,
              Err::DimMismatch, "read/write vectors must match the data register");
      require(std::abs(norm2(reads[j]) - 1.0) <= kUnitTol, Err::NotNormalized,
              "read vectors must have unit norm");
      require(std::abs(norm2(writes[j]) - 1.0) <= kUnitTol, Err::NotNormalized,
              "write vectors must have unit norm");
    }
  }
}

ClockHamiltonian build_h_tm(const ClockProgram& prog) {
  prog.validate();
  int lc = prog.step_count();
  int s = prog.data_dim;
  long long joint = static_cast<long long>(s) * (lc + 1);
  require(joint <= kMaxJointDim, Err::TooLarge,
          "joint data/clock dimension exceeds the desk-scale cap");

  ClockHamiltonian ch;
  ch.steps = lc;
  ch.data_dim = s;
  ch.h = Matrix(int(joint), int(joint));
  for (int j = 1; j <= lc; ++j) {
    Matrix u = prog.step_matrix(j);
    add_identity_block(ch.h, j - 1, s);
    add_identity_block(ch.h, j, s);
    add_block(ch.h, u, j, j - 1, s, -1.0);
    add_block(ch.h, transpose(u), j - 1, j, s, -1.0);
  }

  EigResult eig = eig_symmetric(ch.h);
  ch.spectrum = eig.values;
  ch.ground_energy = ch.spectrum.empty() ? 0.0 : ch.spectrum[0];
  ch.gap = ch.spectrum.size() >= 2 ? ch.spectrum[1] - ch.spectrum[0] : 0.0;
  return ch;
}

Vector history_state(const ClockProgram& prog, const Vector& initial) {
  prog.validate();
  int s = prog.data_dim;
  require(int(initial.size()) == s, Err::DimMismatch,
          "initial vector must match the data register");
  require(std::abs(norm2(initial) - 1.0) <= kUnitTol, Err::NotNormalized,
          "initial vector must have unit norm");

  int lc = prog.step_count();
  double scale = 1.0 / std::sqrt(double(lc + 1));
  Vector state = zeros(s * (lc + 1));
  Vector psi = initial;
  for (int j = 0; j <= lc; ++j) {
    if (j > 0) psi = prog.step_matrix(j) * psi;
    for (int i = 0; i < s; ++i) state[size_t(j * s + i)] = scale * psi[size_t(i)];
  }
  return state;
}

GroundReport verify_ground_space(const ClockHamiltonian& ch, const ClockProgram& prog,
                                 const Vector& initial) {
  GroundReport report;
  report.ground_energy = ch.ground_energy;

  Vector history = history_state(prog, initial);
  report.history_residual = norm2(ch.h * history);

  // Sector basis: the trajectory states live in disjoint clock blocks, so
  // normalizing each nonzero one gives an orthonormal family.
  int s = ch.data_dim;
  int lc = ch.steps;
  std::vector<Vector> basis;
  Vector psi = initial;
  for (int j = 0; j <= lc; ++j) {
    if (j > 0) psi = prog.step_matrix(j) * psi;
    double nrm = norm2(psi);
    if (nrm <= 1e-14) continue;  // rank-one steps can annihilate the trajectory
    Vector phi = zeros(s * (lc + 1));
    for (int i = 0; i < s; ++i) phi[size_t(j * s + i)] = psi[size_t(i)] / nrm;
    basis.push_back(std::move(phi));
  }

  int m = int(basis.size());
  if (m == 0) return report;
  Matrix sector(m, m);
  for (int a = 0; a < m; ++a) {
    Vector ha = ch.h * basis[size_t(a)];
    for (int b = 0; b < m; ++b) sector(b, a) = dot(basis[size_t(b)], ha);
  }
  // The projection is symmetric up to roundoff; symmetrize before solving.
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double v = 0.5 * (sector(a, b) + sector(b, a));
      sector(a, b) = v;
      sector(b, a) = v;
    }
  EigResult eig = eig_symmetric(sector);
  int near_zero = 0;
  for (double v : eig.values)
    if (std::abs(v) < 1e-8) ++near_zero;
  report.unique_in_sector = near_zero == 1;
  report.sector_gap = m >= 2 ? eig.values[1] - eig.values[0] : 0.0;
  return report;
}

Vector readout(const Vector& history, int steps, int data_dim) {
  require(steps >= 0 && data_dim >= 1, Err::BadConfig, "invalid register layout");
  require(int(history.size()) == data_dim * (steps + 1), Err::DimMismatch,
          "history vector does not match the register layout");
  Vector block(size_t(data_dim), 0.0);
  int off = steps * data_dim;
  for (int i = 0; i < data_dim; ++i) block[size_t(i)] = history[size_t(off + i)];
  double nrm = norm2(block);
  require(nrm > 1e-14, Err::ZeroProjection, "final clock block is numerically zero");
  for (double& v : block) v /= nrm;
  return block;
}

Matrix compile_truth_table(const std::vector<int>& table, int bits) {
  require(bits >= 1 && bits <= 3, Err::OutOfRange,
          "truth tables are supported up to three bits");
  int n = 1 << bits;
  require(int(table.size()) == n, Err::BadConfig,
          "table must list one output per input pattern");
  std::vector<char> seen(size_t(n), 0);
  bool injective = true;
  for (int v : table) {
    require(v >= 0 && v < n, Err::OutOfRange, "table output outside the bit range");
    if (seen[size_t(v)]) injective = false;
    seen[size_t(v)] = 1;
  }

  if (injective) {
    Matrix p(n, n);
    for (int x = 0; x < n; ++x) p(table[size_t(x)], x) = 1.0;
    return p;
  }
  // Reversible XOR embedding on an ancilla register of the same width:
  // (x, a) -> (x, a xor f(x)), always a permutation (its own inverse).
  int big = n * n;
  Matrix q(big, big);
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < n; ++a) q(x * n + (a ^ table[size_t(x)]), x * n + a) = 1.0;
  return q;
}

}  // namespace odelab
