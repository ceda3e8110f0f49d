#pragma once
// Clock-register Hamiltonian encoding of a reversible straight-line program.
//
// A program of L steps on a data register of dim s is encoded as a real
// symmetric matrix on the joint space data (x) clock, with clock basis
// states 1..L+1. Each step j contributes the four blocks
//   I at (j,j),  -U_j at (j+1,j),  -U_j^T at (j,j+1),  I at (j+1,j+1),
// which is positive semi-definite when U_j is orthogonal. The uniform
// superposition of the program trajectory (the history state) is then a
// zero-energy eigenvector, unique within the subspace reachable from the
// initial data vector and separated from the rest of that sector by a gap.
//
// Layout is clock-major: entry (c-1)*s + i is data coordinate i at clock c,
// matching the convention used by the clock-embedded network module.
//
// Two step representations are supported. Orthogonal matrices make the
// zero-energy property unconditional. Rank-one read/write pairs w r^T make
// it conditional: the history state is annihilated only when consecutive
// steps chain (w_j aligned with r_{j+1}) and the initial vector lies along
// r_1; the verifier therefore reports the residual instead of assuming it.

#include <vector>

#include "odelab/errors.hpp"
#include "odelab/linalg.hpp"

namespace odelab {

enum class ProgramMode { rank_one, unitary };

struct ClockProgram {
  int data_dim = 0;
  ProgramMode mode = ProgramMode::unitary;
  std::vector<Matrix> unitaries;  // unitary mode: one orthogonal matrix per step
  std::vector<Vector> reads;      // rank-one mode: unit read vectors r_j
  std::vector<Vector> writes;     // rank-one mode: unit write vectors w_j

  int step_count() const;
  Matrix step_matrix(int j) const;  // 1-based step; rank-one builds w r^T
  // True when every write vector is aligned (up to sign) with the next read
  // vector; vacuously true for unitary mode and programs under two steps.
  bool chained(double tol = 1e-12) const;
  void validate() const;  // NotUnitary / NotNormalized / DimMismatch
};

struct ClockHamiltonian {
  int steps = 0;     // program length L
  int data_dim = 0;  // s
  Matrix h;          // real symmetric, dim s*(L+1)
  Vector spectrum;   // ascending
  double ground_energy = 0.0;
  double gap = 0.0;  // lambda_1 - lambda_0 of the full spectrum
};

// The verifier's findings; nothing here throws, failed expectations show up
// as out-of-range numbers or a false uniqueness flag.
struct GroundReport {
  double ground_energy = 0.0;
  double sector_gap = 0.0;         // lambda_1 - lambda_0 inside the reachable sector
  double history_residual = 0.0;   // ||H * history_state||
  bool unique_in_sector = false;   // exactly one near-zero sector eigenvalue
};

// Assembles the program Hamiltonian and its full spectrum. Throws TooLarge
// when the joint dimension s*(L+1) exceeds 4096.
ClockHamiltonian build_h_tm(const ClockProgram& prog);

// The normalized trajectory superposition sum_j psi_j (x) e_{j+1} / sqrt(L+1)
// with psi_0 = initial and psi_j = U_j psi_{j-1}. Throws NotNormalized unless
// the initial vector has unit norm.
Vector history_state(const ClockProgram& prog, const Vector& initial);

// Projects the Hamiltonian onto the span of the (normalized, clock-disjoint)
// trajectory states and reports ground energy, sector gap, history residual,
// and whether the near-zero sector eigenvalue is unique.
GroundReport verify_ground_space(const ClockHamiltonian& ch, const ClockProgram& prog,
                                 const Vector& initial);

// Extracts and renormalizes the data block at the final clock position L+1.
// For a unitary-mode history state this is the program output applied to the
// initial vector. Throws ZeroProjection when the block is numerically zero.
Vector readout(const Vector& history, int steps, int data_dim);

// Compiles a truth table over `bits` inputs (entries are the function values
// f(x) for x = 0..2^bits-1) to a permutation matrix. Bijective tables map
// directly on dim 2^bits; non-injective tables get the reversible XOR
// embedding (x, a) -> (x, a xor f(x)) on dim 4^bits.
Matrix compile_truth_table(const std::vector<int>& table, int bits);

}  // namespace odelab
