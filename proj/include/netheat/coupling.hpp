#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "netheat/errors.hpp"

namespace netheat {

/// Vertex coupling matrix B. Row/column i corresponds to the i-th coupled
/// vertex (the non-absorbing vertices in ascending index order, or all
/// vertices for the all-Kirchhoff system).
struct CouplingMatrix {
  Eigen::MatrixXcd entries;

  CouplingMatrix() = default;
  /// Throws NonSquare.
  explicit CouplingMatrix(Eigen::MatrixXcd b);

  Eigen::Index dim() const { return entries.rows(); }
  /// n x n matrix with B in the upper-left block, zero elsewhere.
  Eigen::MatrixXcd padded(Eigen::Index n) const;
};

/// Structural flags of a coupling matrix, all decided at a tolerance.
struct CouplingReport {
  bool is_real = false;
  bool is_dissipative = false;    // largest eigenvalue of (B + B*)/2 <= tol
  bool is_self_adjoint = false;
  bool positive_offdiagonal = false;  // off-diagonal real and >= -tol
  bool row_criterion = false;     // Re b_ii + sum_{h != i} |b_ih| <= tol, all i
  bool column_criterion = false;  // Re b_ii + sum_{h != i} |b_hi| <= tol, all i
  /// Partition of indices into >= 2 groups uncoupled by B (off-diagonal
  /// support), present only when such a split exists.
  std::optional<std::vector<std::vector<int>>> block_partition;
};

CouplingReport classify_coupling(const CouplingMatrix& b, double tol);

/// Companion matrix with diagonal Re b_ii and off-diagonal |b_ih|; its
/// exponential dominates |exp(tB)| entrywise.
CouplingMatrix modulus_matrix(const CouplingMatrix& b);

/// Dense exp(tB); reference oracle for dimensions up to 64.
/// Throws DimensionTooLarge, InvalidArgument (t < 0).
Eigen::MatrixXcd matrix_semigroup(const CouplingMatrix& b, double t);

/// True iff the max-abs-row-sum norm of exp(tB) stays <= 1 (+1e-9) on the
/// grid; seeded random vectors provide a redundant cross-check.
bool verify_matrix_linf_contractivity(const CouplingMatrix& b,
                                      const std::vector<double>& t_grid,
                                      int samples, std::uint64_t seed);

/// True iff |exp(t B_tilde)| <= exp(tB) entrywise on the grid. Requires B
/// real with nonnegative off-diagonal (NotPositiveGenerator) and matching
/// dimensions (DimensionMismatch).
bool dominates_matrix(const CouplingMatrix& b, const CouplingMatrix& b_tilde,
                      const std::vector<double>& t_grid);

/// max_i (Re b_ii + sum_{h != i} |b_ih|); <= 0 is the row criterion.
/// This equals the logarithmic sup-norm derivative of t -> exp(tB) at 0.
double row_criterion_margin(const Eigen::MatrixXcd& b);
double column_criterion_margin(const Eigen::MatrixXcd& b);

/// Seeded complex test matrices alternating between row-criterion
/// satisfying and violating draws, filtered so |row margin| >= margin_floor.
std::vector<Eigen::MatrixXcd> random_complex_matrices(int dim, int count,
                                                      std::uint64_t seed,
                                                      double margin_floor);

}  // namespace netheat
