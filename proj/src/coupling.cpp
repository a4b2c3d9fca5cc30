#include "netheat/coupling.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace netheat {
namespace {

constexpr Eigen::Index kMaxExpDim = 64;
constexpr double kRowSumTol = 1e-9;

double max_abs_row_sum(const Eigen::MatrixXcd& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Groups indices connected through nonzero off-diagonal entries of b
/// (support symmetrized).
std::vector<std::vector<int>> support_components(const Eigen::MatrixXcd& b,
                                                 double tol) {
  const int n = static_cast<int>(b.rows());
  std::vector<int> id(n, -1);
  int next = 0;
  for (int start = 0; start < n; ++start) {
    if (id[start] >= 0) continue;
    id[start] = next;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int h = 0; h < n; ++h) {
        if (id[h] >= 0 || h == i) continue;
        if (std::abs(b(i, h)) > tol || std::abs(b(h, i)) > tol) {
          id[h] = next;
          stack.push_back(h);
        }
      }
    }
    ++next;
  }
  std::vector<std::vector<int>> parts(next);
  for (int v = 0; v < n; ++v) parts[id[v]].push_back(v);
  return parts;
}

}  // namespace

CouplingMatrix::CouplingMatrix(Eigen::MatrixXcd b) : entries(std::move(b)) {
  if (entries.rows() != entries.cols()) {
    fail(ErrorCode::NonSquare, "coupling matrix is " +
                                   std::to_string(entries.rows()) + "x" +
                                   std::to_string(entries.cols()));
  }
}

Eigen::MatrixXcd CouplingMatrix::padded(Eigen::Index n) const {
  if (n < dim()) {
    fail(ErrorCode::DimensionMismatch,
         "padding size " + std::to_string(n) + " below coupling dimension " +
             std::to_string(dim()));
  }
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
  block.topLeftCorner(dim(), dim()) = entries;
  return block;
}

double row_criterion_margin(const Eigen::MatrixXcd& b) {
  double margin = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    double row = b(i, i).real();
    for (Eigen::Index h = 0; h < b.cols(); ++h) {
      if (h != i) row += std::abs(b(i, h));
    }
    margin = std::max(margin, row);
  }
  return margin;
}

double column_criterion_margin(const Eigen::MatrixXcd& b) {
  return row_criterion_margin(b.transpose());
}

CouplingReport classify_coupling(const CouplingMatrix& b, double tol) {
  const Eigen::MatrixXcd& a = b.entries;
  CouplingReport report;
  const Eigen::Index n = a.rows();

  report.is_real = n == 0 || a.imag().cwiseAbs().maxCoeff() <= tol;
  report.is_self_adjoint =
      n == 0 || (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;

  if (n == 0) {
    report.is_dissipative = true;
  } else {
    Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::EigensolverFailure, "hermitian part eigensolve failed");
    }
    report.is_dissipative = solver.eigenvalues().maxCoeff() <= tol;
  }

  report.positive_offdiagonal = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index h = 0; h < n; ++h) {
      if (i == h) continue;
      if (a(i, h).real() < -tol || std::abs(a(i, h).imag()) > tol) {
        report.positive_offdiagonal = false;
      }
    }
  }

  report.row_criterion = n == 0 || row_criterion_margin(a) <= tol;
  report.column_criterion = n == 0 || column_criterion_margin(a) <= tol;

  if (n > 0) {
    auto parts = support_components(a, tol);
    if (parts.size() > 1) report.block_partition = std::move(parts);
  }
  return report;
}

CouplingMatrix modulus_matrix(const CouplingMatrix& b) {
  Eigen::MatrixXcd sharp = b.entries.cwiseAbs().cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < sharp.rows(); ++i) {
    sharp(i, i) = b.entries(i, i).real();
  }
  return CouplingMatrix(std::move(sharp));
}

Eigen::MatrixXcd matrix_semigroup(const CouplingMatrix& b, double t) {
  if (b.dim() > kMaxExpDim) {
    fail(ErrorCode::DimensionTooLarge,
         "dense exponential limited to dimension 64, got " +
             std::to_string(b.dim()));
  }
  if (!(t >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "time must be nonnegative");
  }
  if (b.dim() == 0) return Eigen::MatrixXcd(0, 0);
  return (t * b.entries).exp();
}

bool verify_matrix_linf_contractivity(const CouplingMatrix& b,
                                      const std::vector<double>& t_grid,
                                      int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (double t : t_grid) {
    Eigen::MatrixXcd e = matrix_semigroup(b, t);
    if (e.size() == 0) continue;
    if (max_abs_row_sum(e) > 1.0 + kRowSumTol) return false;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXcd x(b.dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = std::complex<double>(unit(rng), unit(rng));
      }
      double scale = x.cwiseAbs().maxCoeff();
      if (scale == 0.0) continue;
      if ((e * x).cwiseAbs().maxCoeff() > scale * (1.0 + kRowSumTol)) {
        return false;
      }
    }
  }
  return true;
}

bool dominates_matrix(const CouplingMatrix& b, const CouplingMatrix& b_tilde,
                      const std::vector<double>& t_grid) {
  if (b.dim() != b_tilde.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "coupling dimensions " + std::to_string(b.dim()) + " vs " +
             std::to_string(b_tilde.dim()));
  }
  CouplingReport report = classify_coupling(b, 1e-12);
  if (!report.is_real || !report.positive_offdiagonal) {
    fail(ErrorCode::NotPositiveGenerator,
         "dominating matrix must be real with nonnegative off-diagonal");
  }
  for (double t : t_grid) {
    Eigen::MatrixXcd big = matrix_semigroup(b, t);
    Eigen::MatrixXcd small = matrix_semigroup(b_tilde, t);
    if (big.size() == 0) continue;
    double slack = (big.real() - small.cwiseAbs()).minCoeff();
    if (slack < -1e-10 * std::max(1.0, big.cwiseAbs().maxCoeff())) {
      return false;
    }
  }
  return true;
}

std::vector<Eigen::MatrixXcd> random_complex_matrices(int dim, int count,
                                                      std::uint64_t seed,
                                                      double margin_floor) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(count);
  int k = 0;
  while (static_cast<int>(out.size()) < count) {
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int h = 0; h < dim; ++h) {
        m(i, h) = std::complex<double>(unit(rng), unit(rng));
      }
    }
    if (k++ % 2 == 0) {
      // Push each diagonal entry down until its row satisfies the
      // criterion with a positive gap.
      for (int i = 0; i < dim; ++i) {
        double off = 0.0;
        for (int h = 0; h < dim; ++h) {
          if (h != i) off += std::abs(m(i, h));
        }
        m(i, i) = std::complex<double>(-off - gap(rng), m(i, i).imag());
      }
    }
    if (std::abs(row_criterion_margin(m)) >= margin_floor) {
      out.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace netheat
