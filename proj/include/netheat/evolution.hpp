#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "netheat/discretization.hpp"

namespace netheat {

struct StateVector {
  Eigen::VectorXcd values;
  double time = 0.0;
};

struct NormTriple {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

/// Time-ordered states produced by a stepper, with the norm history.
struct Trajectory {
  std::vector<StateVector> states;
  std::vector<NormTriple> norms;
};

/// Nodal heat kernel at one time: entries * mass * f propagates f, so an
/// entry approximates the kernel value at the two node coordinates. A
/// shared vertex carries a single value.
struct KernelMatrix {
  double t = 0.0;
  Eigen::MatrixXcd entries;
  Eigen::VectorXd coordinates;  // stretched coordinate per dof
};

enum class PNorm { One, Two, Inf };

/// Dense reference propagator exp(-t M^-1 S), limited to 2000 unknowns.
/// A self-adjoint pencil is diagonalized once; otherwise each call uses a
/// scaling-and-squaring exponential.
class DenseSemigroup {
 public:
  explicit DenseSemigroup(const DiscreteOperator& op);

  int dof() const { return dof_; }
  bool hermitian() const { return hermitian_; }
  /// Ascending eigenvalues of the (S, M) pencil (self-adjoint path only).
  const Eigen::VectorXd& pencil_eigenvalues() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& u0, double t) const;
  Eigen::MatrixXcd propagator(double t) const;
  Eigen::MatrixXcd kernel(double t) const;
  /// Kernel through the non-spectral exponential route; exercises an
  /// independent algebraic path on self-adjoint problems.
  Eigen::MatrixXcd kernel_pade(double t) const;
  double norm_2_to_inf(double t) const;

 private:
  Eigen::MatrixXcd propagator_pade(double t) const;

  int dof_ = 0;
  bool hermitian_ = false;
  bool real_ = false;
  Eigen::MatrixXd mass_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
  Eigen::MatrixXd mass_inverse_;
  // Self-adjoint path: V is M-orthonormal, lambda real ascending.
  Eigen::MatrixXcd v_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd v_abs2_;  // |V|^2 entrywise, for 2->inf norms
  // General path.
  Eigen::MatrixXcd generator_;  // M^-1 S
};

/// One Crank-Nicolson step: (M + dt/2 S) u+ = (M - dt/2 S) u.
/// Throws SingularSystem if the factorization fails.
StateVector step_crank_nicolson(const DiscreteOperator& op,
                                const StateVector& u, double dt);

/// Repeated Crank-Nicolson steps until within dt of t_end; records norms.
Trajectory evolve(const DiscreteOperator& op, const StateVector& u0,
                  double t_end, double dt);

/// Dense-exponential reference propagation (DimensionTooLarge above 2000).
StateVector expm_apply(const DiscreteOperator& op, const StateVector& u0,
                       double t);

KernelMatrix heat_kernel(const DiscreteOperator& op, double t);

/// Exact norm of the piecewise-linear interpolant: closed-form L1 per
/// element, mass-weighted L2, nodal max for Linf.
double state_norm(const DiscreteOperator& op, const StateVector& u, PNorm p);

/// Exact discrete value of sup ||T(t) f||_inf / ||f||_2.
double operator_norm_2_to_inf(const DiscreteOperator& op, double t);

/// Closed-form integral over one element of length h whose endpoint values
/// are a and b, of the absolute value of the linear interpolant.
double element_abs_integral(std::complex<double> a, std::complex<double> b,
                            double h);

}  // namespace netheat
