#pragma once

#include <vector>

#include "netheat/evolution.hpp"

namespace netheat {

/// Per-edge convective flux psi_j, read on the real part of the state.
/// Tabulated fluxes interpolate linearly between samples and refuse
/// evaluation outside the tabulated range.
struct EdgeFlux {
  enum class Kind { Zero, Quadratic, Cubic, Table };

  Kind kind = Kind::Zero;
  double a = 0.0;                 // coefficient of s^2 (Quadratic) or s^3
  std::vector<double> arguments;  // strictly ascending, Table only
  std::vector<double> values;

  static EdgeFlux zero();
  static EdgeFlux quadratic(double a);
  static EdgeFlux cubic(double a);
  /// Throws InvalidArgument on malformed tables.
  static EdgeFlux table(std::vector<double> arguments,
                        std::vector<double> values);

  /// Throws EvaluationOutOfRange outside a tabulated range.
  double eval(double s) const;
};

struct NonlinearFlux {
  std::vector<EdgeFlux> edge;  // one entry per edge

  static NonlinearFlux zero(int edge_count);
};

/// Weak convective term: against every test function the value of
/// integral (psi(u))' phi, i.e. per element -int psi(u_h) phi' dx by
/// two-point Gauss quadrature, plus the edge-endpoint boundary values at
/// vertex test functions. Constant states produce the zero vector and the
/// diffusive vertex balance is left untouched.
/// Throws DimensionMismatch and EvaluationOutOfRange.
Eigen::VectorXcd assemble_nonlinear_term(const DiscreteOperator& op,
                                         const NonlinearFlux& psi,
                                         const StateVector& u);

/// One implicit-explicit step: (M + dt S) u+ = M u + dt N(u).
/// Throws SingularSystem and Blowup (sup norm above blowup_cap).
StateVector imex_step(const DiscreteOperator& op, const NonlinearFlux& psi,
                      const StateVector& u, double dt,
                      double blowup_cap = 1e6);

/// Time loop of imex_step with norm recording.
Trajectory solve_semilinear(const DiscreteOperator& op,
                            const NonlinearFlux& psi, const StateVector& u0,
                            double t_end, double dt, double blowup_cap = 1e6);

}  // namespace netheat
