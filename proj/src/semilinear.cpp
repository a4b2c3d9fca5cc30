#include "netheat/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "netheat/errors.hpp"

namespace netheat {

EdgeFlux EdgeFlux::zero() { return EdgeFlux{}; }

EdgeFlux EdgeFlux::quadratic(double a) {
  EdgeFlux f;
  f.kind = Kind::Quadratic;
  f.a = a;
  return f;
}

EdgeFlux EdgeFlux::cubic(double a) {
  EdgeFlux f;
  f.kind = Kind::Cubic;
  f.a = a;
  return f;
}

EdgeFlux EdgeFlux::table(std::vector<double> arguments,
                         std::vector<double> values) {
  if (arguments.size() < 2 || arguments.size() != values.size())
    fail(ErrorCode::InvalidArgument,
         "flux table needs matching argument/value lists of length >= 2");
  for (std::size_t i = 0; i + 1 < arguments.size(); ++i)
    if (!(arguments[i] < arguments[i + 1]))
      fail(ErrorCode::InvalidArgument,
           "flux table arguments must be strictly ascending");
  EdgeFlux f;
  f.kind = Kind::Table;
  f.arguments = std::move(arguments);
  f.values = std::move(values);
  return f;
}

double EdgeFlux::eval(double s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Quadratic:
      return a * s * s;
    case Kind::Cubic:
      return a * s * s * s;
    case Kind::Table:
      break;
  }
  if (s < arguments.front() || s > arguments.back())
    fail(ErrorCode::EvaluationOutOfRange,
         "flux table evaluated at " + std::to_string(s) +
             " outside [" + std::to_string(arguments.front()) + ", " +
             std::to_string(arguments.back()) + "]");
  const auto it =
      std::upper_bound(arguments.begin(), arguments.end(), s);
  const std::size_t hi = std::min(
      arguments.size() - 1,
      static_cast<std::size_t>(std::distance(arguments.begin(), it)));
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  if (hi == lo) return values[lo];
  const double w = (s - arguments[lo]) / (arguments[hi] - arguments[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

NonlinearFlux NonlinearFlux::zero(int edge_count) {
  NonlinearFlux f;
  f.edge.assign(static_cast<std::size_t>(edge_count), EdgeFlux::zero());
  return f;
}

Eigen::VectorXcd assemble_nonlinear_term(const DiscreteOperator& op,
                                         const NonlinearFlux& psi,
                                         const StateVector& u) {
  const int edge_count = op.net.edge_count();
  if (static_cast<int>(psi.edge.size()) != edge_count)
    fail(ErrorCode::DimensionMismatch,
         "one flux per edge required: got " +
             std::to_string(psi.edge.size()) + " for " +
             std::to_string(edge_count) + " edges");
  if (u.values.size() != op.dof())
    fail(ErrorCode::DimensionMismatch, "state size does not match dof count");

  Eigen::VectorXcd n = Eigen::VectorXcd::Zero(op.dof());
  // Gauss points of [0,1]; element values of the linear interpolant.
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double g1 = 0.5 + 0.5 / std::sqrt(3.0);

  auto nodal = [&](int dof) -> double {
    return dof < 0 ? 0.0 : u.values(dof).real();
  };

  for (int j = 0; j < edge_count; ++j) {
    const EdgeFlux& f = psi.edge[j];
    const int elements = op.mesh.elements(j);
    for (int e = 0; e < elements; ++e) {
      const int da = op.dofs.node(op.net, op.mesh, j, e);
      const int db = op.dofs.node(op.net, op.mesh, j, e + 1);
      const double ua = nodal(da);
      const double ub = nodal(db);
      // -int psi(u_h) phi' dx with phi' = -1/h resp. +1/h, h/2-weighted
      // two-point quadrature: the h factors cancel.
      const double mean =
          0.5 * (f.eval((1.0 - g0) * ua + g0 * ub) +
                 f.eval((1.0 - g1) * ua + g1 * ub));
      if (da >= 0) n(da) += mean;
      if (db >= 0) n(db) -= mean;
    }
    // Edge-endpoint boundary values [psi(u) phi] reinstated at the vertex
    // test functions, so the term equals int (psi(u))' phi and constants
    // telescope to zero.
    const int tail_dof = op.dofs.vertex[op.net.edges[j].tail];
    const int head_dof = op.dofs.vertex[op.net.edges[j].head];
    if (tail_dof >= 0) n(tail_dof) -= f.eval(nodal(tail_dof));
    if (head_dof >= 0) n(head_dof) += f.eval(nodal(head_dof));
  }
  return n;
}

StateVector imex_step(const DiscreteOperator& op, const NonlinearFlux& psi,
                      const StateVector& u, double dt, double blowup_cap) {
  if (!(dt > 0.0))
    fail(ErrorCode::InvalidArgument, "step size must be positive");
  if (!(blowup_cap > 0.0))
    fail(ErrorCode::InvalidArgument, "blowup cap must be positive");

  Eigen::SparseMatrix<std::complex<double>> lhs =
      op.mass.cast<std::complex<double>>() + dt * op.stiffness;
  lhs.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success)
    fail(ErrorCode::SingularSystem, "implicit step matrix is singular");

  const Eigen::VectorXcd rhs =
      op.mass.cast<std::complex<double>>() * u.values +
      dt * assemble_nonlinear_term(op, psi, u);
  StateVector next{lu.solve(rhs), u.time + dt};
  const double sup = next.values.cwiseAbs().maxCoeff();
  if (!std::isfinite(sup) || sup > blowup_cap)
    fail(ErrorCode::Blowup, "state sup norm " + std::to_string(sup) +
                                " exceeded the cap at t = " +
                                std::to_string(next.time));
  return next;
}

Trajectory solve_semilinear(const DiscreteOperator& op,
                            const NonlinearFlux& psi, const StateVector& u0,
                            double t_end, double dt, double blowup_cap) {
  if (!(dt > 0.0))
    fail(ErrorCode::InvalidArgument, "step size must be positive");
  if (t_end < 0.0)
    fail(ErrorCode::InvalidArgument, "final time must be nonnegative");

  Trajectory tr;
  auto record = [&](const StateVector& s) {
    tr.states.push_back(s);
    tr.norms.push_back(NormTriple{state_norm(op, s, PNorm::One),
                                  state_norm(op, s, PNorm::Two),
                                  state_norm(op, s, PNorm::Inf)});
  };
  record(u0);
  const long long steps = std::llround(t_end / dt);
  StateVector current = u0;
  for (long long i = 0; i < steps; ++i) {
    current = imex_step(op, psi, current, dt, blowup_cap);
    record(current);
  }
  return tr;
}

}  // namespace netheat
