#include "netheat/evolution.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

namespace netheat {
namespace {

constexpr int kMaxDenseDof = 2000;

void check_state(const DiscreteOperator& op, const Eigen::VectorXcd& u) {
  if (u.size() != op.dof()) {
    fail(ErrorCode::DimensionMismatch,
         "state has " + std::to_string(u.size()) + " entries, operator has " +
             std::to_string(op.dof()) + " unknowns");
  }
}

}  // namespace

DenseSemigroup::DenseSemigroup(const DiscreteOperator& op) : dof_(op.dof()) {
  if (dof_ > kMaxDenseDof) {
    fail(ErrorCode::DimensionTooLarge,
         "dense semigroup limited to 2000 unknowns, got " +
             std::to_string(dof_));
  }
  mass_ = Eigen::MatrixXd(op.mass);
  mass_llt_.compute(mass_);
  if (mass_llt_.info() != Eigen::Success) {
    fail(ErrorCode::SingularSystem, "mass matrix factorization failed");
  }
  mass_inverse_ = mass_llt_.solve(Eigen::MatrixXd::Identity(dof_, dof_));

  Eigen::MatrixXcd s = Eigen::MatrixXcd(op.stiffness);
  real_ = op.stiffness_real;
  hermitian_ = op.stiffness_hermitian;
  if (hermitian_) {
    if (real_) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
          s.real(), mass_);
      if (solver.info() != Eigen::Success) {
        fail(ErrorCode::EigensolverFailure, "pencil eigensolve failed");
      }
      lambda_ = solver.eigenvalues();
      v_ = solver.eigenvectors().cast<std::complex<double>>();
    } else {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
          s, mass_.cast<std::complex<double>>());
      if (solver.info() != Eigen::Success) {
        fail(ErrorCode::EigensolverFailure, "pencil eigensolve failed");
      }
      lambda_ = solver.eigenvalues();
      v_ = solver.eigenvectors();
    }
    v_abs2_ = v_.cwiseAbs2();
  } else {
    const Eigen::MatrixXd s_re = s.real();
    const Eigen::MatrixXd s_im = s.imag();
    const Eigen::MatrixXd g_re = mass_llt_.solve(s_re);
    const Eigen::MatrixXd g_im = mass_llt_.solve(s_im);
    generator_ = g_re.cast<std::complex<double>>() +
                 std::complex<double>(0.0, 1.0) *
                     g_im.cast<std::complex<double>>();
  }
}

const Eigen::VectorXd& DenseSemigroup::pencil_eigenvalues() const {
  if (!hermitian_) {
    fail(ErrorCode::MissingPrerequisite,
         "pencil eigenvalues available on the self-adjoint path only");
  }
  return lambda_;
}

Eigen::VectorXcd DenseSemigroup::apply(const Eigen::VectorXcd& u0,
                                       double t) const {
  if (u0.size() != dof_) {
    fail(ErrorCode::DimensionMismatch, "state length differs from dof count");
  }
  if (hermitian_) {
    Eigen::VectorXcd coeff = v_.adjoint() * (mass_ * u0);
    coeff.array() *= (-t * lambda_.array()).exp();
    return v_ * coeff;
  }
  return propagator_pade(t) * u0;
}

Eigen::MatrixXcd DenseSemigroup::propagator_pade(double t) const {
  if (hermitian_) {
    // Reconstruct M^-1 S from the factorization: S = M V diag(lambda) V^H M.
    Eigen::MatrixXcd g = v_ * lambda_.asDiagonal() * v_.adjoint() * mass_;
    return (-t * g).exp();
  }
  return (-t * generator_).exp();
}

Eigen::MatrixXcd DenseSemigroup::propagator(double t) const {
  if (hermitian_) {
    Eigen::VectorXd decay = (-t * lambda_.array()).exp();
    return v_ * decay.asDiagonal() * v_.adjoint() * mass_;
  }
  return propagator_pade(t);
}

Eigen::MatrixXcd DenseSemigroup::kernel(double t) const {
  if (hermitian_) {
    Eigen::VectorXd decay = (-t * lambda_.array()).exp();
    return v_ * decay.asDiagonal() * v_.adjoint();
  }
  return propagator_pade(t) * mass_inverse_;
}

Eigen::MatrixXcd DenseSemigroup::kernel_pade(double t) const {
  return propagator_pade(t) * mass_inverse_;
}

double DenseSemigroup::norm_2_to_inf(double t) const {
  if (hermitian_) {
    Eigen::VectorXd decay = (-2.0 * t * lambda_.array()).exp();
    return std::sqrt((v_abs2_ * decay).maxCoeff());
  }
  Eigen::MatrixXcd p = propagator_pade(t);
  const Eigen::MatrixXcd pa = p.adjoint();
  const Eigen::MatrixXd pa_re = pa.real();
  const Eigen::MatrixXd pa_im = pa.imag();
  const Eigen::MatrixXd x_re = mass_llt_.solve(pa_re);
  const Eigen::MatrixXd x_im = mass_llt_.solve(pa_im);
  const Eigen::MatrixXcd x =
      x_re.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * x_im.cast<std::complex<double>>();
  double best = 0.0;
  for (int i = 0; i < dof_; ++i) {
    best = std::max(best, (p.row(i) * x.col(i)).value().real());
  }
  return std::sqrt(best);
}

StateVector step_crank_nicolson(const DiscreteOperator& op,
                                const StateVector& u, double dt) {
  check_state(op, u.values);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "step size must be > 0");
  Eigen::SparseMatrix<std::complex<double>> mc =
      op.mass.cast<std::complex<double>>();
  Eigen::SparseMatrix<std::complex<double>> lhs = mc + (0.5 * dt) * op.stiffness;
  Eigen::SparseMatrix<std::complex<double>> rhs = mc - (0.5 * dt) * op.stiffness;
  Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu(lhs);
  if (lu.info() != Eigen::Success) {
    fail(ErrorCode::SingularSystem, "Crank-Nicolson system not factorizable");
  }
  StateVector next;
  next.values = lu.solve(rhs * u.values);
  next.time = u.time + dt;
  return next;
}

Trajectory evolve(const DiscreteOperator& op, const StateVector& u0,
                  double t_end, double dt) {
  check_state(op, u0.values);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "step size must be > 0");
  if (t_end < 0.0) fail(ErrorCode::InvalidArgument, "horizon must be >= 0");

  Eigen::SparseMatrix<std::complex<double>> mc =
      op.mass.cast<std::complex<double>>();
  Eigen::SparseMatrix<std::complex<double>> lhs = mc + (0.5 * dt) * op.stiffness;
  Eigen::SparseMatrix<std::complex<double>> rhs = mc - (0.5 * dt) * op.stiffness;
  Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu(lhs);
  if (lu.info() != Eigen::Success) {
    fail(ErrorCode::SingularSystem, "Crank-Nicolson system not factorizable");
  }

  Trajectory traj;
  auto record = [&](const StateVector& s) {
    traj.states.push_back(s);
    traj.norms.push_back(NormTriple{state_norm(op, s, PNorm::One),
                                    state_norm(op, s, PNorm::Two),
                                    state_norm(op, s, PNorm::Inf)});
  };
  StateVector current = u0;
  record(current);
  const long steps = std::llround(t_end / dt);
  for (long k = 0; k < steps; ++k) {
    StateVector next;
    next.values = lu.solve(rhs * current.values);
    next.time = u0.time + (k + 1) * dt;
    current = std::move(next);
    record(current);
  }
  return traj;
}

StateVector expm_apply(const DiscreteOperator& op, const StateVector& u0,
                       double t) {
  check_state(op, u0.values);
  DenseSemigroup sg(op);
  StateVector out;
  out.values = sg.apply(u0.values, t);
  out.time = u0.time + t;
  return out;
}

KernelMatrix heat_kernel(const DiscreteOperator& op, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "kernel time must be > 0");
  DenseSemigroup sg(op);
  KernelMatrix k;
  k.t = t;
  k.entries = sg.kernel(t);
  k.coordinates =
      Eigen::Map<const Eigen::VectorXd>(op.dofs.stretch.data(), op.dof());
  return k;
}

double element_abs_integral(std::complex<double> a, std::complex<double> b,
                            double h) {
  const std::complex<double> d = b - a;
  const double dn = std::abs(d);
  if (dn == 0.0) return h * std::abs(a);
  // Write a + d s = d ((s + p) + i q): the integrand is |d| sqrt((s+p)^2+q^2).
  const std::complex<double> ratio = a / d;
  const double p = ratio.real();
  const double q = ratio.imag();
  if (q == 0.0) {
    // Real-collinear case with a possible sign change at s = -p.
    double integral;
    if (p >= 0.0) {
      integral = 0.5 + p;
    } else if (p <= -1.0) {
      integral = -0.5 - p;
    } else {
      integral = 0.5 * (p * p + (1.0 + p) * (1.0 + p));
    }
    return h * dn * integral;
  }
  auto antiderivative = [q](double x) {
    return 0.5 * (x * std::sqrt(x * x + q * q) +
                  q * q * std::asinh(x / std::abs(q)));
  };
  return h * dn * (antiderivative(1.0 + p) - antiderivative(p));
}

double state_norm(const DiscreteOperator& op, const StateVector& u, PNorm p) {
  check_state(op, u.values);
  switch (p) {
    case PNorm::Two: {
      std::complex<double> q = u.values.dot(op.mass * u.values);
      return std::sqrt(std::max(0.0, q.real()));
    }
    case PNorm::Inf: {
      // The interpolant's modulus is maximal at a node; eliminated nodes
      // hold zero.
      return u.values.size() == 0 ? 0.0 : u.values.cwiseAbs().maxCoeff();
    }
    case PNorm::One: {
      double total = 0.0;
      for (int j = 0; j < op.net.edge_count(); ++j) {
        const int n = op.mesh.elements(j);
        const double h = op.mesh.h(j);
        for (int e = 0; e < n; ++e) {
          const int left = op.dofs.node(op.net, op.mesh, j, e);
          const int right = op.dofs.node(op.net, op.mesh, j, e + 1);
          const std::complex<double> a = left >= 0 ? u.values[left] : 0.0;
          const std::complex<double> b = right >= 0 ? u.values[right] : 0.0;
          total += element_abs_integral(a, b, h);
        }
      }
      return total;
    }
  }
  return 0.0;
}

double operator_norm_2_to_inf(const DiscreteOperator& op, double t) {
  DenseSemigroup sg(op);
  return sg.norm_2_to_inf(t);
}

}  // namespace netheat
