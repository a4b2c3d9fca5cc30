#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "netheat/evolution.hpp"

using namespace netheat;
using Cd = std::complex<double>;

namespace {

DiscreteOperator make_op(int elements, Cd b_value, bool dirichlet = true) {
  const Network net = build_network(2, {Edge{0, 1}}, 1);
  const int dim = dirichlet ? 1 : 2;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim, dim);
  b(0, 0) = b_value;
  return assemble(net, CoefficientProfile::constant(1, 1.0),
                  CouplingMatrix(b), Mesh::uniform(1, elements), dirichlet);
}

Eigen::VectorXcd seeded_real_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST_CASE("absolute integral of a linear element") {
  CHECK(element_abs_integral(1.0, 2.0, 0.5) == doctest::Approx(0.75));
  CHECK(element_abs_integral(-1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(element_abs_integral(0.0, 0.0, 2.0) == doctest::Approx(0.0));
  CHECK(element_abs_integral(Cd(0, 3), Cd(0, 4), 1.0) ==
        doctest::Approx(3.5));
}

TEST_CASE("state norms of nodal data") {
  const DiscreteOperator op = make_op(2, 0.0);
  StateVector hat;
  hat.values = Eigen::VectorXcd::Zero(2);
  hat.values(0) = 1.0;  // interior node at x = 1/2
  CHECK(state_norm(op, hat, PNorm::One) == doctest::Approx(0.5));
  CHECK(state_norm(op, hat, PNorm::Two) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(state_norm(op, hat, PNorm::Inf) == doctest::Approx(1.0));

  StateVector kink;
  kink.values = Eigen::VectorXcd::Zero(2);
  kink.values(0) = 1.0;
  kink.values(1) = -1.0;
  CHECK(state_norm(op, kink, PNorm::One) == doctest::Approx(0.5));
}

TEST_CASE("Crank-Nicolson guards") {
  const DiscreteOperator op = make_op(4, 0.0);
  StateVector u;
  u.values = Eigen::VectorXcd::Zero(op.dof());
  CHECK_FAILS(InvalidArgument, step_crank_nicolson(op, u, 0.0));
  CHECK_FAILS(InvalidArgument, evolve(op, u, -1.0, 0.1));
  StateVector wrong;
  wrong.values = Eigen::VectorXcd::Zero(op.dof() + 1);
  CHECK_FAILS(DimensionMismatch, step_crank_nicolson(op, wrong, 0.1));
}

TEST_CASE("evolution records every step") {
  const DiscreteOperator op = make_op(8, -1.0);
  StateVector u0;
  u0.values = seeded_real_vector(op.dof(), 5);
  const Trajectory traj = evolve(op, u0, 1.0, 0.1);
  REQUIRE(traj.states.size() == 11);
  REQUIRE(traj.norms.size() == 11);
  CHECK(traj.states.back().time == doctest::Approx(1.0));
  CHECK(traj.norms.back().l2 < traj.norms.front().l2);
}

TEST_CASE("Crank-Nicolson is second order against the exponential") {
  const DiscreteOperator op = make_op(12, -1.0);
  StateVector u0;
  u0.values = seeded_real_vector(op.dof(), 17);
  // Damp the stiff modes first; the step ratio only reaches the asymptotic
  // order once the solution is smooth on the step scale.
  u0 = expm_apply(op, u0, 0.25);
  const double t_end = 0.5;
  const StateVector ref = expm_apply(op, u0, t_end);

  const auto err = [&](double dt) {
    const Trajectory traj = evolve(op, u0, t_end, dt);
    StateVector diff;
    diff.values = traj.states.back().values - ref.values;
    return state_norm(op, diff, PNorm::Two);
  };
  const double order = std::log2(err(1.0 / 16) / err(1.0 / 32));
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("dense semigroup is a semigroup") {
  SUBCASE("self-adjoint path") {
    const DiscreteOperator op = make_op(10, -2.0);
    const DenseSemigroup sg(op);
    REQUIRE(sg.hermitian());
    const Eigen::MatrixXcd lhs = sg.propagator(0.5);
    const Eigen::MatrixXcd rhs = sg.propagator(0.3) * sg.propagator(0.2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sg.pencil_eigenvalues()(0) > 0.0);
  }
  SUBCASE("general path") {
    const DiscreteOperator op = make_op(10, Cd(-1.0, 0.7));
    const DenseSemigroup sg(op);
    REQUIRE_FALSE(sg.hermitian());
    const Eigen::MatrixXcd lhs = sg.propagator(0.5);
    const Eigen::MatrixXcd rhs = sg.propagator(0.3) * sg.propagator(0.2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_FAILS(MissingPrerequisite, sg.pencil_eigenvalues());
  }
}

TEST_CASE("kernel times mass reproduces the propagator") {
  for (const Cd b : {Cd(-1.0, 0.0), Cd(-1.0, 0.5)}) {
    const DiscreteOperator op = make_op(8, b);
    const DenseSemigroup sg(op);
    const Eigen::MatrixXd m = Eigen::MatrixXd(op.mass);
    const double t = 0.4;
    const Eigen::MatrixXcd viaKernel = sg.kernel(t) * m;
    CHECK((viaKernel - sg.propagator(t)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((sg.kernel_pade(t) - sg.kernel(t)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("self-adjoint kernels are Hermitian") {
  const DiscreteOperator op = make_op(8, -1.5);
  const DenseSemigroup sg(op);
  const Eigen::MatrixXcd k = sg.kernel(0.3);
  CHECK((k - k.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply matches the dense exponential") {
  const DiscreteOperator op = make_op(8, Cd(-1.0, 0.3));
  const DenseSemigroup sg(op);
  const Eigen::VectorXcd u0 = seeded_real_vector(op.dof(), 23);
  StateVector s0;
  s0.values = u0;
  const StateVector viaFree = expm_apply(op, s0, 0.7);
  CHECK((sg.apply(u0, 0.7) - viaFree.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("all-Kirchhoff evolution conserves total mass") {
  const Network net = build_network(3, {Edge{0, 1}, Edge{1, 2}}, 2);
  const DiscreteOperator op =
      assemble(net, CoefficientProfile::constant(2, 1.0),
               CouplingMatrix(Eigen::MatrixXcd::Zero(3, 3)),
               Mesh::uniform(2, 8), false);
  const Eigen::VectorXcd u0 = seeded_real_vector(op.dof(), 3);
  const Eigen::VectorXd w = Eigen::MatrixXd(op.mass).rowwise().sum();
  const Cd before = w.cast<Cd>().dot(u0);

  const DenseSemigroup sg(op);
  const Cd after_exp = w.cast<Cd>().dot(sg.apply(u0, 1.3));
  CHECK(std::abs(after_exp - before) < 1e-11);

  StateVector s0;
  s0.values = u0;
  const Trajectory traj = evolve(op, s0, 1.0, 0.25);
  const Cd after_cn = w.cast<Cd>().dot(traj.states.back().values);
  CHECK(std::abs(after_cn - before) < 1e-11);
}

TEST_CASE("2->inf norm agrees across routes and bounds samples") {
  for (const Cd b : {Cd(-1.0, 0.0), Cd(-0.5, 0.4)}) {
    const DiscreteOperator op = make_op(16, b);
    const DenseSemigroup sg(op);
    const double t = 0.05;
    const double norm = sg.norm_2_to_inf(t);
    CHECK(operator_norm_2_to_inf(op, t) == doctest::Approx(norm));
    for (unsigned seed = 0; seed < 5; ++seed) {
      StateVector f;
      f.values = seeded_real_vector(op.dof(), 100 + seed);
      StateVector tf;
      tf.values = sg.apply(f.values, t);
      const double gain = state_norm(op, tf, PNorm::Inf) /
                          state_norm(op, f, PNorm::Two);
      CHECK(gain <= norm * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("nodal heat kernel carries stretched coordinates") {
  const DiscreteOperator op = make_op(4, -1.0);
  const KernelMatrix k = heat_kernel(op, 0.2);
  CHECK(k.t == doctest::Approx(0.2));
  REQUIRE(k.coordinates.size() == op.dof());
  for (int i = 0; i < op.dof(); ++i) {
    CHECK(k.coordinates(i) == doctest::Approx(op.dofs.stretch[i]));
  }
  const DenseSemigroup sg(op);
  CHECK((k.entries - sg.kernel(0.2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("dense path refuses oversized problems") {
  const DiscreteOperator op = make_op(2100, 0.0);
  CHECK(op.dof() == 2100);
  CHECK_FAILS(DimensionTooLarge, DenseSemigroup(op));
}
