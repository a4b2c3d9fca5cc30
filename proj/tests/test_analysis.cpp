#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "netheat/analysis.hpp"

using namespace netheat;
using Cd = std::complex<double>;

namespace {

const double kPi = std::acos(-1.0);

DiscreteOperator edge_op(int elements, Cd b_value) {
  const Network net = build_network(2, {Edge{0, 1}}, 1);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Constant(1, 1, b_value);
  return assemble(net, CoefficientProfile::constant(1, 1.0),
                  CouplingMatrix(b), Mesh::uniform(1, elements), true);
}

DiscreteOperator path_op(int elements, const Eigen::MatrixXcd& b,
                         bool dirichlet = true) {
  const Network net = build_network(3, {Edge{0, 1}, Edge{1, 2}}, 2);
  return assemble(net, CoefficientProfile::constant(2, 1.0),
                  CouplingMatrix(b), Mesh::uniform(2, elements), dirichlet);
}

DiscreteOperator lobes_op(int elements, const Eigen::MatrixXcd& b) {
  const Network net = build_network(3, {Edge{0, 2}, Edge{1, 2}}, 2);
  return assemble(net, CoefficientProfile::constant(2, 1.0),
                  CouplingMatrix(b), Mesh::uniform(2, elements), true);
}

}  // namespace

TEST_CASE("interval spectrum with one absorbing end") {
  const DiscreteOperator op = edge_op(200, 0.0);
  const SpectralReport rep = spectrum(op, 3);
  REQUIRE(rep.eigenvalues.size() == 3);
  for (int k = 0; k < 3; ++k) {
    const double exact = std::pow((k + 0.5) * kPi, 2);
    CHECK(rep.eigenvalues[k].real() ==
          doctest::Approx(exact).epsilon(1e-3));
    CHECK(rep.eigenvalues[k].imag() == 0.0);
    // Conforming approximation: eigenvalues converge from above.
    CHECK(rep.eigenvalues[k].real() >= exact);
  }
  CHECK(rep.spectral_bound ==
        doctest::Approx(-rep.eigenvalues[0].real()));
  REQUIRE(rep.growth_bound_fit.has_value());
  CHECK(*rep.growth_bound_fit ==
        doctest::Approx(rep.spectral_bound).epsilon(1e-3));

  CHECK_FAILS(InvalidArgument, spectrum(op, 0));
  CHECK_FAILS(InvalidArgument, spectrum(op, op.dof() + 1));
}

TEST_CASE("spectrum of non-self-adjoint couplings sorts by real part") {
  const DiscreteOperator op = edge_op(24, Cd(0.0, 1.0));
  const SpectralReport rep = spectrum(op, op.dof());
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i) {
    CHECK(rep.eigenvalues[i].real() >= rep.eigenvalues[i - 1].real());
  }
  CHECK(rep.spectral_bound ==
        doctest::Approx(-rep.eigenvalues[0].real()));
}

TEST_CASE("complex Hermitian couplings keep a real spectrum") {
  Eigen::MatrixXcd b(2, 2);
  b << Cd(-1, 0), Cd(0, 0.5), Cd(0, -0.5), Cd(-1, 0);
  const DiscreteOperator op = path_op(16, b);
  CHECK(op.stiffness_hermitian);
  const SpectralReport rep = spectrum(op, 4);
  for (const Cd& ev : rep.eigenvalues) {
    CHECK(std::abs(ev.imag()) < 1e-10);
  }
}

TEST_CASE("growth fit is absent without strict decay") {
  const Network net = build_network(2, {Edge{0, 1}}, 1);
  const DiscreteOperator op =
      assemble(net, CoefficientProfile::constant(1, 1.0),
               CouplingMatrix(Eigen::MatrixXcd::Zero(2, 2)),
               Mesh::uniform(1, 16), false);
  const SpectralReport rep = spectrum(op, 2);
  CHECK(rep.spectral_bound == doctest::Approx(0.0));
  CHECK_FALSE(rep.growth_bound_fit.has_value());
}

TEST_CASE("spectral bound bracket for edge bundles") {
  for (int m : {1, 2, 3}) {
    const PropertyVerdict v = check_spectral_bound_bracket(m, 40);
    CHECK(v.holds);
    const double upper = -std::pow(kPi / (2.0 * m), 2);
    CHECK(v.params.at("upper_bound").get<double>() ==
          doctest::Approx(upper));
    // Every bundle dissipates at the single-interval rate.
    CHECK(v.params.at("spectral_bound").get<double>() ==
          doctest::Approx(-std::pow(kPi / 2.0, 2)).epsilon(1e-3));
  }
  CHECK_FAILS(InvalidArgument, check_spectral_bound_bracket(0, 40));
  CHECK_FAILS(InvalidArgument, check_spectral_bound_bracket(1, 0));
}

TEST_CASE("verdicts track the coupling structure") {
  const std::vector<double> grid{0.15, 0.5};
  const double tol = 1e-8;
  const auto family = coupling_family(2, 12, 77, 0.05);
  REQUIRE(family.size() == 12);
  for (const Eigen::MatrixXcd& m : family) {
    const CouplingMatrix b(m);
    const CouplingReport rep = classify_coupling(b, 1e-12);
    const DiscreteOperator op = path_op(12, m);
    CAPTURE(m(0, 0).real());

    CHECK(verify_realness(op, grid, 4, 9, tol).holds == rep.is_real);
    CHECK(verify_positivity(op, grid, tol).holds ==
          (rep.is_real && rep.positive_offdiagonal));
    CHECK(verify_linf_contractivity(op, grid, 4, 9, tol).holds ==
          rep.row_criterion);
    // Small column violations only show in a thin initial layer: the cross
    // entries pump mass toward columns that drain it again. Assert the
    // equivalence with a margin floor; the persistent case is below.
    const PropertyVerdict l1 = verify_l1_contractivity(op, grid, 4, 9, tol);
    if (rep.column_criterion)
      CHECK(l1.holds);
    else if (column_criterion_margin(m) > 0.3)
      CHECK_FALSE(l1.holds);
    CHECK(verify_self_adjointness(op, grid, tol).holds ==
          rep.is_self_adjoint);
  }
}

TEST_CASE("a positive column sum with no cross terms pumps mass in") {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2, 2);
  b(0, 0) = 0.3;  // gain at the far vertex; nothing couples it away
  b(1, 1) = -1.0;
  const DiscreteOperator op = path_op(24, b);
  const PropertyVerdict v = verify_l1_contractivity(op, {0.1}, 4, 9, 1e-8);
  CHECK_FALSE(v.holds);
  CHECK(v.params.at("max_l1_ratio").get<double>() > 1.01);
}

TEST_CASE("failing verdicts carry a witness") {
  const DiscreteOperator op = edge_op(12, Cd(0.0, 1.0));
  const PropertyVerdict v = verify_realness(op, {0.2}, 3, 1, 1e-8);
  CHECK_FALSE(v.holds);
  CHECK_FALSE(v.witness.empty());
  const Json j = v.to_json();
  CHECK(j.contains("witness"));
  CHECK(j.at("property") == "realness");

  const PropertyVerdict ok = verify_realness(edge_op(12, -1.0), {0.2}, 3, 1, 1e-8);
  CHECK(ok.holds);
  CHECK_FALSE(ok.to_json().contains("witness"));
}

TEST_CASE("contractivity verdict flags a violated hypothesis") {
  Eigen::MatrixXcd b(2, 2);
  b << -2.0, 1.0, 0.0, -0.1;  // sup-norm criterion without dissipativity
  const DiscreteOperator op = path_op(12, b);
  const PropertyVerdict v =
      verify_linf_contractivity(op, {0.15, 0.5}, 4, 9, 1e-8);
  CHECK(v.holds);
  CHECK(v.params.at("hypothesis_violated").get<bool>());
  CHECK_FALSE(v.params.at("coupling_dissipative").get<bool>());
}

TEST_CASE("smoothing fit window guards") {
  CHECK_FAILS(WindowTooNarrow,
              fit_ultracontractivity(edge_op(8, 0.0), 1e-4, 1e-2, 6));
  const DiscreteOperator op = edge_op(64, 0.0);
  CHECK_FAILS(WindowTooNarrow, fit_ultracontractivity(op, 0.01, 1.0, 5));
  CHECK_FAILS(InvalidArgument, fit_ultracontractivity(op, 0.01, 0.05, 1));
  CHECK_FAILS(InvalidArgument, fit_ultracontractivity(op, 0.05, 0.01, 5));

  const UltracontractivityFit fit =
      fit_ultracontractivity(op, 2e-3, 0.05, 8);
  CHECK(fit.points == 8);
  CHECK(fit.m_fit > 0.0);
  CHECK(fit.slope > -0.30);
  CHECK(fit.slope < -0.20);
}

TEST_CASE("stability envelope dominates the measured norm") {
  const DiscreteOperator op = edge_op(100, 0.0);
  // The factorization time s = t/(1 - t w) sits below t when w < 0, so the
  // fit window has to start under the smallest grid time.
  const UltracontractivityFit fit =
      fit_ultracontractivity(op, 8e-4, 0.05, 8);
  const std::vector<double> grid{1e-3, 0.1, 1.0, 5.0};
  const PropertyVerdict v = check_stability_envelope(op, grid, fit, 1e-6);
  CHECK(v.holds);
  CHECK(v.params.at("omega").get<double>() < 0.0);
  CHECK(v.params.at("min_relative_margin").get<double>() >= -1e-6);
  CHECK(v.params.at("grid").size() == grid.size());

  UltracontractivityFit broken = fit;
  broken.m_fit = 0.0;
  CHECK_FAILS(MissingPrerequisite,
              check_stability_envelope(op, grid, broken, 1e-6));

  // Coarse mesh: the factorization time s = t/(1 - t w) falls below the
  // resolvable scale.
  const DiscreteOperator coarse = edge_op(8, 0.0);
  UltracontractivityFit fake;
  fake.m_fit = 1.0;
  fake.slope = -0.25;
  fake.t_min = 0.1;
  fake.t_max = 0.2;
  fake.points = 2;
  CHECK_FAILS(WindowTooNarrow,
              check_stability_envelope(coarse, {1e-3}, fake, 1e-6));
}

TEST_CASE("gaussian envelope fit") {
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(2, 2);
  diag(0, 0) = -1.0;
  diag(1, 1) = -1.0;
  const DiscreteOperator op = path_op(64, diag);
  std::vector<double> t_list;
  for (int i = 0; i < 6; ++i)
    t_list.push_back(5e-3 * std::pow(20.0, i / 5.0));
  const GaussianFit fit = fit_gaussian_envelope(op, t_list, 1.0);
  CHECK(fit.b > 0.0);
  CHECK(fit.b < 0.30);
  CHECK(fit.c > 0.0);
  CHECK(fit.coverage >= 0.99);
  CHECK(fit.params.at("fit_samples").get<int>() > 100);

  const GaussianFit median = fit_gaussian_envelope(op, t_list, 0.5);
  CHECK(median.c < fit.c);
}

TEST_CASE("gaussian fit guards") {
  Eigen::MatrixXcd coupled(2, 2);
  coupled << -1.0, 0.5, 0.5, -1.0;
  std::vector<double> t_list{0.01, 0.03, 0.1};
  CHECK_FAILS(HypothesisViolated,
              fit_gaussian_envelope(path_op(32, coupled), t_list, 1.0));
  CHECK_FAILS(HypothesisViolated,
              fit_gaussian_envelope(edge_op(32, 0.5), t_list, 1.0));
  CHECK_FAILS(HypothesisViolated,
              fit_gaussian_envelope(edge_op(32, Cd(0, -1)), t_list, 1.0));
  CHECK_FAILS(InvalidArgument,
              fit_gaussian_envelope(edge_op(32, -1.0), t_list, 1.5));
  // Late times on a two-unknown mesh: positive rank-one kernels, but far
  // too few samples for a split fit.
  CHECK_FAILS(DegenerateFit,
              fit_gaussian_envelope(
                  path_op(1, Eigen::MatrixXcd::Zero(2, 2) -
                                 Eigen::MatrixXcd::Identity(2, 2)),
                  {5.0, 8.0}, 1.0));
}

TEST_CASE("absorbing system is dominated by its relaxation") {
  const Eigen::MatrixXcd z2 = Eigen::MatrixXcd::Zero(2, 2);
  const Eigen::MatrixXcd z3 = Eigen::MatrixXcd::Zero(3, 3);
  // Kernel comparisons need t >= 20 h^2 or the nodal transient of the
  // piecewise-linear kernels swamps the slack; 48 elements covers t = 0.01.
  const DiscreteOperator op_d = path_op(48, z2, true);
  const DiscreteOperator op_k = path_op(48, z3, false);
  const std::vector<double> grid{0.01, 0.1, 1.0};
  const PropertyVerdict v = verify_domination(op_d, op_k, grid, 1e-10);
  CHECK(v.holds);
  CHECK(v.params.at("min_kernel_slack").get<double>() >= -1e-10);

  CHECK_FAILS(InvalidArgument, verify_domination(op_k, op_d, grid, 1e-10));
  CHECK_FAILS(InvalidArgument, verify_domination(op_d, op_d, grid, 1e-10));
  const DiscreteOperator other = path_op(20, z3, false);
  CHECK_FAILS(MeshMismatch, verify_domination(op_d, other, grid, 1e-10));
}

TEST_CASE("coupling domination against the modulus system") {
  Eigen::MatrixXcd tilde(2, 2);
  tilde << -1.0, Cd(0.0, 0.3), -0.3, -1.0;
  Eigen::MatrixXcd mod(2, 2);
  mod << -1.0, 0.3, 0.3, -1.0;
  const std::vector<double> grid{0.05, 0.5};
  const PropertyVerdict v = verify_coupling_domination(
      path_op(16, mod), path_op(16, tilde), grid, 1e-10);
  CHECK(v.holds);
  CHECK(v.params.at("matrix_level").get<bool>());
  CHECK(v.params.at("levels_agree").get<bool>());

  // A thinner coupling does not dominate.
  Eigen::MatrixXcd thin = Eigen::MatrixXcd::Zero(2, 2);
  thin(0, 0) = -1.0;
  thin(1, 1) = -1.0;
  const PropertyVerdict no = verify_coupling_domination(
      path_op(12, thin), path_op(12, mod), grid, 1e-10);
  CHECK_FALSE(no.holds);
  CHECK(no.params.at("levels_agree").get<bool>());

  CHECK_FAILS(NotPositiveGenerator,
              verify_coupling_domination(path_op(12, tilde),
                                         path_op(12, tilde), grid, 1e-10));
}

TEST_CASE("irreducibility probe on a separable graph") {
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(2, 2);
  diag(0, 0) = -1.0;
  diag(1, 1) = -0.5;
  const PropertyVerdict split =
      irreducibility_probe(lobes_op(16, diag), 0.5, 1e-12);
  CHECK_FALSE(split.holds);
  CHECK(split.params.at("separable").get<bool>());
  CHECK(split.params.at("coupling_block_compatible").get<bool>());
  CHECK(split.params.at("cross_block_max").get<double>() <= 1e-12);

  Eigen::MatrixXcd mixing(2, 2);
  mixing << -1.0, 0.3, 0.3, -1.0;
  const PropertyVerdict joined =
      irreducibility_probe(lobes_op(16, mixing), 0.5, 1e-8);
  CHECK(joined.holds);
  CHECK(joined.params.at("min_entry").get<double>() > 1e-8);

  Eigen::MatrixXcd negative(2, 2);
  negative << -1.0, -2.0, -2.0, -1.0;
  CHECK_FAILS(NotPositive,
              irreducibility_probe(lobes_op(16, negative), 0.5, 1e-12));
}

TEST_CASE("coupling family cycles through structural classes") {
  const auto fam = coupling_family(3, 12, 5, 0.05);
  REQUIRE(fam.size() == 12);
  const auto again = coupling_family(3, 12, 5, 0.05);
  for (int i = 0; i < 12; ++i) {
    CHECK((fam[i] - again[i]).norm() == 0.0);
    const CouplingReport rep =
        classify_coupling(CouplingMatrix(fam[i]), 1e-12);
    const double margin = row_criterion_margin(fam[i]);
    CHECK(std::abs(margin) >= 0.05);
    const int cls = i % 6;
    CHECK(rep.row_criterion == (cls != 3 && cls != 5));
    CHECK(rep.is_real == (cls != 2 && cls != 3));
    if (cls == 0) CHECK(rep.positive_offdiagonal);
    if (cls == 1) CHECK_FALSE(rep.positive_offdiagonal);
    if (cls == 4) {
      CHECK(rep.is_self_adjoint);
      REQUIRE(rep.block_partition.has_value());
    }
    if (cls == 5) CHECK(rep.positive_offdiagonal);
  }
}
