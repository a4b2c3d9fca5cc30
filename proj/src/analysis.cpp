#include "netheat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "netheat/coupling.hpp"
#include "netheat/discretization.hpp"
#include "netheat/errors.hpp"
#include "netheat/graph.hpp"

namespace netheat {

namespace {

constexpr double kClassifyTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

Json complex_to_json(std::complex<double> z) {
  return Json::array({z.real(), z.imag()});
}

// Least-squares line through (x_i, y_i); returns {slope, intercept}.
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) fail(ErrorCode::DegenerateFit, "regression needs two points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    fail(ErrorCode::DegenerateFit, "regression abscissae are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

Eigen::VectorXcd random_complex_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = std::complex<double>(u(rng), u(rng));
  return v;
}

Eigen::VectorXcd random_real_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Both operators must live on the same nodal lattice.
void require_same_lattice(const DiscreteOperator& a,
                          const DiscreteOperator& b) {
  bool ok = a.net.vertex_count == b.net.vertex_count &&
            a.net.edges.size() == b.net.edges.size() &&
            a.net.dirichlet_vertex == b.net.dirichlet_vertex;
  if (ok) {
    for (std::size_t j = 0; j < a.net.edges.size(); ++j) {
      ok = ok && a.net.edges[j].tail == b.net.edges[j].tail &&
           a.net.edges[j].head == b.net.edges[j].head &&
           a.mesh.elements_per_edge[j] == b.mesh.elements_per_edge[j];
    }
  }
  if (!ok)
    fail(ErrorCode::MeshMismatch,
         "operators are not discretized on the same network mesh");
}

bool coupling_is_zero(const CouplingMatrix& b) {
  return b.entries.size() == 0 || b.entries.cwiseAbs().maxCoeff() <= 1e-14;
}

}  // namespace

Json PropertyVerdict::to_json() const {
  Json j;
  j["property"] = property;
  j["holds"] = holds;
  j["tolerance"] = tolerance;
  if (!witness.empty()) j["witness"] = witness;
  j["params"] = params;
  return j;
}

Json SpectralReport::to_json() const {
  Json j;
  Json evs = Json::array();
  for (const auto& z : eigenvalues) evs.push_back(complex_to_json(z));
  j["eigenvalues"] = evs;
  j["spectral_bound"] = spectral_bound;
  if (growth_bound_fit) j["growth_bound_fit"] = *growth_bound_fit;
  return j;
}

Json GaussianFit::to_json() const {
  Json j;
  j["c"] = c;
  j["b"] = b;
  j["coverage"] = coverage;
  j["params"] = params;
  return j;
}

SpectralReport spectrum(const DiscreteOperator& op, int k) {
  const int dof = op.dof();
  if (k < 1 || k > dof)
    fail(ErrorCode::InvalidArgument,
         "spectrum: eigenvalue count must lie in [1, dof]");

  const Eigen::MatrixXd m = Eigen::MatrixXd(op.mass);
  const Eigen::MatrixXcd s = Eigen::MatrixXcd(op.stiffness);

  std::vector<std::complex<double>> eigs(dof);
  if (op.stiffness_hermitian) {
    if (op.stiffness_real) {
      const Eigen::MatrixXd sr = s.real();
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
          sr, m, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
      if (es.info() != Eigen::Success)
        fail(ErrorCode::EigensolverFailure,
             "generalized eigensolver did not converge");
      for (int i = 0; i < dof; ++i) eigs[i] = es.eigenvalues()(i);
    } else {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          s, m.cast<std::complex<double>>(),
          Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
      if (es.info() != Eigen::Success)
        fail(ErrorCode::EigensolverFailure,
             "generalized eigensolver did not converge");
      for (int i = 0; i < dof; ++i) eigs[i] = es.eigenvalues()(i);
    }
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::SingularSystem, "mass matrix is not positive definite");
    const Eigen::MatrixXd sr = s.real();
    const Eigen::MatrixXd si = s.imag();
    const Eigen::MatrixXd gr = llt.solve(sr);
    const Eigen::MatrixXd gi = llt.solve(si);
    const Eigen::MatrixXcd g =
        gr.cast<std::complex<double>>() +
        std::complex<double>(0.0, 1.0) * gi.cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, false);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::EigensolverFailure, "eigensolver did not converge");
    for (int i = 0; i < dof; ++i) eigs[i] = es.eigenvalues()(i);
  }
  std::sort(eigs.begin(), eigs.end(),
            [](std::complex<double> a, std::complex<double> b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });

  SpectralReport rep;
  rep.eigenvalues.assign(eigs.begin(), eigs.begin() + k);
  rep.spectral_bound = -eigs.front().real();

  // Decay-rate cross check: slope of log ||T(t) u0||_2 over the late window
  // [2, 5] / |s_h|, where the leading mode dominates.
  if (rep.spectral_bound < -1e-12 && dof <= 800) {
    DenseSemigroup sg(op);
    const double unit = 1.0 / (-rep.spectral_bound);
    const int pts = 6;
    const Eigen::VectorXcd u0 = Eigen::VectorXcd::Ones(dof);
    std::vector<double> lx, ly;
    for (int i = 0; i < pts; ++i) {
      const double t = (2.0 + 3.0 * i / (pts - 1.0)) * unit;
      StateVector st{sg.apply(u0, t), t};
      const double nrm = state_norm(op, st, PNorm::Two);
      if (nrm > 1e-250) {
        lx.push_back(t);
        ly.push_back(std::log(nrm));
      }
    }
    if (lx.size() >= 3) rep.growth_bound_fit = linear_fit(lx, ly).first;
  }
  return rep;
}

PropertyVerdict check_spectral_bound_bracket(int m_edges, int resolution) {
  if (m_edges < 1)
    fail(ErrorCode::InvalidArgument, "need at least one edge");
  if (resolution < 1)
    fail(ErrorCode::InvalidArgument, "need at least one element per edge");

  // m unit edges, each running from its own free vertex into the common
  // absorbing vertex.
  std::vector<Edge> edges;
  edges.reserve(m_edges);
  for (int j = 0; j < m_edges; ++j) edges.push_back(Edge{j, m_edges});
  const Network net = build_network(m_edges + 1, edges, m_edges);
  const CouplingMatrix b(Eigen::MatrixXcd::Zero(m_edges, m_edges));
  const DiscreteOperator op =
      assemble(net, CoefficientProfile::constant(m_edges, 1.0), b,
               Mesh::uniform(m_edges, resolution), true);
  const SpectralReport rep = spectrum(op, 1);

  const double upper = -std::pow(kPi / (2.0 * m_edges), 2);
  const double eps = 0.01 * std::abs(upper);
  const double lower_first = -(kPi / (m_edges + 1.0));
  const double lower_squared = -std::pow(kPi / (m_edges + 1.0), 2);

  PropertyVerdict v;
  v.property = "spectral_bound_bracket";
  v.tolerance = eps;
  v.holds = rep.spectral_bound <= upper + eps;
  v.params["m_edges"] = m_edges;
  v.params["resolution"] = resolution;
  v.params["spectral_bound"] = rep.spectral_bound;
  v.params["upper_bound"] = upper;
  v.params["upper_margin"] = upper + eps - rep.spectral_bound;
  // Companion lower bound under both exponent readings; reported, never
  // asserted (the first-power form fails already for one edge).
  v.params["lower_margin_first_power"] = rep.spectral_bound - lower_first;
  v.params["lower_margin_squared"] = rep.spectral_bound - lower_squared;
  if (rep.growth_bound_fit)
    v.params["growth_bound_fit"] = *rep.growth_bound_fit;
  if (!v.holds)
    v.witness = Json{{"spectral_bound", rep.spectral_bound},
                     {"allowed", upper + eps}};
  return v;
}

PropertyVerdict verify_realness(const DiscreteOperator& op,
                                const std::vector<double>& t_grid, int samples,
                                std::uint64_t seed, double tol) {
  DenseSemigroup sg(op);
  PropertyVerdict v;
  v.property = "realness";
  v.tolerance = tol;

  double worst = 0.0;
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd p = sg.propagator(t);
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    Eigen::Index r = 0, c = 0;
    const Eigen::MatrixXd im = p.imag().cwiseAbs();
    const double mx = im.maxCoeff(&r, &c);
    if (mx / scale > worst) {
      worst = mx / scale;
      worst_at = Json{{"t", t},
                      {"row", static_cast<int>(r)},
                      {"col", static_cast<int>(c)},
                      {"imag", p(r, c).imag()}};
    }
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXcd u0 = random_real_vector(op.dof(), rng);
    for (double t : t_grid) {
      const Eigen::VectorXcd ut = sg.apply(u0, t);
      const double scale = std::max(1.0, ut.cwiseAbs().maxCoeff());
      Eigen::Index r = 0;
      const Eigen::VectorXd im = ut.imag().cwiseAbs();
      const double mx = im.maxCoeff(&r);
      if (mx / scale > worst) {
        worst = mx / scale;
        worst_at = Json{{"t", t}, {"sample", k}, {"index", static_cast<int>(r)}};
      }
    }
  }
  v.holds = worst <= tol;
  v.params["worst_imag_ratio"] = worst;
  v.params["t_grid"] = t_grid;
  v.params["samples"] = samples;
  v.params["seed"] = seed;
  v.params["coupling_real"] =
      classify_coupling(op.coupling, kClassifyTol).is_real;
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict verify_positivity(const DiscreteOperator& op,
                                  const std::vector<double>& t_grid,
                                  double tol) {
  DenseSemigroup sg(op);
  PropertyVerdict v;
  v.property = "positivity";
  v.tolerance = tol;

  double worst_neg = 0.0, worst_imag = 0.0;
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd kmat = sg.kernel(t);
    const double scale = std::max(kmat.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::Index r = 0, c = 0;
    const double neg = -kmat.real().minCoeff(&r, &c);
    if (neg / scale > worst_neg) {
      worst_neg = neg / scale;
      worst_at = Json{{"t", t},
                      {"row", static_cast<int>(r)},
                      {"col", static_cast<int>(c)},
                      {"entry", kmat(r, c).real()}};
    }
    worst_imag =
        std::max(worst_imag, kmat.imag().cwiseAbs().maxCoeff() / scale);
  }
  v.holds = worst_neg <= tol && worst_imag <= tol;
  const CouplingReport rep = classify_coupling(op.coupling, kClassifyTol);
  v.params["worst_negative_ratio"] = worst_neg;
  v.params["worst_imag_ratio"] = worst_imag;
  v.params["t_grid"] = t_grid;
  v.params["coupling_positive_offdiagonal"] =
      rep.is_real && rep.positive_offdiagonal;
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict verify_linf_contractivity(const DiscreteOperator& op,
                                          const std::vector<double>& t_grid,
                                          int samples, std::uint64_t seed,
                                          double tol) {
  DenseSemigroup sg(op);
  PropertyVerdict v;
  v.property = "linf_contractivity";
  v.tolerance = tol;

  // Max abs row sum of the propagator is the exact nodal sup-norm gain.
  double worst = 0.0;
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd p = sg.propagator(t);
    Eigen::Index r = 0;
    const Eigen::VectorXd sums = p.cwiseAbs().rowwise().sum();
    const double mx = sums.maxCoeff(&r);
    if (mx > worst) {
      worst = mx;
      worst_at = Json{{"t", t}, {"row", static_cast<int>(r)}, {"gain", mx}};
    }
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXcd u0 = random_complex_vector(op.dof(), rng);
    u0 /= u0.cwiseAbs().maxCoeff();
    for (double t : t_grid) {
      const double gain = sg.apply(u0, t).cwiseAbs().maxCoeff();
      if (gain > worst) {
        worst = gain;
        worst_at = Json{{"t", t}, {"sample", k}, {"gain", gain}};
      }
    }
  }
  v.holds = worst <= 1.0 + tol;
  const CouplingReport rep = classify_coupling(op.coupling, kClassifyTol);
  v.params["max_gain"] = worst;
  v.params["t_grid"] = t_grid;
  v.params["samples"] = samples;
  v.params["seed"] = seed;
  v.params["row_criterion_margin"] =
      op.coupling.dim() > 0 ? row_criterion_margin(op.coupling.entries) : 0.0;
  v.params["coupling_row_criterion"] = rep.row_criterion;
  v.params["coupling_dissipative"] = rep.is_dissipative;
  v.params["hypothesis_violated"] = !rep.is_dissipative;
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict verify_l1_contractivity(const DiscreteOperator& op,
                                        const std::vector<double>& t_grid,
                                        int samples, std::uint64_t seed,
                                        double tol) {
  if (op.dof() > 2000)
    fail(ErrorCode::DimensionTooLarge,
         "dense duality check limited to 2000 unknowns");
  PropertyVerdict v;
  v.property = "l1_contractivity";
  v.tolerance = tol;

  // Dual route: the adjoint propagator exp(-t M^-1 S^H) must be a nodal
  // sup-norm contraction.
  const Eigen::MatrixXd m = Eigen::MatrixXd(op.mass);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::SingularSystem, "mass matrix is not positive definite");
  const Eigen::MatrixXcd sh = Eigen::MatrixXcd(op.stiffness).adjoint();
  const Eigen::MatrixXd shr = sh.real();
  const Eigen::MatrixXd shi = sh.imag();
  const Eigen::MatrixXd ghr = llt.solve(shr);
  const Eigen::MatrixXd ghi = llt.solve(shi);
  const Eigen::MatrixXcd g =
      ghr.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * ghi.cast<std::complex<double>>();

  double worst_dual = 0.0;
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd q = ((-t) * g).exp();
    Eigen::Index r = 0;
    const Eigen::VectorXd sums = q.cwiseAbs().rowwise().sum();
    const double mx = sums.maxCoeff(&r);
    if (mx > worst_dual) {
      worst_dual = mx;
      worst_at =
          Json{{"t", t}, {"adjoint_row", static_cast<int>(r)}, {"gain", mx}};
    }
  }

  // Direct route: exact piecewise-linear L1 ratios on vertex hats and
  // random data.
  DenseSemigroup sg(op);
  std::vector<Eigen::VectorXcd> probes;
  for (int vtx : op.coupled_vertices()) {
    const int d = op.dofs.vertex[vtx];
    if (d < 0) continue;
    Eigen::VectorXcd hat = Eigen::VectorXcd::Zero(op.dof());
    hat(d) = 1.0;
    probes.push_back(hat);
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k)
    probes.push_back(random_complex_vector(op.dof(), rng));

  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double n0 = state_norm(op, StateVector{probes[k], 0.0}, PNorm::One);
    if (!(n0 > 0.0)) continue;
    for (double t : t_grid) {
      const StateVector ut{sg.apply(probes[k], t), t};
      const double ratio = state_norm(op, ut, PNorm::One) / n0;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        if (ratio > 1.0 + tol)
          worst_at = Json{{"t", t},
                          {"probe", static_cast<int>(k)},
                          {"l1_ratio", ratio}};
      }
    }
  }

  v.holds = worst_dual <= 1.0 + tol && worst_ratio <= 1.0 + tol;
  const CouplingReport rep = classify_coupling(op.coupling, kClassifyTol);
  v.params["max_adjoint_gain"] = worst_dual;
  v.params["max_l1_ratio"] = worst_ratio;
  v.params["t_grid"] = t_grid;
  v.params["samples"] = samples;
  v.params["seed"] = seed;
  v.params["column_criterion_margin"] =
      op.coupling.dim() > 0 ? column_criterion_margin(op.coupling.entries)
                            : 0.0;
  v.params["coupling_column_criterion"] = rep.column_criterion;
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict verify_self_adjointness(const DiscreteOperator& op,
                                        const std::vector<double>& t_grid,
                                        double tol) {
  DenseSemigroup sg(op);
  PropertyVerdict v;
  v.property = "self_adjointness";
  v.tolerance = tol;

  double worst = 0.0;
  Json worst_at = Json::object();
  for (double t : t_grid) {
    // The non-spectral exponential route, so symmetry is measured rather
    // than rebuilt from a symmetric factorization.
    const Eigen::MatrixXcd k = sg.kernel_pade(t);
    const double scale = std::max(k.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::Index r = 0, c = 0;
    const Eigen::MatrixXd asym = (k - k.adjoint()).cwiseAbs();
    const double mx = asym.maxCoeff(&r, &c) / scale;
    if (mx > worst) {
      worst = mx;
      worst_at = Json{{"t", t},
                      {"row", static_cast<int>(r)},
                      {"col", static_cast<int>(c)}};
    }
  }
  v.holds = worst <= tol;
  v.params["worst_asymmetry_ratio"] = worst;
  v.params["t_grid"] = t_grid;
  v.params["coupling_self_adjoint"] =
      classify_coupling(op.coupling, kClassifyTol).is_self_adjoint;
  if (!v.holds) v.witness = worst_at;
  return v;
}

UltracontractivityFit fit_ultracontractivity(const DiscreteOperator& op,
                                             double t_min, double t_max,
                                             int points) {
  if (points < 2)
    fail(ErrorCode::InvalidArgument, "at least two fit points required");
  if (!(t_min > 0.0) || !(t_max > t_min))
    fail(ErrorCode::InvalidArgument, "need 0 < t_min < t_max");
  const double h2 = op.mesh.h_max() * op.mesh.h_max();
  if (t_min < 5.0 * h2)
    fail(ErrorCode::WindowTooNarrow,
         "t_min sits below the mesh diffusion scale 5 h^2; refine the mesh "
         "or raise t_min");
  const double s_h = spectrum(op, 1).spectral_bound;
  if (s_h < 0.0 && t_max > 0.2 / (-s_h))
    fail(ErrorCode::WindowTooNarrow,
         "t_max reaches the spectral decay regime; keep it below 0.2/|s_h|");

  DenseSemigroup sg(op);
  UltracontractivityFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.points = points;

  std::vector<double> lx, ly;
  double m_fit = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t =
        t_min * std::pow(t_max / t_min, static_cast<double>(i) / (points - 1));
    const double n = sg.norm_2_to_inf(t);
    if (!(n > 0.0))
      fail(ErrorCode::DegenerateFit, "vanishing operator norm in the window");
    lx.push_back(std::log(t));
    ly.push_back(std::log(n));
    // Support-line constant: the smallest M with norm <= M t^(-1/4) across
    // the window.
    m_fit = std::max(m_fit, n * std::pow(t, 0.25));
  }
  fit.slope = linear_fit(lx, ly).first;
  fit.m_fit = m_fit;
  return fit;
}

PropertyVerdict check_stability_envelope(const DiscreteOperator& op,
                                         const std::vector<double>& t_grid,
                                         const UltracontractivityFit& fit,
                                         double tol) {
  if (!(fit.m_fit > 0.0) || fit.points < 2)
    fail(ErrorCode::MissingPrerequisite,
         "smoothing-law constant unavailable; run fit_ultracontractivity "
         "first");
  const double omega = spectrum(op, 1).spectral_bound;
  if (!(omega < 0.0))
    fail(ErrorCode::MissingPrerequisite,
         "a strictly negative spectral bound is required for the envelope");

  DenseSemigroup sg(op);
  PropertyVerdict v;
  v.property = "stability_envelope";
  v.tolerance = tol;

  const double h2 = op.mesh.h_max() * op.mesh.h_max();
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  Json rows = Json::array();
  for (double t : t_grid) {
    if (!(t > 0.0))
      fail(ErrorCode::InvalidArgument, "envelope times must be positive");
    // Two-step bound: split at s = t/(1 - t*omega), then
    //   norm(t) <= norm_{2->inf}(s) * norm_{2->2}(t-s)
    //           <= m_fit s^(-1/4) e^{omega (t-s)}.
    const double s = t / (1.0 - t * omega);
    if (s < 5.0 * h2)
      fail(ErrorCode::WindowTooNarrow,
           "factorization time below the mesh diffusion scale; refine the "
           "mesh");
    const double measured = sg.norm_2_to_inf(t);
    const double norm_at_s = sg.norm_2_to_inf(s);
    const bool covers =
        norm_at_s <= fit.m_fit * std::pow(s, -0.25) * (1.0 + tol);
    const double envelope =
        fit.m_fit * std::pow(s, -0.25) * std::exp(omega * (t - s));
    // The same expression with the e^{-omega s} factor dropped; reported
    // for reference, never asserted (it undercuts the two-step bound).
    const double product_form = fit.m_fit *
                                std::pow((1.0 - t * omega) / t, 0.25) *
                                std::exp(omega * t);
    const double margin = envelope * (1.0 + tol) - measured;
    min_margin = std::min(min_margin, margin / envelope);
    const bool point_ok = covers && margin >= 0.0;
    ok = ok && point_ok;
    Json row{{"t", t},
             {"s", s},
             {"measured", measured},
             {"envelope", envelope},
             {"margin", margin},
             {"product_form", product_form},
             {"product_form_margin", product_form * (1.0 + tol) - measured},
             {"constant_covers_s", covers}};
    rows.push_back(row);
    if (!point_ok && v.witness.empty()) v.witness = row;
  }
  v.holds = ok;
  v.params["omega"] = omega;
  v.params["m_fit"] = fit.m_fit;
  v.params["min_relative_margin"] = min_margin;
  v.params["grid"] = rows;
  return v;
}

GaussianFit fit_gaussian_envelope(const DiscreteOperator& op,
                                  const std::vector<double>& t_list,
                                  double quantile) {
  if (t_list.empty())
    fail(ErrorCode::InvalidArgument, "empty kernel time list");
  for (double t : t_list)
    if (!(t > 0.0))
      fail(ErrorCode::InvalidArgument, "kernel times must be positive");
  if (!(quantile > 0.0) || quantile > 1.0)
    fail(ErrorCode::InvalidArgument, "quantile must lie in (0, 1]");

  const auto& b = op.coupling.entries;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (i != j && std::abs(b(i, j)) > 1e-12)
        fail(ErrorCode::HypothesisViolated,
             "kernel envelope fit requires a diagonal coupling matrix");
      if (i == j &&
          (b(i, i).real() > 1e-12 || std::abs(b(i, i).imag()) > 1e-12))
        fail(ErrorCode::HypothesisViolated,
             "diagonal coupling entries must be real and nonpositive");
    }
  }

  DenseSemigroup sg(op);
  const std::vector<double>& coord = op.dofs.stretch;

  struct Sample {
    double t, u, k;  // u = |x-y|^2 / t on stretched coordinates
  };
  std::vector<Sample> fitset, holdout;
  long index = 0;
  for (double t : t_list) {
    const Eigen::MatrixXcd k = sg.kernel(t);
    const double scale = std::max(k.cwiseAbs().maxCoeff(), 1e-300);
    if (-k.real().minCoeff() > 1e-10 * scale)
      fail(ErrorCode::HypothesisViolated,
           "kernel negativity detected; the envelope assumes a positive "
           "kernel");
    if (k.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
      fail(ErrorCode::HypothesisViolated,
           "kernel has an imaginary part; the envelope assumes a real "
           "kernel");
    for (int p = 0; p < op.dof(); ++p) {
      for (int q = p; q < op.dof(); ++q) {
        const double val = k(p, q).real();
        if (val <= 1e-13 * scale) continue;  // below the noise floor
        const double d = coord[p] - coord[q];
        const Sample smp{t, d * d / t, val};
        if (index++ % 2 == 0)
          fitset.push_back(smp);
        else
          holdout.push_back(smp);
      }
    }
  }
  if (fitset.size() < 8 || holdout.size() < 8)
    fail(ErrorCode::DegenerateFit, "too few usable kernel samples");

  // Model log(K sqrt(t)) - t = log c - b u; the decay rate is the
  // regression slope.
  std::vector<double> xs, zs;
  xs.reserve(fitset.size());
  zs.reserve(fitset.size());
  for (const Sample& s : fitset) {
    xs.push_back(s.u);
    zs.push_back(std::log(s.k * std::sqrt(s.t)) - s.t);
  }
  const auto [slope, intercept] = linear_fit(xs, zs);
  (void)intercept;
  const double bfit = -slope;
  if (!std::isfinite(bfit) || !(bfit > 0.0))
    fail(ErrorCode::DegenerateFit, "fit produced a nonpositive decay rate");

  // c: requested quantile of the fit residuals K sqrt(t) e^{b u - t}.
  std::vector<double> resid;
  resid.reserve(fitset.size());
  for (const Sample& s : fitset)
    resid.push_back(s.k * std::sqrt(s.t) * std::exp(bfit * s.u - s.t));
  std::sort(resid.begin(), resid.end());
  const std::size_t pos = std::min(
      resid.size() - 1,
      static_cast<std::size_t>(
          std::ceil(quantile * static_cast<double>(resid.size())) - 1));
  const double cfit = resid[pos];
  if (!std::isfinite(cfit) || !(cfit > 0.0))
    fail(ErrorCode::DegenerateFit, "fit produced a nonpositive constant");

  std::size_t good = 0;
  for (const Sample& s : holdout) {
    const double bound =
        cfit / std::sqrt(s.t) * std::exp(-bfit * s.u + s.t);
    if (s.k <= bound * (1.0 + 1e-12)) ++good;
  }

  GaussianFit fit;
  fit.b = bfit;
  fit.c = cfit;
  fit.coverage = static_cast<double>(good) / holdout.size();
  fit.params["t_list"] = t_list;
  fit.params["quantile"] = quantile;
  fit.params["fit_samples"] = fitset.size();
  fit.params["holdout_samples"] = holdout.size();
  fit.params["noise_floor_ratio"] = 1e-13;
  return fit;
}

PropertyVerdict verify_domination(const DiscreteOperator& op_dirichlet,
                                  const DiscreteOperator& op_kirchhoff,
                                  const std::vector<double>& t_grid,
                                  double tol) {
  require_same_lattice(op_dirichlet, op_kirchhoff);
  if (!op_dirichlet.dirichlet_enforced || op_kirchhoff.dirichlet_enforced)
    fail(ErrorCode::InvalidArgument,
         "expected an absorbing-vertex operator and an all-vertex operator");
  if (!coupling_is_zero(op_dirichlet.coupling) ||
      !coupling_is_zero(op_kirchhoff.coupling))
    fail(ErrorCode::InvalidArgument,
         "the one-sided comparison assumes zero coupling");

  DenseSemigroup sg_d(op_dirichlet);
  DenseSemigroup sg_k(op_kirchhoff);

  // Aligned dof lists; the absorbing vertex exists only on the larger
  // system and is compared against 0.
  std::vector<int> di, ki;
  for (std::size_t j = 0; j < op_dirichlet.net.edges.size(); ++j) {
    for (std::size_t k = 0; k < op_dirichlet.dofs.interior[j].size(); ++k) {
      di.push_back(op_dirichlet.dofs.interior[j][k]);
      ki.push_back(op_kirchhoff.dofs.interior[j][k]);
    }
  }
  for (int vtx = 0; vtx < op_dirichlet.net.vertex_count; ++vtx) {
    const int dd = op_dirichlet.dofs.vertex[vtx];
    const int kd = op_kirchhoff.dofs.vertex[vtx];
    if (dd >= 0 && kd >= 0) {
      di.push_back(dd);
      ki.push_back(kd);
    }
  }
  const int k_vn =
      op_kirchhoff.dofs.vertex[op_kirchhoff.net.dirichlet_vertex];
  const int shared = static_cast<int>(di.size());

  PropertyVerdict v;
  v.property = "domination";
  v.tolerance = tol;

  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd kd = sg_d.kernel(t);
    const Eigen::MatrixXcd kk = sg_k.kernel(t);
    const double scale =
        std::max(kk.cwiseAbs().maxCoeff(), kd.cwiseAbs().maxCoeff());
    for (int p = 0; p < shared; ++p) {
      for (int q = 0; q < shared; ++q) {
        const double slack =
            kk(ki[p], ki[q]).real() - kd(di[p], di[q]).real();
        if (slack < min_slack) {
          min_slack = slack;
          if (slack < -tol * scale)
            worst_at = Json{{"t", t},
                            {"row", p},
                            {"col", q},
                            {"slack", slack}};
        }
        ok = ok && slack >= -tol * scale;
      }
    }
    // Rows/columns touching the absorbing vertex dominate the zero kernel.
    for (int q = 0; q < sg_k.dof(); ++q) {
      const double a = kk(k_vn, q).real();
      const double b = kk(q, k_vn).real();
      const double worst = std::min(a, b);
      if (worst < min_slack) min_slack = worst;
      ok = ok && worst >= -tol * scale;
    }
  }

  // Nodal cross check |T(t) f| <= Ttilde(t) |f| on seeded data.
  std::mt19937_64 rng(20260814u);
  const int sample_count = 5;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    const Eigen::VectorXcd f = random_complex_vector(sg_d.dof(), rng);
    Eigen::VectorXcd f_abs = Eigen::VectorXcd::Zero(sg_k.dof());
    for (int p = 0; p < shared; ++p) f_abs(ki[p]) = std::abs(f(di[p]));
    for (double t : t_grid) {
      const Eigen::VectorXcd ud = sg_d.apply(f, t);
      const Eigen::VectorXcd uk = sg_k.apply(f_abs, t);
      const double scale = std::max(1.0, uk.cwiseAbs().maxCoeff());
      for (int p = 0; p < shared; ++p) {
        const double gap = uk(ki[p]).real() - std::abs(ud(di[p]));
        worst_gap = std::min(worst_gap, gap);
        ok = ok && gap >= -tol * scale;
      }
      const double at_vn = uk(k_vn).real();
      worst_gap = std::min(worst_gap, at_vn);
      ok = ok && at_vn >= -tol * scale;
    }
  }

  v.holds = ok;
  v.params["t_grid"] = t_grid;
  v.params["min_kernel_slack"] = min_slack;
  v.params["min_sample_gap"] = worst_gap;
  v.params["shared_dofs"] = shared;
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict verify_coupling_domination(const DiscreteOperator& op_b,
                                           const DiscreteOperator& op_b_tilde,
                                           const std::vector<double>& t_grid,
                                           double tol) {
  require_same_lattice(op_b, op_b_tilde);
  if (op_b.dirichlet_enforced != op_b_tilde.dirichlet_enforced)
    fail(ErrorCode::MeshMismatch,
         "operators handle the absorbing vertex differently");

  // Matrix-level comparison first; throws NotPositiveGenerator when the
  // dominating coupling is not a positive generator.
  const bool matrix_level =
      dominates_matrix(op_b.coupling, op_b_tilde.coupling, t_grid);

  DenseSemigroup sg_b(op_b);
  DenseSemigroup sg_t(op_b_tilde);

  PropertyVerdict v;
  v.property = "coupling_domination";
  v.tolerance = tol;

  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  Json worst_at = Json::object();
  for (double t : t_grid) {
    const Eigen::MatrixXcd kb = sg_b.kernel(t);
    const Eigen::MatrixXcd kt = sg_t.kernel(t);
    const double scale =
        std::max(kb.cwiseAbs().maxCoeff(), kt.cwiseAbs().maxCoeff());
    Eigen::Index r = 0, c = 0;
    const Eigen::MatrixXd slack = kb.real() - kt.cwiseAbs();
    const double mn = slack.minCoeff(&r, &c);
    if (mn < min_slack) {
      min_slack = mn;
      if (mn < -tol * scale)
        worst_at = Json{{"t", t},
                        {"row", static_cast<int>(r)},
                        {"col", static_cast<int>(c)},
                        {"slack", mn}};
    }
    ok = ok && mn >= -tol * scale;
  }

  v.holds = ok;
  v.params["t_grid"] = t_grid;
  v.params["min_kernel_slack"] = min_slack;
  v.params["matrix_level"] = matrix_level;
  v.params["levels_agree"] = (ok == matrix_level);
  if (!v.holds) v.witness = worst_at;
  return v;
}

PropertyVerdict irreducibility_probe(const DiscreteOperator& op, double t,
                                     double threshold) {
  if (!(t > 0.0))
    fail(ErrorCode::InvalidArgument, "probe time must be positive");
  DenseSemigroup sg(op);
  const Eigen::MatrixXcd k = sg.kernel(t);
  const double scale = std::max(k.cwiseAbs().maxCoeff(), 1e-300);
  if (k.real().minCoeff() < -1e-8 * scale)
    fail(ErrorCode::NotPositive,
         "kernel has negative entries; establish positivity before probing "
         "irreducibility");

  Eigen::Index r = 0, c = 0;
  const double min_entry = k.real().minCoeff(&r, &c);

  PropertyVerdict v;
  v.property = "irreducibility";
  v.tolerance = threshold;
  v.holds = min_entry > threshold;
  v.params["t"] = t;
  v.params["min_entry"] = min_entry;
  if (!v.holds)
    v.witness = Json{{"row", static_cast<int>(r)},
                     {"col", static_cast<int>(c)},
                     {"entry", min_entry},
                     {"x", op.dofs.stretch[static_cast<int>(r)]},
                     {"y", op.dofs.stretch[static_cast<int>(c)]}};

  // Structural cross check: when the graph splits through the absorbing
  // vertex and the coupling respects the split, the cross block must vanish.
  const SeparabilityReport sep = separability_decomposition(op.net);
  v.params["separable"] = sep.separable;
  if (sep.separable && op.dirichlet_enforced) {
    std::vector<int> side(op.net.vertex_count, -1);
    for (int vtx : sep.part_one) side[vtx] = 0;
    for (int vtx : sep.part_two) side[vtx] = 1;

    const std::vector<int> coupled = op.coupled_vertices();
    bool compatible = true;
    for (std::size_t i = 0; i < coupled.size() && compatible; ++i) {
      for (std::size_t h = 0; h < coupled.size(); ++h) {
        const int si = side[coupled[i]];
        const int sh = side[coupled[h]];
        if (si >= 0 && sh >= 0 && si != sh &&
            std::abs(op.coupling.entries(i, h)) > 1e-14) {
          compatible = false;
          break;
        }
      }
    }
    v.params["coupling_block_compatible"] = compatible;
    if (compatible) {
      // Dof sides: vertex dofs by vertex, interior dofs by a non-absorbing
      // endpoint of their edge.
      std::vector<int> dof_side(op.dof(), -1);
      for (int vtx = 0; vtx < op.net.vertex_count; ++vtx) {
        const int d = op.dofs.vertex[vtx];
        if (d >= 0) dof_side[d] = side[vtx];
      }
      for (std::size_t j = 0; j < op.net.edges.size(); ++j) {
        int s = side[op.net.edges[j].tail];
        if (s < 0) s = side[op.net.edges[j].head];
        for (int d : op.dofs.interior[j]) dof_side[d] = s;
      }
      double cross_max = 0.0;
      for (int p = 0; p < op.dof(); ++p) {
        for (int q = 0; q < op.dof(); ++q) {
          if (dof_side[p] >= 0 && dof_side[q] >= 0 &&
              dof_side[p] != dof_side[q])
            cross_max = std::max(cross_max, std::abs(k(p, q)));
        }
      }
      v.params["cross_block_max"] = cross_max;
    }
  }
  return v;
}

std::vector<Eigen::MatrixXcd> coupling_family(int dim, int count,
                                              std::uint64_t seed,
                                              double margin_floor) {
  if (dim < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
  if (count < 0) fail(ErrorCode::InvalidArgument, "count must be nonnegative");
  if (!(margin_floor >= 0.0))
    fail(ErrorCode::InvalidArgument, "margin floor must be nonnegative");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, dim - 1);

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(count);
  int mode = 0;
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++guard > 1000 * (count + 1))
      fail(ErrorCode::InvalidArgument,
           "margin floor rejects every generated matrix");
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim, dim);
    const int cls = mode % 6;
    // Off-diagonal magnitudes stay >= 0.05 so structure is detectable.
    switch (cls) {
      case 0: {  // real, positive off-diagonal, sup-norm criterion strict
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            if (i != j) b(i, j) = mag(rng);
        break;
      }
      case 1: {  // real with one negative off-diagonal entry
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            if (i != j) b(i, j) = mag(rng);
        if (dim > 1) {
          int i = pick(rng), j = pick(rng);
          while (j == i) j = pick(rng);
          b(i, j) = -b(i, j).real();
        }
        break;
      }
      case 2:    // complex off-diagonal, sup-norm criterion strict
      case 3: {  // complex off-diagonal, criterion violated on every row
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            if (i != j)
              b(i, j) = std::complex<double>(
                  sgn(rng) * mag(rng),
                  std::copysign(mag(rng), sgn(rng)));
        break;
      }
      case 4: {  // real diagonal negative
        break;
      }
      case 5: {  // positive off-diagonal, criterion violated on every row
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            if (i != j) b(i, j) = mag(rng);
        break;
      }
    }
    const bool violate = (cls == 3 || cls == 5);
    for (int i = 0; i < dim; ++i) {
      double offsum = 0.0;
      for (int j = 0; j < dim; ++j)
        if (j != i) offsum += std::abs(b(i, j));
      const double gap = mag(rng);
      b(i, i) = violate ? -offsum + gap : -offsum - gap;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
      double margin = b(i, i).real();
      for (int j = 0; j < dim; ++j)
        if (j != i) margin += std::abs(b(i, j));
      worst = std::min(worst, std::abs(margin));
    }
    if (worst < margin_floor) continue;
    out.push_back(b);
    ++mode;
  }
  return out;
}

}  // namespace netheat
