#include "netheat/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace netheat {
namespace {

using Triplet = Eigen::Triplet<double>;
using TripletC = Eigen::Triplet<std::complex<double>>;

}  // namespace

EdgeCoefficient EdgeCoefficient::constant(double v) {
  EdgeCoefficient c;
  c.is_constant = true;
  c.value = v;
  return c;
}

EdgeCoefficient EdgeCoefficient::sampled(std::vector<double> values) {
  EdgeCoefficient c;
  c.is_constant = false;
  c.samples = std::move(values);
  return c;
}

void EdgeCoefficient::validate() const {
  if (is_constant) {
    if (!(value > 0.0)) {
      fail(ErrorCode::NonPositiveCoefficient,
           "constant coefficient " + std::to_string(value));
    }
    return;
  }
  if (samples.size() < 2) {
    fail(ErrorCode::NonPositiveCoefficient,
         "sampled coefficient needs at least 2 samples");
  }
  for (double s : samples) {
    if (!(s > 0.0)) {
      fail(ErrorCode::NonPositiveCoefficient,
           "coefficient sample " + std::to_string(s));
    }
  }
}

double EdgeCoefficient::eval(double x) const {
  if (is_constant) return value;
  const int n = static_cast<int>(samples.size()) - 1;
  double pos = std::clamp(x, 0.0, 1.0) * n;
  int cell = std::min(static_cast<int>(pos), n - 1);
  double frac = pos - cell;
  return samples[cell] * (1.0 - frac) + samples[cell + 1] * frac;
}

double EdgeCoefficient::endpoint(int which) const {
  if (is_constant) return value;
  return which == 0 ? samples.front() : samples.back();
}

CoefficientProfile CoefficientProfile::constant(int edge_count, double v) {
  CoefficientProfile p;
  p.edge.assign(edge_count, EdgeCoefficient::constant(v));
  return p;
}

Mesh Mesh::uniform(int edge_count, int elements) {
  Mesh m;
  m.elements_per_edge.assign(edge_count, elements);
  return m;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (int n : elements_per_edge) h = std::max(h, 1.0 / n);
  return h;
}

int DofMap::node(const Network& net, const Mesh& mesh, int edge_j,
                 int k) const {
  const int n = mesh.elements(edge_j);
  if (k == 0) return vertex[net.edges[edge_j].tail];
  if (k == n) return vertex[net.edges[edge_j].head];
  return interior[edge_j][k - 1];
}

std::vector<int> DiscreteOperator::coupled_vertices() const {
  std::vector<int> vs;
  for (int v = 0; v < net.vertex_count; ++v) {
    if (!dirichlet_enforced || v != net.dirichlet_vertex) vs.push_back(v);
  }
  return vs;
}

namespace {

DofMap build_dof_map(const Network& net, const Mesh& mesh,
                     bool dirichlet_enforced) {
  DofMap map;
  map.interior.resize(net.edge_count());
  int next = 0;
  for (int j = 0; j < net.edge_count(); ++j) {
    const int n = mesh.elements(j);
    map.interior[j].resize(std::max(0, n - 1));
    for (int k = 1; k < n; ++k) map.interior[j][k - 1] = next++;
  }
  map.vertex.assign(net.vertex_count, -1);
  for (int v = 0; v < net.vertex_count; ++v) {
    if (dirichlet_enforced && v == net.dirichlet_vertex) continue;
    map.vertex[v] = next++;
  }
  map.count = next;

  map.stretch.assign(map.count, 0.0);
  for (int j = 0; j < net.edge_count(); ++j) {
    const double h = mesh.h(j);
    for (int k = 1; k < mesh.elements(j); ++k) {
      map.stretch[map.interior[j][k - 1]] = j + k * h;
    }
  }
  // A shared vertex has several endpoint images on [0, m]; report the
  // smallest one as its representative coordinate.
  std::vector<double> vertex_coord(net.vertex_count,
                                   std::numeric_limits<double>::infinity());
  for (int j = 0; j < net.edge_count(); ++j) {
    vertex_coord[net.edges[j].tail] =
        std::min(vertex_coord[net.edges[j].tail], static_cast<double>(j));
    vertex_coord[net.edges[j].head] =
        std::min(vertex_coord[net.edges[j].head], static_cast<double>(j) + 1.0);
  }
  for (int v = 0; v < net.vertex_count; ++v) {
    if (map.vertex[v] >= 0) map.stretch[map.vertex[v]] = vertex_coord[v];
  }
  return map;
}

}  // namespace

DiscreteOperator assemble(const Network& net, const CoefficientProfile& c,
                          const CouplingMatrix& b, const Mesh& mesh,
                          bool dirichlet_enforced) {
  if (static_cast<int>(c.edge.size()) != net.edge_count()) {
    fail(ErrorCode::DimensionMismatch,
         "coefficient profile covers " + std::to_string(c.edge.size()) +
             " edges, graph has " + std::to_string(net.edge_count()));
  }
  if (static_cast<int>(mesh.elements_per_edge.size()) != net.edge_count()) {
    fail(ErrorCode::DimensionMismatch, "mesh size differs from edge count");
  }
  for (int n : mesh.elements_per_edge) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "mesh needs >= 1 element");
  }
  for (const EdgeCoefficient& ec : c.edge) ec.validate();

  DiscreteOperator op;
  op.net = net;
  op.mesh = mesh;
  op.coefficients = c;
  op.coupling = b;
  op.dirichlet_enforced = dirichlet_enforced;
  op.dofs = build_dof_map(net, mesh, dirichlet_enforced);

  const std::vector<int> coupled = op.coupled_vertices();
  if (b.dim() != static_cast<Eigen::Index>(coupled.size())) {
    fail(ErrorCode::DimensionMismatch,
         "coupling is " + std::to_string(b.dim()) + "x" +
             std::to_string(b.dim()) + ", expected dimension " +
             std::to_string(coupled.size()));
  }

  std::vector<Triplet> mass_t, unit_t;
  std::vector<TripletC> stiff_t;
  for (int j = 0; j < net.edge_count(); ++j) {
    const int n = mesh.elements(j);
    const double h = mesh.h(j);
    for (int e = 0; e < n; ++e) {
      const int node[2] = {op.dofs.node(net, mesh, j, e),
                           op.dofs.node(net, mesh, j, e + 1)};
      const double cm = c.edge[j].eval((e + 0.5) * h);
      // Element matrices: mass (h/6)[[2,1],[1,2]], stiffness
      // (c_mid/h)[[1,-1],[-1,1]].
      for (int r = 0; r < 2; ++r) {
        if (node[r] < 0) continue;
        for (int s = 0; s < 2; ++s) {
          if (node[s] < 0) continue;
          const double mij = (r == s ? 2.0 : 1.0) * h / 6.0;
          const double kij = (r == s ? 1.0 : -1.0) / h;
          mass_t.emplace_back(node[r], node[s], mij);
          stiff_t.emplace_back(node[r], node[s],
                               std::complex<double>(cm * kij, 0.0));
          unit_t.emplace_back(node[r], node[s], kij);
        }
      }
    }
  }
  for (size_t bi = 0; bi < coupled.size(); ++bi) {
    for (size_t bh = 0; bh < coupled.size(); ++bh) {
      const std::complex<double> value = b.entries(bi, bh);
      if (value == 0.0) continue;
      stiff_t.emplace_back(op.dofs.vertex[coupled[bi]],
                           op.dofs.vertex[coupled[bh]], -value);
    }
  }

  const int dof = op.dofs.count;
  op.mass.resize(dof, dof);
  op.mass.setFromTriplets(mass_t.begin(), mass_t.end());
  op.stiffness.resize(dof, dof);
  op.stiffness.setFromTriplets(stiff_t.begin(), stiff_t.end());
  op.stiffness_unit.resize(dof, dof);
  op.stiffness_unit.setFromTriplets(unit_t.begin(), unit_t.end());

  const double scale = std::max(1.0, b.dim() == 0
                                         ? 0.0
                                         : b.entries.cwiseAbs().maxCoeff());
  op.stiffness_real =
      b.dim() == 0 || b.entries.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale;
  op.stiffness_hermitian =
      b.dim() == 0 ||
      (b.entries - b.entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
  return op;
}

std::complex<double> form_value(const DiscreteOperator& op,
                                const Eigen::VectorXcd& f,
                                const Eigen::VectorXcd& g) {
  if (f.size() != op.dof() || g.size() != op.dof()) {
    fail(ErrorCode::DimensionMismatch, "form arguments must have dof length");
  }
  return g.dot(op.stiffness * f);  // g^H S f
}

Eigen::VectorXcd interpolate(const DiscreteOperator& op,
                             const std::vector<Eigen::VectorXcd>& edge_values,
                             double tol) {
  const Network& net = op.net;
  if (static_cast<int>(edge_values.size()) != net.edge_count()) {
    fail(ErrorCode::DimensionMismatch, "need one value vector per edge");
  }
  for (int j = 0; j < net.edge_count(); ++j) {
    if (edge_values[j].size() != op.mesh.elements(j) + 1) {
      fail(ErrorCode::DimensionMismatch,
           "edge " + std::to_string(j) + " needs " +
               std::to_string(op.mesh.elements(j) + 1) + " samples");
    }
  }

  // Endpoint samples of all incident edges must agree at each vertex.
  std::vector<std::complex<double>> vertex_value(net.vertex_count, 0.0);
  std::vector<bool> seen(net.vertex_count, false);
  auto visit = [&](int v, std::complex<double> value, int edge_j) {
    if (seen[v] && std::abs(vertex_value[v] - value) > tol) {
      fail(ErrorCode::DiscontinuousAtVertex,
           "edge " + std::to_string(edge_j) + " disagrees at vertex " +
               std::to_string(v));
    }
    vertex_value[v] = value;
    seen[v] = true;
  };
  for (int j = 0; j < net.edge_count(); ++j) {
    visit(net.edges[j].tail, edge_values[j][0], j);
    visit(net.edges[j].head, edge_values[j][op.mesh.elements(j)], j);
  }
  if (op.dirichlet_enforced &&
      std::abs(vertex_value[net.dirichlet_vertex]) > tol) {
    fail(ErrorCode::NonzeroAtDirichlet,
         "value at the Dirichlet vertex has magnitude " +
             std::to_string(std::abs(vertex_value[net.dirichlet_vertex])));
  }

  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(op.dof());
  for (int j = 0; j < net.edge_count(); ++j) {
    for (int k = 0; k <= op.mesh.elements(j); ++k) {
      int dof = op.dofs.node(net, op.mesh, j, k);
      if (dof >= 0) u[dof] = edge_values[j][k];
    }
  }
  return u;
}

NodalTrace nodal_trace(const DiscreteOperator& op, const Eigen::VectorXcd& u) {
  if (u.size() != op.dof()) {
    fail(ErrorCode::DimensionMismatch, "trace argument must have dof length");
  }
  NodalTrace trace;
  trace.values = Eigen::VectorXcd::Zero(op.net.vertex_count);
  for (int v = 0; v < op.net.vertex_count; ++v) {
    if (op.dofs.vertex[v] >= 0) trace.values[v] = u[op.dofs.vertex[v]];
  }
  return trace;
}

namespace {

/// Smallest eigenvalue of the pencil (A, B) with A symmetric, B SPD.
double pencil_min_eigenvalue(const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::EigensolverFailure, "generalized eigensolve failed");
  }
  return solver.eigenvalues().minCoeff();
}

}  // namespace

double poincare_constant(const DiscreteOperator& op) {
  if (!op.dirichlet_enforced) {
    fail(ErrorCode::NoDirichlet,
         "the Poincare constant needs the absorbing vertex enforced");
  }
  Eigen::MatrixXd k1 = Eigen::MatrixXd(op.stiffness_unit);
  Eigen::MatrixXd m = Eigen::MatrixXd(op.mass);
  double lambda = pencil_min_eigenvalue(k1, m);
  if (!(lambda > 0.0)) {
    fail(ErrorCode::SingularPencil, "unit stiffness is not positive definite");
  }
  return 1.0 / lambda;
}

EllipticityReport ellipticity_constants(
    const DiscreteOperator& op, const std::vector<double>& omega_grid) {
  if (omega_grid.empty()) {
    fail(ErrorCode::InvalidArgument, "shift grid must be non-empty");
  }
  Eigen::MatrixXd k1 = Eigen::MatrixXd(op.stiffness_unit);
  Eigen::LLT<Eigen::MatrixXd> llt(k1);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::SingularPencil,
         "unit stiffness is not positive definite (missing Dirichlet vertex)");
  }
  // Guard against semidefinite K1 passing the factorization.
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k1);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
      fail(ErrorCode::SingularPencil,
           "unit stiffness is not positive definite");
    }
  }

  Eigen::MatrixXcd s = Eigen::MatrixXcd(op.stiffness);
  Eigen::MatrixXd sym = (0.5 * (s + s.adjoint())).real();
  Eigen::MatrixXd m = Eigen::MatrixXd(op.mass);

  EllipticityReport report;
  std::vector<double> grid = omega_grid;
  std::sort(grid.begin(), grid.end());
  bool found = false;
  for (double omega : grid) {
    double alpha = pencil_min_eigenvalue(sym + omega * m, k1);
    report.alpha = alpha;
    report.omega = omega;
    if (alpha > 0.0) {
      found = true;
      break;
    }
  }
  (void)found;  // alpha <= 0 in the report signals no grid shift worked

  // Continuity constant: largest singular value of L^-1 S L^-T where
  // K1 = L L^T, i.e. the operator norm of the form in the seminorm.
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXcd t =
      l.cast<std::complex<double>>().triangularView<Eigen::Lower>().solve(s);
  Eigen::MatrixXcd tt = l.cast<std::complex<double>>()
                            .triangularView<Eigen::Lower>()
                            .solve(t.adjoint().eval())
                            .adjoint();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tt);
  report.continuity_m = svd.singularValues().maxCoeff();

  report.poincare_c = op.dirichlet_enforced ? poincare_constant(op) : 0.0;
  return report;
}

}  // namespace netheat
