#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "netheat/coupling.hpp"
#include "netheat/graph.hpp"

namespace netheat {

/// Strictly positive diffusion coefficient on one edge: either a constant
/// or samples at uniformly spaced points of [0,1], read piecewise-linearly.
struct EdgeCoefficient {
  bool is_constant = true;
  double value = 1.0;
  std::vector<double> samples;  // size >= 2 when not constant

  static EdgeCoefficient constant(double v);
  static EdgeCoefficient sampled(std::vector<double> values);

  double eval(double x) const;            // x in [0,1]
  double endpoint(int which) const;       // 0 -> x = 0, 1 -> x = 1
  void validate() const;                  // NonPositiveCoefficient
};

struct CoefficientProfile {
  std::vector<EdgeCoefficient> edge;  // one entry per edge

  static CoefficientProfile constant(int edge_count, double v);
};

/// Uniform subdivision counts per edge, N_j >= 1.
struct Mesh {
  std::vector<int> elements_per_edge;

  static Mesh uniform(int edge_count, int elements);
  int elements(int edge_j) const { return elements_per_edge[edge_j]; }
  double h(int edge_j) const { return 1.0 / elements_per_edge[edge_j]; }
  double h_max() const;
};

/// Global numbering of the P1 nodal unknowns: edge-interior nodes first
/// (edge-major), then vertex nodes in vertex order. The Dirichlet vertex is
/// eliminated when dirichlet_enforced. Continuity is encoded by sharing one
/// unknown per vertex across all incident edge endpoints.
struct DofMap {
  int count = 0;
  std::vector<std::vector<int>> interior;  // [edge][k-1] for k = 1..N_j-1
  std::vector<int> vertex;                 // per vertex; -1 if eliminated
  std::vector<double> stretch;             // representative coordinate per dof

  /// Global dof of local node k of edge j (k in [0, N_j]); -1 if eliminated.
  int node(const Network& net, const Mesh& mesh, int edge_j, int k) const;
};

/// Assembled mass/stiffness pair of the vertex-coupled diffusion form.
/// stiffness = weighted Laplacian minus the coupling placement, so that
/// g^H stiffness f equals the sesquilinear form a(f, g).
struct DiscreteOperator {
  Network net;
  Mesh mesh;
  CoefficientProfile coefficients;
  CouplingMatrix coupling;
  bool dirichlet_enforced = true;
  DofMap dofs;

  Eigen::SparseMatrix<double> mass;
  Eigen::SparseMatrix<std::complex<double>> stiffness;
  Eigen::SparseMatrix<double> stiffness_unit;  // c == 1, no coupling
  bool stiffness_real = false;
  bool stiffness_hermitian = false;

  int dof() const { return dofs.count; }
  /// Sorted vertices carrying coupling entries (all vertices for the
  /// all-Kirchhoff system, non-Dirichlet vertices otherwise).
  std::vector<int> coupled_vertices() const;
};

struct EllipticityReport {
  double alpha = 0.0;       // coercivity constant at the reported shift
  double omega = 0.0;       // smallest grid shift with alpha > 0
  double continuity_m = 0.0;
  double poincare_c = 0.0;
};

/// Assembles mass, weighted stiffness and the coupling placement
/// S[dof(v_i)][dof(v_h)] -= b_ih over the coupled vertices.
/// Throws DimensionMismatch (B size) and NonPositiveCoefficient.
DiscreteOperator assemble(const Network& net, const CoefficientProfile& c,
                          const CouplingMatrix& b, const Mesh& mesh,
                          bool dirichlet_enforced);

/// Sesquilinear form value g^H S f.
std::complex<double> form_value(const DiscreteOperator& op,
                                const Eigen::VectorXcd& f,
                                const Eigen::VectorXcd& g);

/// Nodal interpolation of per-edge values (N_j + 1 per edge). Values must
/// agree at shared vertices (DiscontinuousAtVertex) and vanish at the
/// Dirichlet vertex when enforced (NonzeroAtDirichlet).
Eigen::VectorXcd interpolate(const DiscreteOperator& op,
                             const std::vector<Eigen::VectorXcd>& edge_values,
                             double tol = 1e-10);

/// Vertex values of a dof vector (zero at eliminated vertices).
NodalTrace nodal_trace(const DiscreteOperator& op, const Eigen::VectorXcd& u);

/// Best constant in ||f||_2^2 <= C ||f'||_2^2 over the discrete space:
/// 1 / lambda_min of the (unit stiffness, mass) pencil. Throws NoDirichlet.
double poincare_constant(const DiscreteOperator& op);

/// Scans the shift grid for the smallest omega with
/// Re a(f,f) + omega ||f||_2^2 >= alpha ||f'||_2^2, alpha > 0; also reports
/// the continuity constant of the form in the H^1_0 seminorm. Throws
/// SingularPencil when the unit stiffness is not positive definite.
EllipticityReport ellipticity_constants(const DiscreteOperator& op,
                                        const std::vector<double>& omega_grid);

}  // namespace netheat
