#pragma once

#include <vector>

#include <Eigen/Core>

#include "netheat/errors.hpp"

namespace netheat {

/// Directed edge of the combinatorial graph. The parametrization of edge j
/// runs over [0,1] with e_j(0) = tail and e_j(1) = head.
struct Edge {
  int tail = 0;
  int head = 0;
};

/// Finite connected graph with unit edge lengths and one designated
/// absorbing (Dirichlet) vertex. Loops and parallel edges are permitted.
/// Instances are built through build_network and treated as immutable.
struct Network {
  int vertex_count = 0;
  std::vector<Edge> edges;
  int dirichlet_vertex = 0;

  int edge_count() const { return static_cast<int>(edges.size()); }
  /// Number of edge endpoints at v; a loop contributes 2.
  int degree(int vertex) const;
};

/// 0/1 endpoint indicators: phi_plus(i,j) = 1 iff tail(j) = i,
/// phi_minus(i,j) = 1 iff head(j) = i.
struct IncidencePair {
  Eigen::MatrixXi phi_plus;
  Eigen::MatrixXi phi_minus;
  /// Signed incidence; the column of a loop is identically zero.
  Eigen::MatrixXi phi() const { return phi_plus - phi_minus; }
};

/// Vertex values of an edgewise function: one entry per vertex, forced to
/// zero at the Dirichlet vertex.
struct NodalTrace {
  Eigen::VectorXcd values;
};

/// Result of removing the Dirichlet vertex: if the rest disconnects, the
/// graph splits into two lobes glued only through that vertex.
struct SeparabilityReport {
  bool separable = false;
  std::vector<int> part_one;
  std::vector<int> part_two;
};

/// Validates indices and connectivity. Throws IndexOutOfRange or
/// Disconnected.
Network build_network(int vertex_count, const std::vector<Edge>& edges,
                      int dirichlet_vertex);

IncidencePair incidence_matrices(const Network& net);

/// Sorted list of edges incident to the vertex; a loop appears once.
std::vector<int> incident_edges(const Network& net, int vertex);

/// Fuses the listed degree-1 vertices into a single vertex, placed last and
/// designated Dirichlet. Edge orientations are preserved. Throws
/// NotDegreeOne if a listed vertex has degree != 1.
Network merge_boundary_vertices(const Network& net,
                                const std::vector<int>& boundary);

/// Global coordinate of the point at arclength x along edge j when the
/// edges are laid end to end on [0, m]: j + x. Throws OutOfUnitInterval.
double stretch_coordinate(const Network& net, int edge, double x);

SeparabilityReport separability_decomposition(const Network& net);

}  // namespace netheat
