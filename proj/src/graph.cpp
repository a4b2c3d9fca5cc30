#include "netheat/graph.hpp"

#include <algorithm>
#include <queue>

namespace netheat {
namespace {

void check_vertex_index(int vertex, int vertex_count, const char* what) {
  if (vertex < 0 || vertex >= vertex_count) {
    fail(ErrorCode::IndexOutOfRange,
         std::string(what) + " index " + std::to_string(vertex) +
             " outside [0, " + std::to_string(vertex_count) + ")");
  }
}

/// Component ids over the vertex set, optionally skipping one vertex
/// (edges touching it are excluded). Skipped vertex gets id -1.
std::vector<int> component_ids(const Network& net, int skip_vertex) {
  std::vector<std::vector<int>> adjacency(net.vertex_count);
  for (const Edge& e : net.edges) {
    if (e.tail == skip_vertex || e.head == skip_vertex) continue;
    adjacency[e.tail].push_back(e.head);
    adjacency[e.head].push_back(e.tail);
  }
  std::vector<int> id(net.vertex_count, -1);
  int next_id = 0;
  for (int start = 0; start < net.vertex_count; ++start) {
    if (start == skip_vertex || id[start] >= 0) continue;
    id[start] = next_id;
    std::queue<int> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
      int v = frontier.front();
      frontier.pop();
      for (int w : adjacency[v]) {
        if (id[w] < 0) {
          id[w] = next_id;
          frontier.push(w);
        }
      }
    }
    ++next_id;
  }
  return id;
}

}  // namespace

int Network::degree(int vertex) const {
  int d = 0;
  for (const Edge& e : edges) {
    if (e.tail == vertex) ++d;
    if (e.head == vertex) ++d;
  }
  return d;
}

Network build_network(int vertex_count, const std::vector<Edge>& edges,
                      int dirichlet_vertex) {
  if (vertex_count < 1) {
    fail(ErrorCode::IndexOutOfRange, "vertex count must be at least 1");
  }
  if (edges.empty()) {
    fail(ErrorCode::IndexOutOfRange, "edge list must be non-empty");
  }
  for (const Edge& e : edges) {
    check_vertex_index(e.tail, vertex_count, "edge tail");
    check_vertex_index(e.head, vertex_count, "edge head");
  }
  check_vertex_index(dirichlet_vertex, vertex_count, "dirichlet vertex");

  Network net{vertex_count, edges, dirichlet_vertex};
  std::vector<int> id = component_ids(net, /*skip_vertex=*/-1);
  for (int v = 0; v < vertex_count; ++v) {
    if (id[v] != 0) {
      fail(ErrorCode::Disconnected,
           "vertex " + std::to_string(v) + " unreachable from vertex 0");
    }
  }
  return net;
}

IncidencePair incidence_matrices(const Network& net) {
  IncidencePair pair;
  pair.phi_plus = Eigen::MatrixXi::Zero(net.vertex_count, net.edge_count());
  pair.phi_minus = Eigen::MatrixXi::Zero(net.vertex_count, net.edge_count());
  for (int j = 0; j < net.edge_count(); ++j) {
    pair.phi_plus(net.edges[j].tail, j) = 1;
    pair.phi_minus(net.edges[j].head, j) = 1;
  }
  return pair;
}

std::vector<int> incident_edges(const Network& net, int vertex) {
  check_vertex_index(vertex, net.vertex_count, "vertex");
  std::vector<int> result;
  for (int j = 0; j < net.edge_count(); ++j) {
    if (net.edges[j].tail == vertex || net.edges[j].head == vertex) {
      result.push_back(j);
    }
  }
  return result;
}

Network merge_boundary_vertices(const Network& net,
                                const std::vector<int>& boundary) {
  if (boundary.empty()) {
    fail(ErrorCode::IndexOutOfRange, "boundary vertex list must be non-empty");
  }
  std::vector<bool> in_boundary(net.vertex_count, false);
  for (int v : boundary) {
    check_vertex_index(v, net.vertex_count, "boundary vertex");
    if (in_boundary[v]) {
      fail(ErrorCode::IndexOutOfRange,
           "boundary vertex " + std::to_string(v) + " listed twice");
    }
    if (net.degree(v) != 1) {
      fail(ErrorCode::NotDegreeOne,
           "boundary vertex " + std::to_string(v) + " has degree " +
               std::to_string(net.degree(v)));
    }
    in_boundary[v] = true;
  }

  // Interior vertices keep their relative order; the fused vertex is last.
  std::vector<int> new_id(net.vertex_count, -1);
  int next = 0;
  for (int v = 0; v < net.vertex_count; ++v) {
    if (!in_boundary[v]) new_id[v] = next++;
  }
  int fused = next;
  for (int v = 0; v < net.vertex_count; ++v) {
    if (in_boundary[v]) new_id[v] = fused;
  }

  std::vector<Edge> edges(net.edges.size());
  for (size_t j = 0; j < net.edges.size(); ++j) {
    edges[j] = Edge{new_id[net.edges[j].tail], new_id[net.edges[j].head]};
  }
  return build_network(fused + 1, edges, fused);
}

double stretch_coordinate(const Network& net, int edge, double x) {
  if (edge < 0 || edge >= net.edge_count()) {
    fail(ErrorCode::IndexOutOfRange, "edge index " + std::to_string(edge));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    fail(ErrorCode::OutOfUnitInterval,
         "coordinate " + std::to_string(x) + " outside [0,1]");
  }
  return static_cast<double>(edge) + x;
}

SeparabilityReport separability_decomposition(const Network& net) {
  SeparabilityReport report;
  std::vector<int> id = component_ids(net, net.dirichlet_vertex);
  int components = 0;
  for (int v = 0; v < net.vertex_count; ++v) {
    components = std::max(components, id[v] + 1);
  }
  if (components < 2) return report;

  report.separable = true;
  for (int v = 0; v < net.vertex_count; ++v) {
    if (id[v] == 0) {
      report.part_one.push_back(v);
    } else if (id[v] > 0) {
      report.part_two.push_back(v);
    }
  }
  return report;
}

}  // namespace netheat
