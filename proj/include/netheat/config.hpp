#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netheat/discretization.hpp"
#include "netheat/semilinear.hpp"

namespace netheat {

/// Fully validated run description. Sections: [network] [coefficients]
/// [coupling] [mesh] [run] [semilinear]; grammar documented in the README.
struct RunConfig {
  bool has_network = false;
  Network net;
  CoefficientProfile coefficients;
  CouplingMatrix coupling;
  Mesh mesh;
  bool kirchhoff_full = false;  // couple every vertex, no absorbing unknown

  double t_end = 1.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  int eigenvalues = 3;
  double quantile = 1.0;
  std::vector<double> times;
  std::string initial = "hat";
  std::optional<NonlinearFlux> flux;

  bool dirichlet_enforced() const { return !kirchhoff_full; }
};

/// Parses and validates the sectioned key-value format. Throws ParseError
/// (syntax, with line number) or ValidationError (semantics, with the
/// offending key path).
RunConfig parse_config(const std::string& text);

/// Assembles the discrete operator described by the config.
/// Throws ValidationError when no network section was given.
DiscreteOperator build_operator(const RunConfig& cfg);

/// Initial state selected by run.initial: "hat [vertex]" (nodal hat at a
/// vertex unknown), "ones", or "random" (seeded by run.seed).
Eigen::VectorXcd initial_state(const RunConfig& cfg,
                               const DiscreteOperator& op);

}  // namespace netheat
