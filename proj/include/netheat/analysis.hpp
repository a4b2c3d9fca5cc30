#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netheat/evolution.hpp"

namespace netheat {

using Json = nlohmann::ordered_json;

/// Outcome of one property check. params records the inputs and measured
/// quantities; witness is filled whenever the property fails (and may carry
/// informative detail otherwise).
struct PropertyVerdict {
  std::string property;
  bool holds = false;
  double tolerance = 0.0;
  Json params = Json::object();
  Json witness = Json::object();

  Json to_json() const;
};

struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;  // ascending real part
  double spectral_bound = 0.0;                    // -min Re lambda
  /// Late-window slope of log ||T(t) u0||_2; absent when the bound is not
  /// strictly negative or the problem is too large for the dense path.
  std::optional<double> growth_bound_fit;

  Json to_json() const;
};

struct UltracontractivityFit {
  double m_fit = 0.0;   // sharp window constant for the t^(-1/4) law
  double slope = 0.0;   // least-squares log-log slope
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
};

struct GaussianFit {
  double c = 0.0;
  double b = 0.0;
  double coverage = 0.0;  // holdout fraction satisfying the bound
  Json params = Json::object();

  Json to_json() const;
};

/// k smallest-(real part) eigenvalues of the (S, M) pencil.
/// Throws InvalidArgument (k out of range) or EigensolverFailure.
SpectralReport spectrum(const DiscreteOperator& op, int k);

/// Equilateral family: the m-star whose leaves are fused into the absorbing
/// vertex (m parallel unit edges between one free vertex and the absorbing
/// one). Checks s_h <= -(pi/(2m))^2 + eps_h with eps_h = 1% of the bound and
/// reports (without asserting) the comparison against -(pi/(m+1)) under both
/// the printed first-power form and a squared variant.
PropertyVerdict check_spectral_bound_bracket(int m_edges, int resolution);

/// Propagator stays real on real data iff the coupling matrix is real.
PropertyVerdict verify_realness(const DiscreteOperator& op,
                                const std::vector<double>& t_grid, int samples,
                                std::uint64_t seed, double tol);

/// Kernel entries nonnegative (and real) across the grid.
PropertyVerdict verify_positivity(const DiscreteOperator& op,
                                  const std::vector<double>& t_grid,
                                  double tol);

/// Discrete sup-norm contractivity: max abs row sum of the propagator
/// <= 1 + tol, with seeded sample vectors as a redundant check. A
/// non-dissipative coupling is flagged in params (hypothesis violated) but
/// the verdict is still computed.
PropertyVerdict verify_linf_contractivity(const DiscreteOperator& op,
                                          const std::vector<double>& t_grid,
                                          int samples, std::uint64_t seed,
                                          double tol);

/// L1 non-expansion, decided through the adjoint propagator's row sums
/// together with exact piecewise-linear L1 ratios on vertex hats and seeded
/// samples.
PropertyVerdict verify_l1_contractivity(const DiscreteOperator& op,
                                        const std::vector<double>& t_grid,
                                        int samples, std::uint64_t seed,
                                        double tol);

/// Kernel Hermitian across the grid, computed through the non-spectral
/// exponential route so the check is not true by construction.
PropertyVerdict verify_self_adjointness(const DiscreteOperator& op,
                                        const std::vector<double>& t_grid,
                                        double tol);

/// Log-log fit of the 2->inf norm over [t_min, t_max]. The window must
/// resolve the mesh (t_min >= 5 h^2) and sit below the spectral time scale
/// (t_max <= 0.2 / s_h); otherwise WindowTooNarrow.
UltracontractivityFit fit_ultracontractivity(const DiscreteOperator& op,
                                             double t_min, double t_max,
                                             int points);

/// Checks that M ((1 - t w)/t)^(1/4) e^(t w) dominates the measured 2->inf
/// norm, with w = -s_h and M the factorization constant derived from the
/// fit (the two-step bound T(t) = T(s) T(t-s) at s = t/(1 - t w), whose
/// exact prefactor is m_fit e^{-w s}). Raw margins for the bare printed
/// form are reported alongside. Throws MissingPrerequisite.
PropertyVerdict check_stability_envelope(const DiscreteOperator& op,
                                         const std::vector<double>& t_grid,
                                         const UltracontractivityFit& fit,
                                         double tol);

/// Fits K <= c t^(-1/2) exp(-b |x-y|^2 / t + t) on stretched coordinates:
/// b from a log-linear regression, c from the requested quantile of fit
/// residuals, coverage from an interleaved holdout. Requires a diagonal
/// negative coupling and nonnegative kernels (HypothesisViolated);
/// DegenerateFit when the sample set is unusable.
GaussianFit fit_gaussian_envelope(const DiscreteOperator& op,
                                  const std::vector<double>& t_list,
                                  double quantile);

/// Entrywise kernel comparison of the absorbing-vertex system against the
/// all-Kirchhoff system on the same mesh (absorbing dof compared as zero).
/// Throws MeshMismatch.
PropertyVerdict verify_domination(const DiscreteOperator& op_dirichlet,
                                  const DiscreteOperator& op_kirchhoff,
                                  const std::vector<double>& t_grid,
                                  double tol);

/// |kernel of the B~ system| <= kernel of the B system entrywise, cross-
/// checked against the matrix-level comparison of exp(tB~) and exp(tB).
PropertyVerdict verify_coupling_domination(const DiscreteOperator& op_b,
                                           const DiscreteOperator& op_b_tilde,
                                           const std::vector<double>& t_grid,
                                           double tol);

/// All kernel entries strictly above threshold at time t (irreducibility);
/// when the graph separates through the absorbing vertex and the coupling
/// is block-compatible with the split, the cross block is reported and must
/// vanish. Throws NotPositive if the kernel has genuinely negative entries.
PropertyVerdict irreducibility_probe(const DiscreteOperator& op, double t,
                                     double threshold);

/// Seeded coupling matrices cycling through structural classes (real
/// positive off-diagonal, sign-violating, complex contractive, complex
/// dissipative non-contractive, non-dissipative, diagonal), with class
/// margins at least margin_floor.
std::vector<Eigen::MatrixXcd> coupling_family(int dim, int count,
                                              std::uint64_t seed,
                                              double margin_floor);

}  // namespace netheat
