#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netheat/analysis.hpp"
#include "netheat/config.hpp"
#include "netheat/coupling.hpp"
#include "netheat/errors.hpp"
#include "netheat/evolution.hpp"
#include "netheat/io.hpp"
#include "netheat/semilinear.hpp"

namespace fs = std::filesystem;
using namespace netheat;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail(ErrorCode::InvalidArgument, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name);
  if (!out)
    fail(ErrorCode::InvalidArgument,
         "cannot write '" + (fs::path(dir) / name).string() + "'");
  return out;
}

std::vector<double> verification_grid(const RunConfig& cfg) {
  if (!cfg.times.empty()) return cfg.times;
  return {0.01, 0.1, 1.0};
}

constexpr int kVerifySamples = 6;

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const DiscreteOperator op = build_operator(cfg);
  const StateVector u0{initial_state(cfg, op), 0.0};
  const Trajectory traj = evolve(op, u0, cfg.t_end, cfg.dt);
  std::ofstream out = open_output(out_dir, "trajectory.csv");
  write_trajectory_csv(out, traj);
  const NormTriple& last = traj.norms.back();
  std::cout << "steps=" << traj.states.size() - 1
            << " t=" << format_number(traj.states.back().time)
            << " l1=" << format_number(last.l1)
            << " l2=" << format_number(last.l2)
            << " linf=" << format_number(last.linf) << '\n';
  return 0;
}

int cmd_semilinear(const RunConfig& cfg, const std::string& out_dir) {
  if (!cfg.flux)
    fail(ErrorCode::ValidationError,
         "semilinear.psi: section required for this command");
  const DiscreteOperator op = build_operator(cfg);
  const StateVector u0{initial_state(cfg, op), 0.0};
  const Trajectory traj = solve_semilinear(op, *cfg.flux, u0, cfg.t_end, cfg.dt);
  std::ofstream out = open_output(out_dir, "trajectory.csv");
  write_trajectory_csv(out, traj);
  const NormTriple& last = traj.norms.back();
  std::cout << "steps=" << traj.states.size() - 1
            << " t=" << format_number(traj.states.back().time)
            << " l1=" << format_number(last.l1)
            << " l2=" << format_number(last.l2)
            << " linf=" << format_number(last.linf) << '\n';
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& out_dir) {
  const DiscreteOperator op = build_operator(cfg);
  const SpectralReport rep = spectrum(op, cfg.eigenvalues);
  std::ofstream out = open_output(out_dir, "spectral.json");
  out << rep.to_json().dump(2) << '\n';
  std::cout << "spectral_bound=" << format_number(rep.spectral_bound);
  if (rep.growth_bound_fit)
    std::cout << " growth_bound_fit=" << format_number(*rep.growth_bound_fit);
  std::cout << " eigenvalues=";
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    if (i) std::cout << ';';
    std::cout << format_number(rep.eigenvalues[i].real());
    if (rep.eigenvalues[i].imag() != 0.0)
      std::cout << (rep.eigenvalues[i].imag() > 0 ? "+" : "")
                << format_number(rep.eigenvalues[i].imag()) << 'i';
  }
  std::cout << '\n';
  return 0;
}

int cmd_kernel(const RunConfig& cfg, const std::string& out_dir) {
  const DiscreteOperator op = build_operator(cfg);
  std::vector<double> times = cfg.times;
  if (times.empty()) times.push_back(cfg.t_end);
  std::vector<KernelMatrix> kernels;
  kernels.reserve(times.size());
  for (double t : times) kernels.push_back(heat_kernel(op, t));
  std::ofstream out = open_output(out_dir, "kernel.csv");
  write_kernel_csv(out, kernels);
  std::cout << "kernels=" << kernels.size() << " dof=" << op.dof() << '\n';
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& paired_path,
               const std::string& out_dir) {
  const DiscreteOperator op = build_operator(cfg);
  const std::vector<double> grid = verification_grid(cfg);
  std::vector<PropertyVerdict> verdicts;
  verdicts.push_back(
      verify_realness(op, grid, kVerifySamples, cfg.seed, cfg.tolerance));
  verdicts.push_back(verify_positivity(op, grid, cfg.tolerance));
  verdicts.push_back(verify_linf_contractivity(op, grid, kVerifySamples,
                                               cfg.seed, cfg.tolerance));
  verdicts.push_back(verify_l1_contractivity(op, grid, kVerifySamples,
                                             cfg.seed, cfg.tolerance));
  verdicts.push_back(verify_self_adjointness(op, grid, cfg.tolerance));
  if (!paired_path.empty()) {
    // The paired config names the dominating system: the all-Kirchhoff
    // relaxation, or the positive-off-diagonal coupling whose semigroup
    // should bound this one in modulus.
    RunConfig paired = parse_config(read_file(paired_path));
    paired.seed = cfg.seed;
    const DiscreteOperator paired_op = build_operator(paired);
    if (paired.kirchhoff_full && !cfg.kirchhoff_full)
      verdicts.push_back(verify_domination(op, paired_op, grid, cfg.tolerance));
    else
      verdicts.push_back(
          verify_coupling_domination(paired_op, op, grid, cfg.tolerance));
  }
  verdicts.push_back(irreducibility_probe(op, 0.5, 1e-12));

  std::ofstream out = open_output(out_dir, "verdicts.jsonl");
  bool all_hold = true;
  for (const PropertyVerdict& v : verdicts) {
    const Json j = v.to_json();
    write_json_line(out, j);
    write_json_line(std::cout, j);
    all_hold = all_hold && v.holds;
  }
  return all_hold ? 0 : 1;
}

int cmd_gaussian_fit(const RunConfig& cfg, const std::string& out_dir) {
  const DiscreteOperator op = build_operator(cfg);
  std::vector<double> t_list = cfg.times;
  if (t_list.empty()) {
    // Default window: early times where the free-space profile dominates.
    const int points = 9;
    for (int i = 0; i < points; ++i)
      t_list.push_back(1e-3 * std::pow(100.0, i / double(points - 1)));
  }
  const GaussianFit fit = fit_gaussian_envelope(op, t_list, cfg.quantile);
  std::ofstream out = open_output(out_dir, "gaussian.json");
  out << fit.to_json().dump(2) << '\n';
  std::vector<KernelMatrix> kernels;
  kernels.reserve(t_list.size());
  for (double t : t_list) kernels.push_back(heat_kernel(op, t));
  std::ofstream samples = open_output(out_dir, "samples.csv");
  write_kernel_csv(samples, kernels);
  std::cout << "c=" << format_number(fit.c) << " b=" << format_number(fit.b)
            << " coverage=" << format_number(fit.coverage) << '\n';
  return 0;
}

int cmd_check_matrix(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.coupling.dim() == 0)
    fail(ErrorCode::ValidationError,
         "coupling.B: required for this command");
  const CouplingReport rep = classify_coupling(cfg.coupling, cfg.tolerance);
  const std::vector<double> grid = verification_grid(cfg);
  const bool contractive =
      verify_matrix_linf_contractivity(cfg.coupling, grid, 8, cfg.seed);

  Json report;
  report["is_real"] = rep.is_real;
  report["is_dissipative"] = rep.is_dissipative;
  report["is_self_adjoint"] = rep.is_self_adjoint;
  report["positive_offdiagonal"] = rep.positive_offdiagonal;
  report["row_criterion"] = rep.row_criterion;
  report["column_criterion"] = rep.column_criterion;
  if (rep.block_partition) report["block_partition"] = *rep.block_partition;

  PropertyVerdict verdict;
  verdict.property = "row_criterion_matches_linf_contractivity";
  verdict.holds = rep.row_criterion == contractive;
  verdict.tolerance = cfg.tolerance;
  verdict.params["row_criterion"] = rep.row_criterion;
  verdict.params["linf_contractive"] = contractive;
  verdict.params["row_criterion_margin"] =
      row_criterion_margin(cfg.coupling.entries);
  verdict.params["column_criterion_margin"] =
      column_criterion_margin(cfg.coupling.entries);
  verdict.params["t_grid"] = grid;

  Json doc;
  doc["report"] = report;
  doc["verdict"] = verdict.to_json();
  std::ofstream out = open_output(out_dir, "matrix.json");
  out << doc.dump(2) << '\n';
  write_json_line(std::cout, doc);
  return verdict.holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Diffusion on a metric graph with matrix vertex coupling: "
      "simulation, spectra, kernels and property verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string paired_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")
        ->required();
    sub->add_option("--out", out_dir, "output directory (default .)");
    sub->add_option("--seed", seed, "override run.seed");
    return sub;
  };

  CLI::App* simulate =
      add_common(app.add_subcommand("simulate", "Crank-Nicolson evolution"));
  CLI::App* spectrum_cmd = add_common(
      app.add_subcommand("spectrum", "pencil eigenvalues and decay rates"));
  CLI::App* kernel = add_common(
      app.add_subcommand("kernel", "nodal heat kernels at run.times"));
  CLI::App* verify = add_common(
      app.add_subcommand("verify", "semigroup property verdict suite"));
  verify->add_option("--paired", paired_path,
                     "config of the dominating system (enables the "
                     "domination verdict)");
  CLI::App* gaussian = add_common(app.add_subcommand(
      "gaussian-fit", "fit the heat-kernel envelope constants"));
  CLI::App* semilinear_cmd = add_common(
      app.add_subcommand("semilinear", "implicit-explicit semilinear run"));
  CLI::App* check_matrix = add_common(app.add_subcommand(
      "check-matrix", "coupling matrix flags and contractivity verdict"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig cfg = parse_config(read_file(config_path));
    CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed") > 0) cfg.seed = seed;

    if (active == simulate) return cmd_simulate(cfg, out_dir);
    if (active == spectrum_cmd) return cmd_spectrum(cfg, out_dir);
    if (active == kernel) return cmd_kernel(cfg, out_dir);
    if (active == verify) return cmd_verify(cfg, paired_path, out_dir);
    if (active == gaussian) return cmd_gaussian_fit(cfg, out_dir);
    if (active == semilinear_cmd) return cmd_semilinear(cfg, out_dir);
    if (active == check_matrix) return cmd_check_matrix(cfg, out_dir);
    std::cerr << "error: unknown subcommand\n";
    return 64;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return error_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 64;
  }
}
