#include <complex>
#include <fstream>
#include <string>

#include <Eigen/Dense>

#include "common.hpp"
#include "netheat/config.hpp"

using namespace netheat;
using Cd = std::complex<double>;

TEST_CASE("minimal single-edge config") {
  const RunConfig cfg = parse_config(
      "[network]\n"
      "edges = 0 1\n"
      "dirichlet = 1\n");
  REQUIRE(cfg.has_network);
  CHECK(cfg.net.vertex_count == 2);
  CHECK(cfg.net.dirichlet_vertex == 1);
  CHECK_FALSE(cfg.kirchhoff_full);
  CHECK(cfg.coupling.dim() == 1);
  CHECK(cfg.coupling.entries(0, 0) == Cd(0.0, 0.0));
  CHECK(cfg.mesh.elements_per_edge == std::vector<int>{16});
  CHECK(cfg.t_end == doctest::Approx(1.0));
  CHECK(cfg.dt == doctest::Approx(0.01));
  CHECK(cfg.seed == 0);
  CHECK(cfg.initial == "hat");
  CHECK_FALSE(cfg.flux.has_value());

  const DiscreteOperator op = build_operator(cfg);
  CHECK(op.dof() == 16);
}

TEST_CASE("default absorbing vertex is the last one") {
  const RunConfig cfg = parse_config(
      "[network]\n"
      "edges = 0 1; 1 2\n");
  CHECK(cfg.net.dirichlet_vertex == 2);
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
  const RunConfig cfg = parse_config(
      "# heat run\n"
      "\n"
      "[network]\n"
      "edges = 0 1 ; 1 2   # a path\n"
      "vertices = 3\n"
      "dirichlet = 2\n"
      "\n"
      "[run]\n"
      "t_end = 2.5\n");
  CHECK(cfg.net.vertex_count == 3);
  CHECK(cfg.t_end == doctest::Approx(2.5));
}

TEST_CASE("an isolated vertex is rejected at parse time") {
  try {
    parse_config("[network]\nedges = 0 1\nvertices = 3\ndirichlet = 2\n");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("network") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry line numbers") {
  const auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return std::string(e.what());
    }
    FAIL("expected ParseError");
    return std::string();
  };
  CHECK(message_of("[network]\nedges = 0 1\nbogus_key = 2\n")
            .find("line 3") != std::string::npos);
  CHECK(message_of("edges = 0 1\n").find("line 1") != std::string::npos);
  CHECK(message_of("[network\n").find("line 1") != std::string::npos);
  CHECK(message_of("[nonsense]\n").find("line 1") != std::string::npos);
  CHECK(message_of("[network]\nedges 0 1\n").find("line 2") !=
        std::string::npos);
  CHECK(message_of("[network]\nedges = 0 1\nedges = 1 2\n")
            .find("line 3") != std::string::npos);
  CHECK(message_of("[run]\ndt = fast\n").find("line 2") !=
        std::string::npos);
}

TEST_CASE("coupling dimension is validated against the network") {
  const std::string base =
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "dirichlet = 2\n"
      "[coupling]\n";
  try {
    parse_config(base + "B = -1\n");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("coupling.B") != std::string::npos);
  }
  // 2x2 is right for the two free vertices; 3x3 once every vertex couples.
  CHECK(parse_config(base + "B = -1, 0; 0, -1\n").coupling.dim() == 2);
  CHECK(parse_config(base + "kirchhoff_full = true\nB = -1, 0, 0; 0, -1, 0; 0, 0, -1\n")
            .coupling.dim() == 3);
  CHECK_FAILS(ValidationError, parse_config(base + "B = -1, 0; 0\n"));
}

TEST_CASE("complex matrix entries") {
  const RunConfig cfg = parse_config(
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "dirichlet = 2\n"
      "[coupling]\n"
      "B = 1+2i, -i; 3.5, 1e-3i\n");
  const Eigen::MatrixXcd& b = cfg.coupling.entries;
  CHECK(b(0, 0) == Cd(1.0, 2.0));
  CHECK(b(0, 1) == Cd(0.0, -1.0));
  CHECK(b(1, 0) == Cd(3.5, 0.0));
  CHECK(b(1, 1) == Cd(0.0, 1e-3));
}

TEST_CASE("coefficient profiles") {
  const std::string base =
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "dirichlet = 2\n"
      "[coefficients]\n";
  const RunConfig per_edge = parse_config(base + "c = 2, 3\n");
  CHECK(per_edge.coefficients.edge[0].value == doctest::Approx(2.0));
  CHECK(per_edge.coefficients.edge[1].value == doctest::Approx(3.0));

  const RunConfig sampled = parse_config(base + "c_edge1 = 1 2 4\n");
  CHECK(sampled.coefficients.edge[0].is_constant);
  CHECK_FALSE(sampled.coefficients.edge[1].is_constant);
  CHECK(sampled.coefficients.edge[1].eval(0.5) == doctest::Approx(2.0));

  CHECK_FAILS(ValidationError, parse_config(base + "c = 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "c = 1, 2, 3\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "c_edge7 = 1 2\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "c_edge0 = 1\n"));
}

TEST_CASE("mesh lists") {
  const std::string base =
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "[mesh]\n";
  CHECK(parse_config(base + "elements_per_edge = 8\n")
            .mesh.elements_per_edge == std::vector<int>{8, 8});
  CHECK(parse_config(base + "elements_per_edge = 8, 12\n")
            .mesh.elements_per_edge == std::vector<int>{8, 12});
  CHECK_FAILS(ValidationError,
              parse_config(base + "elements_per_edge = 8, 12, 16\n"));
  CHECK_FAILS(ValidationError,
              parse_config(base + "elements_per_edge = 0\n"));
}

TEST_CASE("boundary merging") {
  const RunConfig cfg = parse_config(
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "merge_boundary = 0 2\n");
  CHECK(cfg.net.vertex_count == 2);
  CHECK(cfg.net.dirichlet_vertex == 1);
  CHECK(cfg.net.edge_count() == 2);

  CHECK_FAILS(ValidationError, parse_config(
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "dirichlet = 2\n"
      "merge_boundary = 0 2\n"));
  CHECK_FAILS(ValidationError, parse_config(
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "merge_boundary = 1\n"));
}

TEST_CASE("run section validation") {
  const std::string base = "[network]\nedges = 0 1\n[run]\n";
  CHECK_FAILS(ValidationError, parse_config(base + "dt = 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "t_end = -1\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "tolerance = 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "eigenvalues = 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "quantile = 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "quantile = 1.5\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "times = 0.1, 0\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "initial = spike\n"));
  const RunConfig cfg =
      parse_config(base + "times = 0.1, 0.5\nseed = 42\nquantile = 0.9\n");
  CHECK(cfg.times == std::vector<double>{0.1, 0.5});
  CHECK(cfg.seed == 42);
}

TEST_CASE("initial states") {
  const std::string base =
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "dirichlet = 2\n"
      "[mesh]\n"
      "elements_per_edge = 4\n"
      "[run]\n";
  const RunConfig hat_cfg = parse_config(base + "initial = hat 1\n");
  const DiscreteOperator op = build_operator(hat_cfg);
  const Eigen::VectorXcd hat = initial_state(hat_cfg, op);
  CHECK(hat(op.dofs.vertex[1]) == Cd(1.0, 0.0));
  CHECK(hat.cwiseAbs().sum() == doctest::Approx(1.0));

  const RunConfig default_hat = parse_config(base + "initial = hat\n");
  CHECK(initial_state(default_hat, op)(op.dofs.vertex[0]) == Cd(1.0, 0.0));

  const RunConfig ones = parse_config(base + "initial = ones\n");
  CHECK(initial_state(ones, op).cwiseAbs().minCoeff() ==
        doctest::Approx(1.0));

  const RunConfig rnd = parse_config(base + "initial = random\nseed = 3\n");
  const Eigen::VectorXcd r1 = initial_state(rnd, op);
  const Eigen::VectorXcd r2 = initial_state(rnd, op);
  CHECK((r1 - r2).norm() == 0.0);
  CHECK(r1.cwiseAbs().maxCoeff() <= 1.0);

  CHECK_FAILS(ValidationError,
              initial_state(parse_config(base + "initial = hat 2\n"), op));
  CHECK_FAILS(ValidationError,
              initial_state(parse_config(base + "initial = hat 9\n"), op));
}

TEST_CASE("semilinear flux section") {
  const std::string base =
      "[network]\n"
      "edges = 0 1; 1 2\n"
      "[semilinear]\n";
  const RunConfig one = parse_config(base + "psi = quadratic 0.5\n");
  REQUIRE(one.flux.has_value());
  REQUIRE(one.flux->edge.size() == 2);
  CHECK(one.flux->edge[1].eval(2.0) == doctest::Approx(2.0));

  const RunConfig two = parse_config(base + "psi = zero; cubic -1\n");
  CHECK(two.flux->edge[0].eval(5.0) == doctest::Approx(0.0));
  CHECK(two.flux->edge[1].eval(2.0) == doctest::Approx(-8.0));

  CHECK_FAILS(ValidationError,
              parse_config(base + "psi = zero; zero; zero\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "psi = warp 2\n"));
  CHECK_FAILS(ValidationError, parse_config(base + "psi = quadratic\n"));
  CHECK_FAILS(ValidationError,
              parse_config(base + "psi = table /no/such/file.tbl\n"));
  CHECK_FAILS(ValidationError,
              parse_config("[semilinear]\npsi = zero\n"));
}

TEST_CASE("tabulated flux from a file") {
  const std::string path = "flux_table_test.tmp";
  {
    std::ofstream out(path);
    out << "# s psi\n-1 0\n0 1\n2 5\n";
  }
  const RunConfig cfg = parse_config(
      "[network]\nedges = 0 1\n[semilinear]\npsi = table " + path + "\n");
  CHECK(cfg.flux->edge[0].eval(1.0) == doctest::Approx(3.0));
  std::remove(path.c_str());
}

TEST_CASE("operators need a network") {
  const RunConfig cfg = parse_config("[run]\nt_end = 1\n");
  CHECK_FALSE(cfg.has_network);
  CHECK_FAILS(ValidationError, build_operator(cfg));
}
