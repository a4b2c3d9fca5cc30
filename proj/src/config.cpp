#include "netheat/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netheat/errors.hpp"
#include "netheat/graph.hpp"

namespace netheat {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void validation_fail(const std::string& key,
                                  const std::string& msg) {
  fail(ErrorCode::ValidationError, key + ": " + msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    parse_fail(line, "expected a number, got '" + tok + "'");
  }
}

long long parse_int(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    parse_fail(line, "expected an integer, got '" + tok + "'");
  }
}

std::uint64_t parse_uint(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    parse_fail(line, "expected a nonnegative integer, got '" + tok + "'");
  }
}

bool parse_bool(const std::string& tok, int line) {
  if (tok == "true" || tok == "1" || tok == "yes") return true;
  if (tok == "false" || tok == "0" || tok == "no") return false;
  parse_fail(line, "expected a boolean, got '" + tok + "'");
}

// Entries like 1.5, -2i, 1+2i, 3.0e-2-4e-3i, i.
std::complex<double> parse_complex(const std::string& tok, int line) {
  std::string s;
  for (char c : tok)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) parse_fail(line, "empty matrix entry");
  if (s.back() != 'i' && s.back() != 'I')
    return {parse_double(s, line), 0.0};
  s.pop_back();
  int cut = -1;
  for (int k = static_cast<int>(s.size()) - 1; k > 0; --k) {
    const char c = s[k];
    if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  std::string re = "0", im;
  if (cut < 0) {
    im = s;
  } else {
    re = s.substr(0, cut);
    im = s.substr(cut);
  }
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {parse_double(re, line), parse_double(im, line)};
}

const std::map<std::string, std::vector<std::string>>& section_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"network", {"edges", "vertices", "dirichlet", "merge_boundary"}},
      {"coefficients", {"c"}},  // plus c_edge<j>
      {"coupling", {"B", "kirchhoff_full"}},
      {"mesh", {"elements_per_edge"}},
      {"run",
       {"t_end", "dt", "seed", "tolerance", "times", "initial",
        "eigenvalues", "quantile"}},
      {"semilinear", {"psi"}},
  };
  return keys;
}

bool key_allowed(const std::string& section, const std::string& key) {
  const auto& keys = section_keys();
  const auto it = keys.find(section);
  if (it == keys.end()) return false;
  for (const auto& k : it->second)
    if (k == key) return true;
  return section == "coefficients" && key.rfind("c_edge", 0) == 0;
}

EdgeFlux parse_flux_spec(const std::string& spec) {
  const std::vector<std::string> tok = tokens(spec);
  if (tok.empty()) validation_fail("semilinear.psi", "empty flux entry");
  if (tok[0] == "zero") {
    if (tok.size() != 1)
      validation_fail("semilinear.psi", "'zero' takes no argument");
    return EdgeFlux::zero();
  }
  if (tok[0] == "quadratic" || tok[0] == "cubic") {
    if (tok.size() != 2)
      validation_fail("semilinear.psi",
                      "'" + tok[0] + "' takes one coefficient");
    const double a = parse_double(tok[1], 0);
    return tok[0] == "quadratic" ? EdgeFlux::quadratic(a)
                                 : EdgeFlux::cubic(a);
  }
  if (tok[0] == "table") {
    if (tok.size() != 2)
      validation_fail("semilinear.psi", "'table' takes one file path");
    std::ifstream in(tok[1]);
    if (!in)
      validation_fail("semilinear.psi",
                      "cannot read table file '" + tok[1] + "'");
    std::vector<double> xs, ys;
    std::string row;
    int rowno = 0;
    while (std::getline(in, row)) {
      ++rowno;
      const std::string t = trim(row);
      if (t.empty() || t[0] == '#') continue;
      const std::vector<std::string> cols = tokens(t);
      if (cols.size() != 2)
        validation_fail("semilinear.psi", "table row " +
                                              std::to_string(rowno) +
                                              " needs two columns");
      xs.push_back(parse_double(cols[0], rowno));
      ys.push_back(parse_double(cols[1], rowno));
    }
    try {
      return EdgeFlux::table(std::move(xs), std::move(ys));
    } catch (const Error& e) {
      validation_fail("semilinear.psi", e.what());
    }
  }
  validation_fail("semilinear.psi", "unknown flux kind '" + tok[0] + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int lineno = 0;
  std::string raw;
  std::istringstream in(text);
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        parse_fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section_keys().find(section) == section_keys().end())
        parse_fail(lineno, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      parse_fail(lineno, "expected 'key = value'");
    if (section.empty()) parse_fail(lineno, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key_allowed(section, key))
      parse_fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    const std::string path = section + "." + key;
    if (entries.count(path))
      parse_fail(lineno, "duplicate key '" + path + "'");
    entries[path] = Entry{value, lineno};
  }

  const auto get = [&](const std::string& path) -> const Entry* {
    const auto it = entries.find(path);
    return it == entries.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  if (const Entry* e = get("coupling.kirchhoff_full"))
    cfg.kirchhoff_full = parse_bool(e->value, e->line);

  // [network]
  std::vector<Edge> edges;
  if (const Entry* e = get("network.edges")) {
    for (const std::string& pair : split(e->value, ';')) {
      const std::vector<std::string> tok = tokens(pair);
      if (tok.size() != 2)
        parse_fail(e->line, "edge '" + pair + "' needs two vertex indices");
      edges.push_back(Edge{static_cast<int>(parse_int(tok[0], e->line)),
                           static_cast<int>(parse_int(tok[1], e->line))});
    }
    if (edges.empty())
      validation_fail("network.edges", "at least one edge required");
    int n = 0;
    for (const Edge& ed : edges)
      n = std::max(n, std::max(ed.tail, ed.head) + 1);
    if (const Entry* v = get("network.vertices")) {
      const int given = static_cast<int>(parse_int(v->value, v->line));
      if (given < n)
        validation_fail("network.vertices",
                        "smaller than the largest edge endpoint + 1");
      n = given;
    }
    try {
      if (const Entry* m = get("network.merge_boundary")) {
        if (get("network.dirichlet"))
          validation_fail("network.dirichlet",
                          "not allowed together with merge_boundary (the "
                          "fused vertex becomes the absorbing one)");
        std::vector<int> merge;
        for (const std::string& t : tokens(m->value))
          merge.push_back(static_cast<int>(parse_int(t, m->line)));
        if (merge.empty())
          validation_fail("network.merge_boundary", "empty vertex list");
        const Network base = build_network(n, edges, merge.front());
        cfg.net = merge_boundary_vertices(base, merge);
      } else {
        int dirichlet = n - 1;
        if (const Entry* d = get("network.dirichlet"))
          dirichlet = static_cast<int>(parse_int(d->value, d->line));
        cfg.net = build_network(n, edges, dirichlet);
      }
    } catch (const Error& e2) {
      if (e2.code() == ErrorCode::ValidationError) throw;
      validation_fail("network", e2.what());
    }
    cfg.has_network = true;
  }

  const int edge_count = cfg.has_network ? cfg.net.edge_count() : 0;

  // [coefficients]
  if (cfg.has_network) {
    cfg.coefficients = CoefficientProfile::constant(edge_count, 1.0);
    if (const Entry* e = get("coefficients.c")) {
      std::vector<double> vals;
      for (const std::string& t : split(e->value, ','))
        vals.push_back(parse_double(t, e->line));
      if (vals.size() == 1) {
        cfg.coefficients = CoefficientProfile::constant(edge_count, vals[0]);
      } else if (static_cast<int>(vals.size()) == edge_count) {
        for (int j = 0; j < edge_count; ++j)
          cfg.coefficients.edge[j] = EdgeCoefficient::constant(vals[j]);
      } else {
        validation_fail("coefficients.c",
                        "expected 1 or " + std::to_string(edge_count) +
                            " values, got " + std::to_string(vals.size()));
      }
    }
    for (const auto& [path, entry] : entries) {
      if (path.rfind("coefficients.c_edge", 0) != 0) continue;
      const std::string idx = path.substr(std::string("coefficients.c_edge").size());
      const long long j = parse_int(idx, entry.line);
      if (j < 0 || j >= edge_count)
        validation_fail(path, "edge index out of range");
      std::vector<double> samples;
      for (const std::string& t : tokens(entry.value))
        samples.push_back(parse_double(t, entry.line));
      if (samples.size() < 2)
        validation_fail(path, "need at least two samples");
      cfg.coefficients.edge[static_cast<int>(j)] =
          EdgeCoefficient::sampled(std::move(samples));
    }
    for (int j = 0; j < edge_count; ++j) {
      try {
        cfg.coefficients.edge[j].validate();
      } catch (const Error& e2) {
        validation_fail("coefficients (edge " + std::to_string(j) + ")",
                        e2.what());
      }
    }
  }

  // [coupling]
  if (const Entry* e = get("coupling.B")) {
    const std::vector<std::string> rows = split(e->value, ';');
    const Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd b(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const std::vector<std::string> cols = split(rows[i], ',');
      if (static_cast<Eigen::Index>(cols.size()) != dim)
        validation_fail("coupling.B",
                        "row " + std::to_string(i) + " has " +
                            std::to_string(cols.size()) + " entries, expected " +
                            std::to_string(dim) + " (square matrix)");
      for (Eigen::Index h = 0; h < dim; ++h)
        b(i, h) = parse_complex(cols[h], e->line);
    }
    cfg.coupling = CouplingMatrix(b);
  }
  if (cfg.has_network) {
    const Eigen::Index expected =
        cfg.kirchhoff_full ? cfg.net.vertex_count : cfg.net.vertex_count - 1;
    if (!get("coupling.B")) {
      cfg.coupling = CouplingMatrix(Eigen::MatrixXcd::Zero(expected, expected));
    } else if (cfg.coupling.dim() != expected) {
      validation_fail("coupling.B",
                      "expected " + std::to_string(expected) + " x " +
                          std::to_string(expected) + " for this network, got " +
                          std::to_string(cfg.coupling.dim()) + " x " +
                          std::to_string(cfg.coupling.dim()));
    }
  }

  // [mesh]
  if (cfg.has_network) {
    cfg.mesh = Mesh::uniform(edge_count, 16);
    if (const Entry* e = get("mesh.elements_per_edge")) {
      std::vector<int> vals;
      for (const std::string& t : split(e->value, ','))
        vals.push_back(static_cast<int>(parse_int(t, e->line)));
      if (vals.size() == 1) {
        cfg.mesh = Mesh::uniform(edge_count, vals[0]);
      } else if (static_cast<int>(vals.size()) == edge_count) {
        cfg.mesh.elements_per_edge = vals;
      } else {
        validation_fail("mesh.elements_per_edge",
                        "expected 1 or " + std::to_string(edge_count) +
                            " values, got " + std::to_string(vals.size()));
      }
      for (int v : vals)
        if (v < 1)
          validation_fail("mesh.elements_per_edge",
                          "element counts must be >= 1");
    }
  }

  // [run]
  if (const Entry* e = get("run.t_end")) cfg.t_end = parse_double(e->value, e->line);
  if (const Entry* e = get("run.dt")) cfg.dt = parse_double(e->value, e->line);
  if (const Entry* e = get("run.seed")) cfg.seed = parse_uint(e->value, e->line);
  if (const Entry* e = get("run.tolerance"))
    cfg.tolerance = parse_double(e->value, e->line);
  if (const Entry* e = get("run.eigenvalues"))
    cfg.eigenvalues = static_cast<int>(parse_int(e->value, e->line));
  if (const Entry* e = get("run.quantile"))
    cfg.quantile = parse_double(e->value, e->line);
  if (const Entry* e = get("run.times")) {
    for (const std::string& t : split(e->value, ','))
      cfg.times.push_back(parse_double(t, e->line));
  }
  if (const Entry* e = get("run.initial")) cfg.initial = trim(e->value);

  if (cfg.t_end < 0.0) validation_fail("run.t_end", "must be nonnegative");
  if (!(cfg.dt > 0.0)) validation_fail("run.dt", "must be positive");
  if (!(cfg.tolerance > 0.0)) validation_fail("run.tolerance", "must be positive");
  if (cfg.eigenvalues < 1) validation_fail("run.eigenvalues", "must be >= 1");
  if (!(cfg.quantile > 0.0) || cfg.quantile > 1.0)
    validation_fail("run.quantile", "must lie in (0, 1]");
  for (double t : cfg.times)
    if (!(t > 0.0)) validation_fail("run.times", "times must be positive");
  {
    const std::vector<std::string> tok = tokens(cfg.initial);
    const bool ok =
        !tok.empty() &&
        ((tok[0] == "hat" && tok.size() <= 2) ||
         ((tok[0] == "ones" || tok[0] == "random") && tok.size() == 1));
    if (!ok)
      validation_fail("run.initial",
                      "expected 'hat [vertex]', 'ones' or 'random'");
    if (tok.size() == 2) parse_int(tok[1], 0);
  }

  // [semilinear]
  if (const Entry* e = get("semilinear.psi")) {
    if (!cfg.has_network)
      validation_fail("semilinear.psi", "requires a network section");
    const std::vector<std::string> specs = split(e->value, ';');
    NonlinearFlux flux;
    if (specs.size() == 1) {
      flux.edge.assign(edge_count, parse_flux_spec(specs[0]));
    } else if (static_cast<int>(specs.size()) == edge_count) {
      for (const std::string& s : specs)
        flux.edge.push_back(parse_flux_spec(s));
    } else {
      validation_fail("semilinear.psi",
                      "expected 1 or " + std::to_string(edge_count) +
                          " flux entries, got " + std::to_string(specs.size()));
    }
    cfg.flux = std::move(flux);
  }

  return cfg;
}

DiscreteOperator build_operator(const RunConfig& cfg) {
  if (!cfg.has_network)
    validation_fail("network", "section required for this command");
  return assemble(cfg.net, cfg.coefficients, cfg.coupling, cfg.mesh,
                  cfg.dirichlet_enforced());
}

Eigen::VectorXcd initial_state(const RunConfig& cfg,
                               const DiscreteOperator& op) {
  const std::vector<std::string> tok = tokens(cfg.initial);
  if (tok[0] == "ones") return Eigen::VectorXcd::Ones(op.dof());
  if (tok[0] == "random") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd v(op.dof());
    for (int i = 0; i < op.dof(); ++i) v(i) = u(rng);
    return v;
  }
  int vertex = -1;
  if (tok.size() == 2) {
    vertex = static_cast<int>(parse_int(tok[1], 0));
    if (vertex < 0 || vertex >= op.net.vertex_count ||
        op.dofs.vertex[vertex] < 0)
      validation_fail("run.initial",
                      "vertex " + std::to_string(vertex) +
                          " carries no unknown");
  } else {
    for (int v = 0; v < op.net.vertex_count && vertex < 0; ++v)
      if (op.dofs.vertex[v] >= 0) vertex = v;
    if (vertex < 0)
      validation_fail("run.initial", "no vertex carries an unknown");
  }
  Eigen::VectorXcd hat = Eigen::VectorXcd::Zero(op.dof());
  hat(op.dofs.vertex[vertex]) = 1.0;
  return hat;
}

}  // namespace netheat
