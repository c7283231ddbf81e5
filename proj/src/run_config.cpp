#include "shellred/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "shellred/compare.hpp"

namespace shellred {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  std::string t = trim(s);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ShellError(ErrorKind::Config, key + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

Vec3 parse_vec3(const std::string& s, const std::string& key) {
  std::vector<std::string> p = split(s, " \t,");
  if (p.size() != 3) throw ShellError(ErrorKind::Config, key + ": expected three components, got '" + s + "'");
  return Vec3(to_double(p[0], key), to_double(p[1], key), to_double(p[2], key));
}

Profile parse_profile(const std::string& s, const std::string& key) {
  Profile p;
  for (const std::string& part : split(s, ";")) p.coeff.push_back(parse_vec3(part, key));
  return p;
}

Model parse_model(const std::string& s) {
  std::string t = trim(s);
  if (t == "1" || t == "I") return Model::I;
  if (t == "2" || t == "II") return Model::II;
  if (t == "3" || t == "III") return Model::III;
  throw ShellError(ErrorKind::Config, "model must be 1, 2 or 3, got '" + s + "'");
}

ConstantsMode parse_constants(const std::string& s) {
  std::string t = trim(s);
  if (t == "oracle" || t == "oracle-consistent") return ConstantsMode::Oracle;
  if (t == "paper" || t == "paper-literal") return ConstantsMode::Paper;
  throw ShellError(ErrorKind::Config, "constants must be oracle or paper, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> v;
  for (const std::string& p : split(s, " \t,")) v.push_back(to_double(p, key));
  return v;
}

namespace {

struct NodeRow {
  int i, j;
  Vec3 f, mom;
};

std::vector<NodeRow> read_node_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ShellError(ErrorKind::Config, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  auto rows = parse_csv(ss.str());
  if (rows.empty()) throw ShellError(ErrorKind::Config, path + ": empty table");
  std::vector<NodeRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5 && row.size() != 8)
      throw ShellError(ErrorKind::Config, path + ": rows need i,j,fx,fy,fz[,mx,my,mz]");
    std::array<double, 6> v{};
    for (std::size_t c = 2; c < row.size(); ++c) v[c - 2] = to_double(row[c], path);
    out.push_back({int(to_double(row[0], path)), int(to_double(row[1], path)), Vec3(v[0], v[1], v[2]),
                   Vec3(v[3], v[4], v[5])});
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from(const Config& c) {
  RunConfig r;
  r.chart.name = c.get("chart.name", "plate");
  r.chart.graph_kind = c.get("chart.kind", "poly");
  for (const auto& [k, v] : c.section("chart"))
    if (k != "name" && k != "kind") r.chart.params[k] = to_double(v, "chart." + k);

  r.n1 = c.integer("grid.n1", 33);
  r.n2 = c.integer("grid.n2", r.n1);
  r.fd_order = c.integer("grid.fd_order", 4);

  r.mat.mu = c.num("material.mu", 1.0);
  r.mat.lambda = c.num("material.lambda", 1.0);
  r.mat.h = c.num("material.h", 0.1);
  if (c.has("model")) r.model = parse_model(c.get("model", "1"));
  if (c.has("constants")) r.constants = parse_constants(c.get("constants", "oracle"));

  std::string lmode = c.get("load.mode", "reduce");
  if (lmode != "reduce" && lmode != "direct")
    throw ShellError(ErrorKind::Config, "load.mode must be reduce or direct");
  r.load.direct = lmode == "direct";
  if (c.has("load.body")) r.load.body = parse_profile(c.get("load.body", ""), "load.body");
  if (c.has("load.lateral")) r.load.lateral = parse_profile(c.get("load.lateral", ""), "load.lateral");
  if (c.has("load.t_plus")) r.load.t_plus = parse_vec3(c.get("load.t_plus", ""), "load.t_plus");
  if (c.has("load.t_minus")) r.load.t_minus = parse_vec3(c.get("load.t_minus", ""), "load.t_minus");
  if (c.has("load.f_bar")) r.load.f_bar = parse_vec3(c.get("load.f_bar", ""), "load.f_bar");
  if (c.has("load.f_mom")) r.load.f_mom = parse_vec3(c.get("load.f_mom", ""), "load.f_mom");
  if (c.has("load.t_bar")) r.load.t_bar = parse_vec3(c.get("load.t_bar", ""), "load.t_bar");
  if (c.has("load.t_mom")) r.load.t_mom = parse_vec3(c.get("load.t_mom", ""), "load.t_mom");
  r.load_gauss = c.integer("load.gauss", 16);
  if (c.has("load.nodes")) {
    const int n1 = r.n1, n2 = r.n2;
    r.load.node_f.assign(std::size_t(n1) * n2, Vec3::Zero());
    r.load.node_mom.assign(std::size_t(n1) * n2, Vec3::Zero());
    for (const NodeRow& nr : read_node_table(c.get("load.nodes", ""))) {
      if (nr.i < 0 || nr.i >= n1 || nr.j < 0 || nr.j >= n2)
        throw ShellError(ErrorKind::Config, "load.nodes: node outside the grid");
      r.load.node_f[nr.j * n1 + nr.i] += nr.f;
      r.load.node_mom[nr.j * n1 + nr.i] += nr.mom;
    }
  }

  std::string cl = c.get("boundary.clamped", "left,right,bottom,top");
  r.bc.clamped = {false, false, false, false};
  if (trim(cl) != "none")
    for (const std::string& e : split(cl, " \t,")) r.bc.clamped[int(parse_edge(e))] = true;
  std::string meas = c.get("boundary.measure", "surface");
  if (meas == "surface") r.bc.measure = EdgeMeasure::Surface;
  else if (meas == "parameter") r.bc.measure = EdgeMeasure::Parameter;
  else throw ShellError(ErrorKind::Config, "boundary.measure must be surface or parameter");

  SolverConfig& s = r.solver;
  s.max_iter = c.integer("solver.max_iter", s.max_iter);
  s.grad_tol = c.num("solver.grad_tol", s.grad_tol);
  s.c1 = c.num("solver.c1", s.c1);
  s.backtrack = c.num("solver.backtrack", s.backtrack);
  s.memory = c.integer("solver.memory", s.memory);
  s.beta = c.num("solver.beta", s.beta);
  std::string gm = c.get("solver.gradient", "ad");
  if (gm == "ad") s.gradient = GradientMode::AD;
  else if (gm == "fd") s.gradient = GradientMode::FiniteDifference;
  else throw ShellError(ErrorKind::Config, "solver.gradient must be ad or fd");
  s.fd_step = c.num("solver.fd_step", s.fd_step);
  s.eps_feas = c.num("solver.eps_feas", s.eps_feas);
  s.snapshot_every = c.integer("solver.snapshot_every", 0);
  s.precondition = c.flag("solver.precondition", s.precondition);
  s.precond_refresh = c.integer("solver.precond_refresh", s.precond_refresh);

  r.out_dir = c.get("output.dir", "");
  r.deformation = c.get("energy.deformation", "");
  if (c.has("compare.h")) r.compare_h = parse_list(c.get("compare.h", ""), "compare.h");
  r.compare_amplitude = c.num("compare.amplitude", r.compare_amplitude);

  static const char* sections[] = {"chart.", "grid.", "material.", "load.", "boundary.",
                                   "solver.", "output.", "energy.", "compare."};
  for (const auto& kv : c.all()) {
    const std::string& k = kv.first;
    bool ok = k == "model" || k == "constants";
    for (const char* p : sections) ok = ok || k.rfind(p, 0) == 0;
    if (!ok) throw ShellError(ErrorKind::Config, "unknown key '" + k + "'");
  }
  return r;
}

void RunConfig::validate() const {
  auto grid_ok = [](int n) { return n >= 9 && n % 2 == 1; };
  if (!grid_ok(n1) || !grid_ok(n2)) throw ShellError(ErrorKind::Config, "grid sizes must be odd and at least 9");
  if (fd_order != 0 && fd_order != 2 && fd_order != 4)
    throw ShellError(ErrorKind::Config, "grid.fd_order must be 0 (analytic), 2 or 4");
  shellred::validate(mat);
  if (load_gauss < 1) throw ShellError(ErrorKind::Config, "load.gauss must be positive");
  if (compare_h.empty()) throw ShellError(ErrorKind::Config, "compare.h must list at least one thickness");
  for (double h : compare_h)
    if (!(h > 0.0)) throw ShellError(ErrorKind::Config, "compare.h entries must be positive");
  SolverConfig s = solver;
  if (s.fd_order == 0) s.fd_order = 4;
  s.validate();
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InadmissibleThickness: return 2;
    case ErrorKind::OrientationViolation:
    case ErrorKind::NonPositiveDeterminant: return 3;
    default: return 1;
  }
}

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ShellError(ErrorKind::Config, "cannot write " + path);
  f << text;
}

struct Setup {
  RunConfig rc;
  SurfaceChart chart;
  Grid grid;
};

Setup setup(const CommandOptions& opt) {
  Config c = opt.config_path.empty() ? Config::parse("", "<defaults>") : Config::load(opt.config_path);
  for (const std::string& o : opt.overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ShellError(ErrorKind::Config, "override '" + o + "' is not key=value");
    c.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  Setup s;
  s.rc = RunConfig::from(c);
  if (opt.model) s.rc.model = *opt.model;
  if (opt.constants) s.rc.constants = *opt.constants;
  if (!opt.out_dir.empty()) s.rc.out_dir = opt.out_dir;
  if (!opt.deformation.empty()) s.rc.deformation = opt.deformation;
  s.rc.solver.model = s.rc.model;
  s.rc.solver.constants = s.rc.constants;
  s.rc.solver.force = opt.force;
  s.rc.solver.exec = Exec::Parallel;
  s.rc.solver.fd_order = s.rc.fd_order == 0 ? 4 : s.rc.fd_order;
  s.rc.validate();
  s.chart = make_chart(s.rc.chart);
  s.grid = chart_grid(s.chart, s.rc.n1, s.rc.n2);
  return s;
}

NodalLoad nodal_load(const Setup& s, const ReferenceField& ref) {
  LoadResultants res =
      reduce_loads(s.rc.load, s.rc.mat.h, ThicknessQuadrature::gauss(s.rc.load_gauss, s.rc.mat.h));
  return assemble_loads(res, s.rc.load, ref, s.rc.bc);
}

ShellProblem make_problem(const Setup& s) {
  ReferenceField ref = build_reference(s.chart, s.grid, s.rc.mat.h, s.rc.solver.fd_order);
  return ShellProblem(ref, s.rc.mat, s.rc.bc, nodal_load(s, ref), s.rc.solver);
}

VtkSurface displaced_surface(const Grid& g, const std::vector<Vec3>& m, const std::vector<Vec3>& y0) {
  std::vector<double> u(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) u[k] = (m[k] - y0[k]).norm();
  return VtkSurface{g.n1, g.n2, m, {{"displacement", u}}};
}

int cmd_check(const Setup& s, std::ostream& out) {
  // thresholds are properties of y0, so the exact chart derivatives are used
  ReferenceField ref = build_reference(s.chart, s.grid, s.rc.mat.h, 0);
  AdmissibilityReport rep = admissibility_report(ref, s.rc.mat.h, ConstantsMode::Oracle, Exec::Parallel);
  out << report_text(rep);
  bool pass = rep.model_pass(s.rc.model);
  out << "Model " << model_name(s.rc.model) << ": " << (pass ? "PASS" : "FAIL") << "\n";
  if (!s.rc.out_dir.empty()) {
    write_text(out_path(s.rc.out_dir, "check.csv"), report_csv(rep));
    write_text(out_path(s.rc.out_dir, "check.txt"), report_text(rep));
  }
  return pass ? 0 : 2;
}

int cmd_energy(const Setup& s, const CommandOptions& opt, std::ostream& out) {
  ShellProblem p = make_problem(s);
  std::vector<Vec3> m = p.reference_nodes();
  if (!s.rc.deformation.empty()) {
    VtkSurface v = read_vtk(s.rc.deformation);
    if (v.n1 != s.grid.n1 || v.n2 != s.grid.n2 || v.points.size() != m.size())
      throw ShellError(ErrorKind::Config, "deformation grid " + std::to_string(v.n1) + "x" + std::to_string(v.n2) +
                                              " does not match " + std::to_string(s.grid.n1) + "x" +
                                              std::to_string(s.grid.n2));
    m = v.points;
  }
  EnergyBreakdown b = p.breakdown(m, Exec::Parallel, opt.density);
  CsvTable t({"term", "value"});
  t.add_row({"shell", fmt_num(b.shell_term)});
  t.add_row({"curv_log", fmt_num(b.curv_log_term)});
  t.add_row({"curv_det2", fmt_num(b.curv_det2_term)});
  t.add_row({"constant", fmt_num(b.constant_term)});
  t.add_row({"internal", fmt_num(b.internal())});
  t.add_row({"penalty", fmt_num(b.penalty_term)});
  t.add_row({"load", fmt_num(b.load_term)});
  t.add_row({"total", fmt_num(b.total)});
  out << t.str();
  if (!s.rc.out_dir.empty()) {
    t.write(out_path(s.rc.out_dir, "energy.csv"));
    if (opt.density) {
      VtkSurface v{s.grid.n1, s.grid.n2, m, {{"energy_density", b.density}}};
      write_vtk(out_path(s.rc.out_dir, "energy_density.vtk"), v);
    }
  }
  return 0;
}

int cmd_compare3d(const Setup& s, std::ostream& out) {
  CompareOptions co;
  co.amplitude = s.rc.compare_amplitude;
  co.constants = s.rc.constants;
  co.fd_order = s.rc.solver.fd_order;
  CompareResult r = compare_3d(s.chart, s.grid.n1, s.grid.n2, s.rc.mat, s.rc.compare_h, co, Exec::Parallel);
  CsvTable t({"h", "model", "E_reduced", "E_3d", "abs_err", "fitted_order"});
  for (const CompareRow& row : r.rows)
    t.add_row({fmt_num(row.h), model_name(row.model), fmt_num(row.e_reduced), fmt_num(row.e_3d), fmt_num(row.abs_err),
               fmt_num(r.order[int(row.model) - 1])});
  CsvTable d({"h", "logdet_expansion_err", "fitted_order"});
  for (std::size_t k = 0; k < r.logdet_err.size(); ++k)
    d.add_row({fmt_num(s.rc.compare_h[k]), fmt_num(r.logdet_err[k]), fmt_num(r.logdet_order)});
  out << t.str();
  if (!s.rc.out_dir.empty()) {
    t.write(out_path(s.rc.out_dir, "compare3d.csv"));
    d.write(out_path(s.rc.out_dir, "compare3d_logdet.csv"));
  }
  return 0;
}

int cmd_minimize(const Setup& s, std::ostream& out, std::ostream& err) {
  const std::string dir = s.rc.out_dir.empty() ? "shellred_out" : s.rc.out_dir;
  ShellProblem p = make_problem(s);
  std::vector<Vec3> y0 = p.reference_nodes();
  SnapshotFn snap;
  if (s.rc.solver.snapshot_every > 0)
    snap = [&](int it, const std::vector<Vec3>& nodes) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%06d.vtk", it);
      write_vtk(out_path(dir, name), displaced_surface(s.grid, nodes, y0));
    };
  MinimizeResult r = minimize(p, y0, snap);
  for (const std::string& w : r.warnings) err << "warning: " << w << "\n";

  CsvTable tr({"iter", "energy", "grad_norm", "step", "min_am_ratio", "min_A"});
  for (const TraceRow& row : r.trace)
    tr.add_row({std::to_string(row.iter), fmt_num(row.energy), fmt_num(row.grad_norm), fmt_num(row.step),
                fmt_num(row.min_am_ratio), fmt_num(row.min_A)});
  tr.write(out_path(dir, "trace.csv"));
  EnergyBreakdown b = p.breakdown(r.nodes, Exec::Parallel, true);
  VtkSurface v = displaced_surface(s.grid, r.nodes, y0);
  v.scalars.push_back({"energy_density", b.density});
  write_vtk(out_path(dir, "solution.vtk"), v);

  out << "stop: " << stop_reason_name(r.reason) << " after " << r.iterations << " iterations\n";
  out << "energy: " << fmt_num(b.total) << " (internal " << fmt_num(b.internal()) << ", penalty "
      << fmt_num(b.penalty_term) << ", load " << fmt_num(b.load_term) << ")\n";
  out << "gradient norm: " << fmt_num(r.trace.back().grad_norm) << "\n";
  double umax = 0.0;
  for (double x : v.scalars[0].second) umax = std::max(umax, x);
  out << "max displacement: " << fmt_num(umax) << "\n";
  out << "wrote " << out_path(dir, "solution.vtk") << " and " << out_path(dir, "trace.csv") << "\n";
  return 0;
}

int cmd_loads(const Setup& s, std::ostream& out) {
  LoadResultants r =
      reduce_loads(s.rc.load, s.rc.mat.h, ThicknessQuadrature::gauss(s.rc.load_gauss, s.rc.mat.h));
  CsvTable t({"quantity", "x", "y", "z"});
  auto row = [&](const char* name, const Vec3& v) { t.add_row({name, fmt_num(v.x()), fmt_num(v.y()), fmt_num(v.z())}); };
  row("f_bar", r.f_bar);
  row("f_mom", r.f_mom);
  row("t_bar", r.t_bar);
  row("t_mom", r.t_mom);
  out << t.str();
  if (!s.rc.out_dir.empty()) t.write(out_path(s.rc.out_dir, "loads.csv"));
  return 0;
}

}  // namespace

int run_command(const std::string& cmd, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.threads < 0) throw ShellError(ErrorKind::Config, "--threads must be positive");
    if (opt.threads > 0) set_threads(opt.threads);
    Setup s = setup(opt);
    if (cmd == "check") return cmd_check(s, out);
    if (cmd == "energy") return cmd_energy(s, opt, out);
    if (cmd == "compare3d") return cmd_compare3d(s, out);
    if (cmd == "minimize") return cmd_minimize(s, out, err);
    if (cmd == "loads-reduce") return cmd_loads(s, out);
    throw ShellError(ErrorKind::Config, "unknown command '" + cmd + "'");
  } catch (const OrientationViolation& e) {
    err << e.what() << "\n  x' = (" << fmt_short(e.x1) << ", " << fmt_short(e.x2) << "), x3 = " << fmt_short(e.x3)
        << "\n";
    return exit_code(e.kind());
  } catch (const ShellError& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << e.what() << "\n";
    return 1;
  }
}

}  // namespace shellred
