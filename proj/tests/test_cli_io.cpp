#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "shellred/run_config.hpp"
#include "support.hpp"

using namespace shellred;
namespace fs = std::filesystem;

namespace {

std::string config_file(const char* name) { return std::string(SHELLRED_CONFIG_DIR) + "/" + name; }

struct Run {
  int rc = 0;
  std::string out, err;
};

Run run(const std::string& cmd, CommandOptions opt) {
  std::ostringstream out, err;
  Run r;
  r.rc = run_command(cmd, opt, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CommandOptions with(const std::string& cfg, std::vector<std::string> overrides = {}) {
  CommandOptions o;
  o.config_path = cfg;
  o.overrides = std::move(overrides);
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("shellred_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("CSV quoting and round trip") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CsvTable t({"name", "value"});
  t.add_row({"x,y", "1"});
  t.add_row({"q\"uote", "line\r\nbreak"});
  t.add_row({"", "3"});
  std::string s = t.str();
  CHECK(s.rfind("name,value\r\n", 0) == 0);
  auto rows = parse_csv(s);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][0] == "x,y");
  CHECK(rows[2][0] == "q\"uote");
  CHECK(rows[2][1] == "line\r\nbreak");
  CHECK(rows[3][0] == "");
  CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(fmt_num(x)) == x);
  CHECK(fmt_num(kInf) == "inf");
  CHECK(fmt_num(-kInf) == "-inf");
  CHECK(fmt_num(std::nan("")) == "nan");
}

TEST_CASE("config parsing") {
  Config c = Config::parse("# comment\nmodel = 2\n[material]\nmu = 1.5  # trailing\nlambda=2\n[solver]\nforce = true\n");
  CHECK(c.get("model", "") == "2");
  CHECK(c.num("material.mu", 0) == 1.5);
  CHECK(c.num("material.lambda", 0) == 2);
  CHECK(c.flag("solver.force", false));
  CHECK(c.integer("grid.n1", 17) == 17);
  CHECK(c.section("material").size() == 2);
  CHECK_THROWS_AS(c.require("missing"), ShellError);
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ShellError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ShellError);
  CHECK_THROWS_AS(Config::parse("[open\n"), ShellError);
  CHECK_THROWS_AS(Config::parse("x = abc\n").num("x", 0), ShellError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ShellError);
}

TEST_CASE("run configuration") {
  RunConfig rc = RunConfig::from(Config::load(config_file("cylinder.cfg")));
  CHECK(rc.model == Model::II);
  CHECK(rc.mat.lambda == 2.0);
  CHECK(rc.bc.is_clamped(Edge::Left));
  CHECK_FALSE(rc.bc.is_clamped(Edge::Top));
  CHECK_NOTHROW(rc.validate());
  CHECK(parse_vec3("1 2 3") == Vec3(1, 2, 3));
  CHECK(parse_vec3("1, 2, 3") == Vec3(1, 2, 3));
  CHECK_THROWS_AS(parse_vec3("1 2"), ShellError);
  Profile p = parse_profile("0 0 1; 1 0 0", "body");
  CHECK(p.at(2.0) == Vec3(2, 0, 1));
  CHECK(parse_model("3") == Model::III);
  CHECK_THROWS_AS(parse_model("4"), ShellError);
  CHECK(parse_constants("paper") == ConstantsMode::Paper);
  CHECK(parse_list("0.1, 0.05", "h") == std::vector<double>{0.1, 0.05});
  Config bad = Config::load(config_file("plate.cfg"));
  bad.set("grid.n1", "8");
  CHECK_THROWS_AS(RunConfig::from(bad).validate(), ShellError);
  bad = Config::load(config_file("plate.cfg"));
  bad.set("bogus.key", "1");
  CHECK_THROWS_AS(RunConfig::from(bad), ShellError);
}

TEST_CASE("VTK round trip is exact") {
  TempDir d("vtk");
  VtkSurface s;
  s.n1 = 3;
  s.n2 = 2;
  for (int k = 0; k < 6; ++k) s.points.push_back(Vec3(0.1 * k, 1.0 / 3.0 * k, -1e-17 * k));
  s.scalars.push_back({"density", {0, 1e-300, 2.5, 1.0 / 7.0, -3, 4}});
  write_vtk(d / "s.vtk", s);
  std::string text = slurp(d / "s.vtk");
  CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(text.find("DATASET STRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("DIMENSIONS 3 2 1") != std::string::npos);
  VtkSurface b = read_vtk(d / "s.vtk");
  CHECK(b.n1 == 3);
  CHECK(b.n2 == 2);
  CHECK(b.points == s.points);
  REQUIRE(b.scalars.size() == 1);
  CHECK(b.scalars[0].first == "density");
  CHECK(b.scalars[0].second == s.scalars[0].second);
  CHECK_THROWS_AS(read_vtk(d / "missing.vtk"), ShellError);
  s.n1 = 4;
  CHECK_THROWS_AS(write_vtk(d / "bad.vtk", s), ShellError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::Config) == 1);
  CHECK(exit_code(ErrorKind::GridTooSmall) == 1);
  CHECK(exit_code(ErrorKind::InadmissibleThickness) == 2);
  CHECK(exit_code(ErrorKind::OrientationViolation) == 3);
  CHECK(exit_code(ErrorKind::NonPositiveDeterminant) == 3);
  CHECK(run("frobnicate", with(config_file("plate.cfg"))).rc == 1);
  CHECK(run("check", with("/nonexistent.cfg")).rc == 1);
  CHECK(run("check", with(config_file("plate.cfg"), {"grid.n1=4"})).rc == 1);
  CHECK(run("check", with(config_file("plate.cfg"), {"no-equals"})).rc == 1);
}

TEST_CASE("check command") {
  for (const char* h : {"0.01", "1", "100"}) {
    Run r = run("check", with(config_file("plate.cfg"), {std::string("material.h=") + h}));
    CHECK(r.rc == 0);
    CHECK(r.out.find("Model I: PASS") != std::string::npos);
  }
  Run ok = run("check", with(config_file("sphere_cap.cfg")));
  CHECK(ok.rc == 0);
  Run thick = run("check", with(config_file("sphere_cap.cfg"), {"material.h=2.5"}));
  CHECK(thick.rc == 2);
  CHECK(thick.out.find("FAIL") != std::string::npos);
  TempDir d("check");
  CommandOptions o = with(config_file("sphere_cap.cfg"));
  o.out_dir = d.path.string();
  CHECK(run("check", o).rc == 0);
  CHECK(fs::exists(d / "check.csv"));
  CHECK(fs::exists(d / "check.txt"));
}

TEST_CASE("energy command") {
  Run r = run("energy", with(config_file("sphere_cap.cfg")));
  CHECK(r.rc == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"term", "value"});
  CHECK(rows[8][0] == "total");
  CHECK(std::abs(std::stod(rows[8][1])) < 1e-10);

  // an inverted patch fails with an orientation error
  TempDir d("energy");
  RunConfig rc = RunConfig::from(Config::load(config_file("plate.cfg")));
  SurfaceChart c = make_chart(rc.chart);
  Grid g = chart_grid(c, rc.n1, rc.n2);
  VtkSurface s;
  s.n1 = g.n1;
  s.n2 = g.n2;
  s.points = sample_nodes(c, g);
  for (int j = 10; j < 20; ++j)
    for (int i = 10; i < 20; ++i) s.points[g.idx(i, j)].x() *= -1;
  write_vtk(d / "bad.vtk", s);
  CommandOptions o = with(config_file("plate.cfg"));
  o.deformation = d / "bad.vtk";
  Run bad = run("energy", o);
  CHECK(bad.rc == 3);
  CHECK(bad.err.find("OrientationViolation") != std::string::npos);

  s.n1 = 5;
  s.n2 = 5;
  s.points.resize(25);
  write_vtk(d / "small.vtk", s);
  o.deformation = d / "small.vtk";
  CHECK(run("energy", o).rc == 1);
}

TEST_CASE("loads-reduce and compare3d commands") {
  Run l = run("loads-reduce", with(config_file("cylinder.cfg")));
  CHECK(l.rc == 0);
  auto rows = parse_csv(l.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"quantity", "x", "y", "z"});
  CHECK(rows[1][0] == "f_bar");

  CommandOptions o = with(config_file("sphere_cap.cfg"), {"grid.n1=17", "grid.n2=17"});
  Run c = run("compare3d", o);
  CHECK(c.rc == 0);
  auto cr = parse_csv(c.out);
  REQUIRE(cr.size() == 13);
  CHECK(cr[0] == std::vector<std::string>{"h", "model", "E_reduced", "E_3d", "abs_err", "fitted_order"});
}

TEST_CASE("minimize command writes its outputs and is independent of the thread count") {
  TempDir d1("min1"), d2("min2");
  std::vector<std::string> small{"grid.n1=13", "grid.n2=13"};
  CommandOptions a = with(config_file("plate.cfg"), small), b = a;
  a.out_dir = d1.path.string();
  a.threads = 1;
  b.out_dir = d2.path.string();
  b.threads = 2;
  Run ra = run("minimize", a), rb = run("minimize", b);
  CHECK(ra.rc == 0);
  CHECK(rb.rc == 0);
  for (const char* f : {"trace.csv", "solution.vtk"}) {
    CHECK(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  auto trace = parse_csv(slurp(d1 / "trace.csv"));
  CHECK(trace[0][0] == "iter");
  CHECK(trace.size() > 2);
  VtkSurface sol = read_vtk(d1 / "solution.vtk");
  CHECK(sol.n1 == 13);

  CommandOptions thick = with(config_file("sphere_cap.cfg"), {"material.h=0.9", "grid.n1=13", "grid.n2=13"});
  thick.out_dir = d1.path.string();
  Run t = run("minimize", thick);
  CHECK(t.rc == 2);
  thick.force = true;
  thick.overrides.push_back("solver.max_iter=2");
  CHECK(run("minimize", thick).rc == 0);
  set_threads(max_threads());
}
