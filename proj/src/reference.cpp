#include "shellred/reference.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace shellred {

void spd_sqrt2(const Mat2& m, Mat2& sqrt_m, Mat2& inv_sqrt_m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es;
  es.computeDirect(m);
  Eigen::Vector2d ev = es.eigenvalues();
  Mat2 V = es.eigenvectors();
  Eigen::Vector2d s(std::sqrt(ev(0)), std::sqrt(ev(1)));
  sqrt_m = V * s.asDiagonal() * V.transpose();
  inv_sqrt_m = V * s.cwiseInverse().asDiagonal() * V.transpose();
}

RefPoint make_ref_point(const Jetd& jet, double h) {
  FundamentalData f = fundamental_from_jet(jet);
  RefPoint r;
  r.y = jet.p;
  r.n = f.n;
  r.dy = f.dy;
  r.dn = f.dn;
  r.I = f.I;
  r.II = f.II;
  r.III = f.III;
  r.L = f.L;
  r.H = f.H;
  r.K = f.K;
  r.a = f.a;
  r.kappa1 = f.kappa1;
  r.kappa2 = f.kappa2;
  r.Iinv = inv2<double>(f.I);
  spd_sqrt2(f.I, r.I_sqrt, r.Iinv_sqrt);
  r.Am = 1.0 + h * r.H + 0.25 * h * h * r.K;
  r.Ap = 1.0 - h * r.H + 0.25 * h * h * r.K;
  r.C1_classic = r.L * r.Iinv + r.Iinv * r.L;
  r.C2_classic = r.L.transpose() * r.Iinv * r.L;
  Mat2 LIi = r.L * r.Iinv;
  r.C1_ansatz = LIi + LIi.transpose();
  r.C2_ansatz = LIi * r.L.transpose();
  return r;
}

void set_thickness(ReferenceField& ref, double h) {
  ref.h = h;
  for (RefPoint& r : ref.pts) {
    r.Am = 1.0 + h * r.H + 0.25 * h * h * r.K;
    r.Ap = 1.0 - h * r.H + 0.25 * h * h * r.K;
  }
  ref.thickness = check_thickness(ref, h);
}

ReferenceField build_reference(const Grid& g, const std::vector<Jetd>& jets, double h) {
  if (!(h > 0.0)) throw ShellError(ErrorKind::Config, "thickness must be positive");
  ReferenceField ref;
  ref.grid = g;
  ref.h = h;
  ref.jets = jets;
  ref.pts.resize(jets.size());
  for (std::size_t k = 0; k < jets.size(); ++k) ref.pts[k] = make_ref_point(jets[k], h);

  std::vector<double> w1 = simpson_weights(g.n1, g.dx1()), w2 = simpson_weights(g.n2, g.dx2());
  ref.w.resize(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) ref.w[g.idx(i, j)] = w1[i] * w2[j];

  double cmax = 0.0;
  ref.maxK = -std::numeric_limits<double>::infinity();
  ref.maxNegK = -std::numeric_limits<double>::infinity();
  for (const RefPoint& r : ref.pts) {
    Mat2 M = r.I_sqrt * r.L.transpose() * r.Iinv_sqrt;
    cmax = std::max(cmax, M.norm());
    ref.maxK = std::max(ref.maxK, r.K);
    ref.maxNegK = std::max(ref.maxNegK, -r.K);
    ref.maxAbsKappa = std::max({ref.maxAbsKappa, std::abs(r.kappa1), std::abs(r.kappa2)});
  }
  ref.C = 2.0 * cmax;
  ref.T_max = -std::numeric_limits<double>::infinity();
  for (RefPoint& r : ref.pts) {
    double s = std::abs(r.H) + ref.C / 4.0;
    r.T = r.K / 12.0 + s * s / 3.0;
    ref.T_max = std::max(ref.T_max, r.T);
  }
  ref.thickness = check_thickness(ref, h);
  return ref;
}

ReferenceField build_reference(const SurfaceChart& chart, const Grid& g, double h, int fd_order) {
  ReferenceField ref;
  if (fd_order == 0) {
    ref = build_reference(g, analytic_jets(chart, g), h);
  } else {
    ref = build_reference(g, finite_difference_derivatives(g, sample_nodes(chart, g), fd_order), h);
    ref.fd_order = fd_order;
  }
  ref.chart_name = chart.name;
  return ref;
}

ThicknessCheck check_thickness(const ReferenceField& ref, double h) {
  ThicknessCheck t;
  t.margin = h * ref.maxAbsKappa;
  t.pass = t.margin < 2.0;
  t.h_geom = ref.maxAbsKappa > 0.0 ? 2.0 / ref.maxAbsKappa : std::numeric_limits<double>::infinity();
  return t;
}

double F0(const Mat2& Q, const RefPoint& r) { return (Q.array() * r.Iinv.array()).sum(); }
double F1(const Mat2& Q, const RefPoint& r) { return (Q.array() * r.C1_classic.array()).sum(); }
double F2(const Mat2& Q, const RefPoint& r) { return (Q.array() * r.C2_classic.array()).sum(); }

namespace {

nlohmann::json vec_json(const Vec3& v) { return {v(0), v(1), v(2)}; }
Vec3 json_vec(const nlohmann::json& j) { return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>()); }

}  // namespace

void save_reference(const ReferenceField& ref, const std::string& path) {
  nlohmann::json j;
  j["format"] = "shellred-reference-1";
  j["chart"] = ref.chart_name;
  j["n1"] = ref.grid.n1;
  j["n2"] = ref.grid.n2;
  j["domain"] = {ref.grid.dom.a1, ref.grid.dom.b1, ref.grid.dom.a2, ref.grid.dom.b2};
  j["h"] = ref.h;
  j["fd_order"] = ref.fd_order;
  j["safety"] = ref.safety;
  nlohmann::json pts = nlohmann::json::array();
  for (const Jetd& q : ref.jets)
    pts.push_back({vec_json(q.p), vec_json(q.d1), vec_json(q.d2), vec_json(q.d11), vec_json(q.d12), vec_json(q.d22)});
  j["jets"] = pts;
  std::ofstream out(path);
  if (!out) throw ShellError(ErrorKind::Config, "cannot write " + path);
  out << j.dump(1) << "\n";
}

ReferenceField load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShellError(ErrorKind::Config, "cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != "shellred-reference-1") throw ShellError(ErrorKind::Config, "not a reference cache");
  Grid g;
  g.n1 = j["n1"];
  g.n2 = j["n2"];
  auto d = j["domain"];
  g.dom = {d[0], d[1], d[2], d[3]};
  std::vector<Jetd> jets;
  for (const auto& p : j["jets"]) {
    Jetd q;
    q.p = json_vec(p[0]);
    q.d1 = json_vec(p[1]);
    q.d2 = json_vec(p[2]);
    q.d11 = json_vec(p[3]);
    q.d12 = json_vec(p[4]);
    q.d22 = json_vec(p[5]);
    jets.push_back(q);
  }
  ReferenceField ref = build_reference(g, jets, j["h"].get<double>());
  ref.chart_name = j["chart"];
  ref.fd_order = j["fd_order"];
  ref.safety = j["safety"];
  return ref;
}

}  // namespace shellred
