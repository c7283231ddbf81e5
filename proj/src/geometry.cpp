#include "shellred/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace shellred {

void principal_curvatures(double H, double K, double& k1, double& k2) {
  double disc = H * H - K;
  if (disc < 0.0 && disc >= -1e-12) disc = 0.0;
  double r = std::sqrt(std::max(disc, 0.0));
  k1 = H - r;
  k2 = H + r;
}

FundamentalData fundamental_from_jet(const Jetd& j, double eps_rank) {
  SurfaceFrame<double> f = frame_from_jet<double>(j, eps_rank);
  FundamentalData d;
  d.I = f.I;
  d.II = f.II;
  d.III = f.III;
  d.a = f.a;
  d.n = f.n;
  d.dy = f.dy;
  d.dn = f.dn;
  d.L = inv2<double>(f.I) * f.II;
  d.H = 0.5 * d.L.trace();
  d.K = d.L.determinant();
  principal_curvatures(d.H, d.K, d.kappa1, d.kappa2);
  return d;
}

Mat3 lift_flat(const Mat2& m) {
  Mat3 r = Mat3::Zero();
  r.block<2, 2>(0, 0) = m;
  return r;
}

Mat3 lift_hat(const Mat2& m) {
  Mat3 r = lift_flat(m);
  r(2, 2) = 1.0;
  return r;
}

std::vector<double> simpson_weights(int n, double dx) {
  std::vector<double> w(n, 0.0);
  if (n < 3 || n % 2 == 0) throw ShellError(ErrorKind::Config, "composite Simpson needs an odd node count >= 3");
  for (int i = 0; i < n; ++i) {
    if (i == 0 || i == n - 1)
      w[i] = dx / 3.0;
    else
      w[i] = (i % 2 ? 4.0 : 2.0) * dx / 3.0;
  }
  return w;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int deriv) {
  const int n = int(xs.size());
  const int m = deriv;
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

Stencil make_stencil(int i, int n, int npts, int deriv, double spacing) {
  int half = npts / 2;
  int start = std::clamp(i - half, 0, n - npts);
  std::vector<double> xs(npts);
  for (int a = 0; a < npts; ++a) xs[a] = double(start + a);
  Stencil s;
  s.start = start;
  s.w = fd_weights(double(i), xs, deriv);
  double scale = std::pow(spacing, deriv);
  for (double& w : s.w) w /= scale;
  return s;
}

}  // namespace

Diff1D::Diff1D(int n, double spacing, int order) : n_(n) {
  if (order != 2 && order != 4) throw ShellError(ErrorKind::Config, "finite-difference order must be 2 or 4");
  if (n < 5 || n < order + 2)
    throw ShellError(ErrorKind::GridTooSmall, "need at least " + std::to_string(std::max(5, order + 2)) +
                                                   " nodes per direction, got " + std::to_string(n));
  first_.resize(n);
  second_.resize(n);
  for (int i = 0; i < n; ++i) {
    bool central = i - order / 2 >= 0 && i + order / 2 <= n - 1;
    first_[i] = make_stencil(i, n, order + 1, 1, spacing);
    second_[i] = make_stencil(i, n, central ? order + 1 : order + 2, 2, spacing);
  }
  lo_.assign(n, n);
  hi_.assign(n, -1);
  auto mark = [&](int k, int i) {
    lo_[k] = std::min(lo_[k], i);
    hi_[k] = std::max(hi_[k], i);
  };
  for (int i = 0; i < n; ++i) {
    mark(i, i);
    for (std::size_t a = 0; a < first_[i].w.size(); ++a) mark(first_[i].start + int(a), i);
    for (std::size_t a = 0; a < second_[i].w.size(); ++a) mark(second_[i].start + int(a), i);
  }
}

GridDiff::GridDiff(const Grid& g, int order)
    : grid_(g), order_(order), d1_(g.n1, g.dx1(), order), d2_(g.n2, g.dx2(), order) {}

Jetd GridDiff::jet(const std::vector<Vec3>& nodes, int i, int j) const {
  auto node = [&](int a, int b) -> const Vec3& { return nodes[grid_.idx(a, b)]; };
  return jet_at<double>(node, i, j);
}

std::vector<Jetd> GridDiff::jets(const std::vector<Vec3>& nodes, Exec ex) const {
  std::vector<Jetd> out(grid_.size());
  for_each_index(ex, grid_.size(), [&](int k) {
    int i = k % grid_.n1, j = k / grid_.n1;
    out[k] = jet(nodes, i, j);
  });
  return out;
}

void GridDiff::scatter(int i, int j, const double* g, std::vector<Vec3>& out) const {
  auto at = [&](int a, int b) -> Vec3& { return out[grid_.idx(a, b)]; };
  Eigen::Map<const Vec3> gp(g), g1(g + 3), g2(g + 6), g11(g + 9), g12(g + 12), g22(g + 15);
  at(i, j) += gp;
  const Stencil& f1 = d1_.first(i);
  const Stencil& s1 = d1_.second(i);
  const Stencil& f2 = d2_.first(j);
  const Stencil& s2 = d2_.second(j);
  for (std::size_t a = 0; a < f1.w.size(); ++a) at(f1.start + int(a), j) += f1.w[a] * g1;
  for (std::size_t a = 0; a < s1.w.size(); ++a) at(s1.start + int(a), j) += s1.w[a] * g11;
  for (std::size_t b = 0; b < f2.w.size(); ++b) at(i, f2.start + int(b)) += f2.w[b] * g2;
  for (std::size_t b = 0; b < s2.w.size(); ++b) at(i, s2.start + int(b)) += s2.w[b] * g22;
  for (std::size_t b = 0; b < f2.w.size(); ++b)
    for (std::size_t a = 0; a < f1.w.size(); ++a)
      at(f1.start + int(a), f2.start + int(b)) += (f1.w[a] * f2.w[b]) * g12;
}

void GridDiff::entries(int i, int j, std::vector<Entry>& out) const {
  out.clear();
  const Stencil& f1 = d1_.first(i);
  const Stencil& s1 = d1_.second(i);
  const Stencil& f2 = d2_.first(j);
  const Stencil& s2 = d2_.second(j);
  out.push_back({grid_.idx(i, j), 0, 1.0});
  for (std::size_t a = 0; a < f1.w.size(); ++a) out.push_back({grid_.idx(f1.start + int(a), j), 1, f1.w[a]});
  for (std::size_t b = 0; b < f2.w.size(); ++b) out.push_back({grid_.idx(i, f2.start + int(b)), 2, f2.w[b]});
  for (std::size_t a = 0; a < s1.w.size(); ++a) out.push_back({grid_.idx(s1.start + int(a), j), 3, s1.w[a]});
  for (std::size_t b = 0; b < f2.w.size(); ++b)
    for (std::size_t a = 0; a < f1.w.size(); ++a)
      out.push_back({grid_.idx(f1.start + int(a), f2.start + int(b)), 4, f1.w[a] * f2.w[b]});
  for (std::size_t b = 0; b < s2.w.size(); ++b) out.push_back({grid_.idx(i, s2.start + int(b)), 5, s2.w[b]});
}

void GridDiff::support(int k, int l, int& i0, int& i1, int& j0, int& j1) const {
  i0 = d1_.reach_lo(k);
  i1 = d1_.reach_hi(k);
  j0 = d2_.reach_lo(l);
  j1 = d2_.reach_hi(l);
}

std::vector<Jetd> finite_difference_derivatives(const Grid& g, const std::vector<Vec3>& nodes, int order) {
  GridDiff d(g, order);
  return d.jets(nodes);
}

SurfaceChart make_plate(double lx, double ly) {
  SurfaceChart c;
  c.name = "plate";
  c.dom = {-0.5 * lx, 0.5 * lx, -0.5 * ly, 0.5 * ly};
  c.jet_fn = [](double x1, double x2) {
    Jetd j;
    j.p = Vec3(x1, x2, 0.0);
    j.d1 = Vec3::UnitX();
    j.d2 = Vec3::UnitY();
    j.d11 = j.d12 = j.d22 = Vec3::Zero();
    return j;
  };
  return c;
}

SurfaceChart make_sphere_cap(double R, double angle) {
  SurfaceChart c;
  c.name = "sphere-cap";
  double t = std::tan(angle);
  c.dom = {-t, t, -t, t};
  c.jet_fn = [R](double x1, double x2) {
    double s = 1.0 / std::sqrt(1.0 + x1 * x1 + x2 * x2);
    double s3 = s * s * s, s5 = s3 * s * s;
    Vec3 p(x1, x2, 1.0);
    double x[2] = {x1, x2};
    Vec3 e[2] = {Vec3::UnitX(), Vec3::UnitY()};
    double ds[2] = {-x1 * s3, -x2 * s3};
    auto dds = [&](int i, int k) { return (i == k ? -s3 : 0.0) + 3.0 * x[i] * x[k] * s5; };
    Jetd j;
    j.p = R * s * p;
    j.d1 = R * (ds[0] * p + s * e[0]);
    j.d2 = R * (ds[1] * p + s * e[1]);
    j.d11 = R * (dds(0, 0) * p + 2.0 * ds[0] * e[0]);
    j.d12 = R * (dds(0, 1) * p + ds[0] * e[1] + ds[1] * e[0]);
    j.d22 = R * (dds(1, 1) * p + 2.0 * ds[1] * e[1]);
    return j;
  };
  return c;
}

SurfaceChart make_cylinder_patch(double R, double height, double angle) {
  SurfaceChart c;
  c.name = "cylinder-patch";
  c.dom = {-R * angle, R * angle, -0.5 * height, 0.5 * height};
  c.jet_fn = [R](double x1, double x2) {
    double sn = std::sin(x1 / R), cs = std::cos(x1 / R);
    Jetd j;
    j.p = Vec3(R * sn, x2, R * cs);
    j.d1 = Vec3(cs, 0.0, -sn);
    j.d2 = Vec3::UnitY();
    j.d11 = Vec3(-sn / R, 0.0, -cs / R);
    j.d12 = j.d22 = Vec3::Zero();
    return j;
  };
  return c;
}

namespace {

SurfaceChart graph_chart(std::function<void(double, double, double*)> f, double lx, double ly) {
  SurfaceChart c;
  c.name = "graph";
  c.dom = {-0.5 * lx, 0.5 * lx, -0.5 * ly, 0.5 * ly};
  c.jet_fn = [f](double x1, double x2) {
    double v[6];  // f, f1, f2, f11, f12, f22
    f(x1, x2, v);
    Jetd j;
    j.p = Vec3(x1, x2, v[0]);
    j.d1 = Vec3(1.0, 0.0, v[1]);
    j.d2 = Vec3(0.0, 1.0, v[2]);
    j.d11 = Vec3(0.0, 0.0, v[3]);
    j.d12 = Vec3(0.0, 0.0, v[4]);
    j.d22 = Vec3(0.0, 0.0, v[5]);
    return j;
  };
  return c;
}

}  // namespace

SurfaceChart make_graph_poly(const std::array<double, 6>& c, double lx, double ly) {
  return graph_chart(
      [c](double x1, double x2, double* v) {
        v[0] = c[0] + c[1] * x1 + c[2] * x2 + c[3] * x1 * x1 + c[4] * x1 * x2 + c[5] * x2 * x2;
        v[1] = c[1] + 2.0 * c[3] * x1 + c[4] * x2;
        v[2] = c[2] + c[4] * x1 + 2.0 * c[5] * x2;
        v[3] = 2.0 * c[3];
        v[4] = c[4];
        v[5] = 2.0 * c[5];
      },
      lx, ly);
}

SurfaceChart make_graph_bump(double amp, double k1, double k2, double lx, double ly) {
  return graph_chart(
      [=](double x1, double x2, double* v) {
        double c1 = std::cos(k1 * x1), s1 = std::sin(k1 * x1);
        double c2 = std::cos(k2 * x2), s2 = std::sin(k2 * x2);
        v[0] = amp * c1 * c2;
        v[1] = -amp * k1 * s1 * c2;
        v[2] = -amp * k2 * c1 * s2;
        v[3] = -amp * k1 * k1 * c1 * c2;
        v[4] = amp * k1 * k2 * s1 * s2;
        v[5] = -amp * k2 * k2 * c1 * c2;
      },
      lx, ly);
}

SurfaceChart make_chart(const ChartSpec& s) {
  if (s.name == "plate") return make_plate(s.param("lx", 1.0), s.param("ly", 1.0));
  if (s.name == "sphere-cap") return make_sphere_cap(s.param("radius", 1.0), s.param("angle", 0.5));
  if (s.name == "cylinder-patch")
    return make_cylinder_patch(s.param("radius", 1.0), s.param("height", 1.0), s.param("angle", 0.5));
  if (s.name == "graph") {
    double lx = s.param("lx", 1.0), ly = s.param("ly", 1.0);
    if (s.graph_kind == "bump")
      return make_graph_bump(s.param("amp", 0.1), s.param("k1", M_PI), s.param("k2", M_PI), lx, ly);
    if (s.graph_kind == "poly")
      return make_graph_poly({s.param("c0", 0.0), s.param("c1", 0.0), s.param("c2", 0.0), s.param("c11", 0.0),
                              s.param("c12", 0.0), s.param("c22", 0.0)},
                             lx, ly);
    throw ShellError(ErrorKind::Config, "unknown graph kind '" + s.graph_kind + "'");
  }
  throw ShellError(ErrorKind::Config, "unknown chart '" + s.name + "'");
}

FundamentalData fundamental_data(const SurfaceChart& chart, double x1, double x2) {
  return fundamental_from_jet(chart.jet(x1, x2));
}

Grid chart_grid(const SurfaceChart& chart, int n1, int n2) {
  Grid g;
  g.n1 = n1;
  g.n2 = n2;
  g.dom = chart.dom;
  return g;
}

std::vector<Vec3> sample_nodes(const SurfaceChart& chart, const Grid& g) {
  std::vector<Vec3> out(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out[g.idx(i, j)] = chart.eval(g.x1(i), g.x2(j));
  return out;
}

std::vector<Jetd> analytic_jets(const SurfaceChart& chart, const Grid& g) {
  std::vector<Jetd> out(g.size());
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out[g.idx(i, j)] = chart.jet(g.x1(i), g.x2(j));
  return out;
}

}  // namespace shellred
