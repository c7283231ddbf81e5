#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shellred/errors.hpp"
#include "shellred/exec.hpp"

namespace shellred {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

template <class T> using V3 = Eigen::Matrix<T, 3, 1>;
template <class T> using M2 = Eigen::Matrix<T, 2, 2>;
template <class T> using M32 = Eigen::Matrix<T, 3, 2>;

inline double value_of(double x) { return x; }
template <class D>
double value_of(const Eigen::AutoDiffScalar<D>& x) {
  return x.value();
}

// Forward-mode scalar over the 18 local jet components (p, d1, d2, d11, d12, d22).
using AD18 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 18, 1>>;

constexpr double kEpsRank = 1e-12;

// Position and parameter derivatives of a surface at one point.
template <class T>
struct Jet {
  V3<T> p, d1, d2, d11, d12, d22;
};
using Jetd = Jet<double>;

template <class T>
V3<T> cross3(const V3<T>& a, const V3<T>& b) {
  V3<T> c;
  c(0) = a(1) * b(2) - a(2) * b(1);
  c(1) = a(2) * b(0) - a(0) * b(2);
  c(2) = a(0) * b(1) - a(1) * b(0);
  return c;
}

template <class T>
T dot3(const V3<T>& a, const V3<T>& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

template <class T>
M2<T> inv2(const M2<T>& m) {
  T det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  M2<T> r;
  r(0, 0) = m(1, 1) / det;
  r(1, 1) = m(0, 0) / det;
  r(0, 1) = -m(0, 1) / det;
  r(1, 0) = -m(1, 0) / det;
  return r;
}

template <class T>
T det2(const M2<T>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

// Normal, its gradient and the three forms. Sign convention: II = -(grad y)^T grad n.
template <class T>
struct SurfaceFrame {
  V3<T> n;
  M32<T> dy, dn;
  M2<T> I, II, III;
  T a;
};

// Returns false (leaving f partially filled) when |d1 x d2| <= eps.
template <class T>
bool frame_from_jet_checked(const Jet<T>& j, SurfaceFrame<T>& f, double eps) {
  using std::sqrt;
  V3<T> c = cross3<T>(j.d1, j.d2);
  f.a = sqrt(dot3<T>(c, c));
  if (!(value_of(f.a) > eps)) return false;
  f.n = c / f.a;
  V3<T> c1 = cross3<T>(j.d11, j.d2) + cross3<T>(j.d1, j.d12);
  V3<T> c2 = cross3<T>(j.d12, j.d2) + cross3<T>(j.d1, j.d22);
  V3<T> n1 = (c1 - f.n * dot3<T>(f.n, c1)) / f.a;
  V3<T> n2 = (c2 - f.n * dot3<T>(f.n, c2)) / f.a;
  f.dy.col(0) = j.d1;
  f.dy.col(1) = j.d2;
  f.dn.col(0) = n1;
  f.dn.col(1) = n2;
  f.I(0, 0) = dot3<T>(j.d1, j.d1);
  f.I(1, 1) = dot3<T>(j.d2, j.d2);
  f.I(0, 1) = f.I(1, 0) = dot3<T>(j.d1, j.d2);
  f.II(0, 0) = -dot3<T>(j.d1, n1);
  f.II(1, 1) = -dot3<T>(j.d2, n2);
  f.II(0, 1) = f.II(1, 0) = -0.5 * (dot3<T>(j.d1, n2) + dot3<T>(j.d2, n1));
  f.III(0, 0) = dot3<T>(n1, n1);
  f.III(1, 1) = dot3<T>(n2, n2);
  f.III(0, 1) = f.III(1, 0) = dot3<T>(n1, n2);
  return true;
}

template <class T>
SurfaceFrame<T> frame_from_jet(const Jet<T>& j, double eps_rank = kEpsRank) {
  SurfaceFrame<T> f;
  if (!frame_from_jet_checked(j, f, eps_rank))
    throw ShellError(ErrorKind::DegenerateChart, "tangent vectors are linearly dependent");
  return f;
}

struct FundamentalData {
  Mat2 I, II, III, L;
  double H = 0, K = 0, a = 0;
  Vec3 n;
  double kappa1 = 0, kappa2 = 0;
  Mat32 dy, dn;
};

FundamentalData fundamental_from_jet(const Jetd& j, double eps_rank = kEpsRank);

// kappa = H -/+ sqrt(H^2 - K), with tiny negative discriminants clamped to zero.
void principal_curvatures(double H, double K, double& k1, double& k2);

Mat3 lift_flat(const Mat2& m);
Mat3 lift_hat(const Mat2& m);

struct Domain {
  double a1 = 0, b1 = 1, a2 = 0, b2 = 1;
};

struct Grid {
  int n1 = 0, n2 = 0;
  Domain dom;
  double dx1() const { return (dom.b1 - dom.a1) / (n1 - 1); }
  double dx2() const { return (dom.b2 - dom.a2) / (n2 - 1); }
  double x1(int i) const { return dom.a1 + i * dx1(); }
  double x2(int j) const { return dom.a2 + j * dx2(); }
  int idx(int i, int j) const { return j * n1 + i; }
  int size() const { return n1 * n2; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1; }
};

// Composite Simpson weights on n (odd) equispaced nodes with spacing dx.
std::vector<double> simpson_weights(int n, double dx);

// Fornberg's recursion: weights for the deriv-th derivative at x0 over nodes xs.
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int deriv);

struct Stencil {
  int start = 0;
  std::vector<double> w;  // already divided by spacing^k
};

class Diff1D {
 public:
  Diff1D() = default;
  Diff1D(int n, double spacing, int order);
  const Stencil& first(int i) const { return first_[i]; }
  const Stencil& second(int i) const { return second_[i]; }
  int n() const { return n_; }
  // output indices whose stencils (or the identity) read node k
  int reach_lo(int k) const { return lo_[k]; }
  int reach_hi(int k) const { return hi_[k]; }

 private:
  int n_ = 0;
  std::vector<Stencil> first_, second_;
  std::vector<int> lo_, hi_;
};

class GridDiff {
 public:
  GridDiff() = default;
  GridDiff(const Grid& g, int order);
  const Grid& grid() const { return grid_; }
  int order() const { return order_; }

  template <class T, class NodeFn>
  Jet<T> jet_at(NodeFn&& node, int i, int j) const {
    Jet<T> r;
    r.p = node(i, j);
    const Stencil& f1 = d1_.first(i);
    const Stencil& s1 = d1_.second(i);
    const Stencil& f2 = d2_.first(j);
    const Stencil& s2 = d2_.second(j);
    r.d1.setZero();
    r.d2.setZero();
    r.d11.setZero();
    r.d22.setZero();
    r.d12.setZero();
    for (std::size_t a = 0; a < f1.w.size(); ++a) r.d1 += f1.w[a] * node(f1.start + int(a), j);
    for (std::size_t a = 0; a < s1.w.size(); ++a) r.d11 += s1.w[a] * node(s1.start + int(a), j);
    for (std::size_t b = 0; b < f2.w.size(); ++b) r.d2 += f2.w[b] * node(i, f2.start + int(b));
    for (std::size_t b = 0; b < s2.w.size(); ++b) r.d22 += s2.w[b] * node(i, s2.start + int(b));
    for (std::size_t b = 0; b < f2.w.size(); ++b)
      for (std::size_t a = 0; a < f1.w.size(); ++a)
        r.d12 += (f1.w[a] * f2.w[b]) * node(f1.start + int(a), f2.start + int(b));
    return r;
  }

  Jetd jet(const std::vector<Vec3>& nodes, int i, int j) const;
  std::vector<Jetd> jets(const std::vector<Vec3>& nodes, Exec ex = Exec::Serial) const;

  // out += J^T g where g holds d/dp, d/dd1, d/dd2, d/dd11, d/dd12, d/dd22 (3 each).
  void scatter(int i, int j, const double* g18, std::vector<Vec3>& out) const;

  struct Entry {
    int node, group;  // group: 0 p, 1 d1, 2 d2, 3 d11, 4 d12, 5 d22
    double w;
  };
  // The linear map node values -> jet at (i, j), as (node, group, weight) entries.
  void entries(int i, int j, std::vector<Entry>& out) const;

  // Inclusive rectangle of points whose jets read node (k, l).
  void support(int k, int l, int& i0, int& i1, int& j0, int& j1) const;

 private:
  Grid grid_;
  int order_ = 4;
  Diff1D d1_, d2_;
};

// Derivative fields of a nodal grid by finite differences (order 2 or 4).
std::vector<Jetd> finite_difference_derivatives(const Grid& g, const std::vector<Vec3>& nodes, int order);

struct SurfaceChart {
  std::string name;
  Domain dom;
  std::function<Jetd(double, double)> jet_fn;
  Vec3 eval(double x1, double x2) const { return jet_fn(x1, x2).p; }
  Jetd jet(double x1, double x2) const { return jet_fn(x1, x2); }
};

struct ChartSpec {
  std::string name = "plate";
  std::string graph_kind = "poly";  // poly | bump
  std::map<std::string, double> params;
  double param(const std::string& k, double fallback) const {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  }
};

SurfaceChart make_plate(double lx = 1.0, double ly = 1.0);
// Gnomonic patch of the sphere around the north pole; x' in [-tan(angle), tan(angle)]^2.
SurfaceChart make_sphere_cap(double R, double angle);
// Arc-length patch of a cylinder with axis e2; x1 in [-R*angle, R*angle].
SurfaceChart make_cylinder_patch(double R, double height, double angle = 0.5);
// z = c0 + c1 x1 + c2 x2 + c11 x1^2 + c12 x1 x2 + c22 x2^2
SurfaceChart make_graph_poly(const std::array<double, 6>& c, double lx = 1.0, double ly = 1.0);
// z = amp cos(k1 x1) cos(k2 x2)
SurfaceChart make_graph_bump(double amp, double k1, double k2, double lx = 1.0, double ly = 1.0);
SurfaceChart make_chart(const ChartSpec& spec);

FundamentalData fundamental_data(const SurfaceChart& chart, double x1, double x2);

std::vector<Vec3> sample_nodes(const SurfaceChart& chart, const Grid& g);
std::vector<Jetd> analytic_jets(const SurfaceChart& chart, const Grid& g);
Grid chart_grid(const SurfaceChart& chart, int n1, int n2);

}  // namespace shellred
