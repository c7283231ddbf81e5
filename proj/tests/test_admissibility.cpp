#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace shellred;
using support::uniform;

namespace {

ReferenceField sphere(double R, double h = 0.1, int n = 17) {
  SurfaceChart c = make_sphere_cap(R, 0.5);
  return build_reference(c, chart_grid(c, n, n), h);
}

// Quadratic behind the Taylor (det)^2 term, written out directly.
double F_quadratic(const RefPoint& r, const Material& m, double s, double X, double Y) {
  const double h = m.h, h3 = h * h * h, h5 = h3 * h * h, H = r.H, K = r.K;
  return 0.25 * m.lambda * r.a *
         (h * s * s + h3 / 12 * (K * s * s + 4 * X * X + 2 * s * Y) +
          h5 / 80 * ((16 * H * H - 4 * K) * X * X - 8 * H * X * Y + Y * Y));
}

// First h on a uniform grid of (0, hmax] where pred fails; +inf if none.
template <class P>
double scan(P pred, double hmax, int n) {
  for (int k = 1; k <= n; ++k) {
    double h = hmax * k / n;
    if (!pred(h)) return h;
  }
  return kInf;
}

}  // namespace

TEST_CASE("smallest positive root") {
  CHECK(smallest_positive_root({1, -1, 0, 0}) == doctest::Approx(1.0));
  CHECK(smallest_positive_root({1, 1, 0, 0}) == kInf);
  CHECK(smallest_positive_root({6, -5, 1, 0}) == doctest::Approx(2.0));
  CHECK(smallest_positive_root({1, 0, 1, 0}) == kInf);
  // (1 - t)(2 - t)(3 - t) scaled so the constant is positive
  CHECK(smallest_positive_root({6, -11, 6, -1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(smallest_positive_root({1, 0, 0, 1}) == kInf);
  CHECK(smallest_positive_root({1, 0, 0, -1}) == doctest::Approx(1.0).epsilon(1e-12));
  // a negligible cubic coefficient falls back to the quadratic
  CHECK(smallest_positive_root({6, -5, 1, 1e-20}) == doctest::Approx(2.0));
  CHECK(smallest_positive_root({2, 0, 0, 0}) == kInf);
  for (int s = 0; s < 200; ++s) {
    std::array<double, 4> c{uniform(0.1, 2), uniform(-3, 3), uniform(-3, 3), uniform(-3, 3)};
    double t = smallest_positive_root(c);
    auto p = [&](double x) { return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]; };
    if (std::isinf(t)) {
      for (double x = 0; x < 50; x += 0.01) CHECK(p(x) > -1e-12);
    } else {
      CHECK(std::abs(p(t)) < 1e-9);
      for (double x = 0; x < t * 0.999; x += t / 500) CHECK(p(x) > 0);
    }
  }
}

TEST_CASE("plate has no thickness restriction") {
  SurfaceChart c = make_plate();
  for (double h : {0.01, 1.0, 100.0}) {
    ReferenceField ref = build_reference(c, chart_grid(c, 17, 17), h);
    AdmissibilityReport r = admissibility_report(ref, h);
    CHECK(std::isinf(r.shell1.h1p));
    CHECK(std::isinf(r.shell1.h1pp));
    CHECK(std::isinf(r.shell1.h0));
    CHECK(std::isinf(r.shell2.h0));
    CHECK(r.shell2.T_max == 0.0);
    CHECK(std::isinf(r.taylor.h0));
    for (Model m : {Model::I, Model::II, Model::III}) {
      CHECK(std::isinf(r.model_h_max(m)));
      CHECK(r.model_pass(m));
    }
  }
  // g(t) = 1/3 on a plate
  auto p = shell1_poly(0, 0, 0, ConstantsMode::Oracle);
  CHECK(p[0] == doctest::Approx(1.0 / 3));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.0);
}

TEST_CASE("sphere thresholds in closed form") {
  for (double R : {0.5, 1.0, 3.0}) {
    ReferenceField ref = sphere(R);
    Shell1Thresholds s1 = threshold_shell1(ref);
    CHECK(s1.h1p == doctest::Approx(R * std::sqrt(20.0 / 3)).epsilon(1e-10));
    Shell2Thresholds s2 = threshold_shell2(ref);
    double q = 1 / R + std::sqrt(2.0) / (2 * R);
    double T = 1 / (12 * R * R) + q * q / 3;
    CHECK(s2.T_max == doctest::Approx(T).epsilon(1e-10));
    CHECK(s2.h0 == doctest::Approx(1 / std::sqrt(T)).epsilon(1e-10));
    TaylorThresholds tt = threshold_taylor(ref);
    CHECK(std::isinf(tt.h1));
    CHECK(std::isinf(tt.h2p));
    CHECK(tt.h2pp == doctest::Approx(R * std::sqrt(20.0 / 3)).epsilon(1e-10));
    // quadratic formula on 2/135 + t (K/1800 - H^2/90) - t^2 K^2/2400
    double K = 1 / (R * R), H2 = K;
    double a = -K * K / 2400, b = K / 1800 - H2 / 90, c = 2.0 / 135;
    double t = (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
    CHECK(tt.h3 == doctest::Approx(std::sqrt(t)).epsilon(1e-10));
    double bp = K / 450 - H2 / 90;
    double tp = (-bp - std::sqrt(bp * bp - 4 * a * c)) / (2 * a);
    CHECK(threshold_taylor(ref, ConstantsMode::Paper).h3 == doctest::Approx(std::sqrt(tp)).epsilon(1e-10));
  }
  ReferenceField ref = sphere(1.0);
  CHECK(threshold_shell1(ref).h1pp == doctest::Approx(0.701492).epsilon(1e-6));
  CHECK(threshold_shell2(ref).h0 == doctest::Approx(0.973706).epsilon(1e-6));
  CHECK(threshold_taylor(ref).h3 == doctest::Approx(2 / std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("closed-form thresholds match scans of the underlying inequalities") {
  ReferenceField ref = sphere(1.0);
  const RefPoint& r = ref.pts[ref.grid.idx(8, 8)];
  const double H = std::abs(r.H), K = r.K, C = ref.C;
  const double hmax = 4.0;
  const int n = 10000;
  const double step = hmax / n;
  // first shell density: both coefficient conditions of the (E, G) lower bound
  auto shell1 = [&](double h) {
    double h3 = h * h * h, h5 = h3 * h * h;
    double cE = h - h3 * K / 12 + h5 * K * K / 80 - C * h5 / 40 * std::abs(H * K);
    double cG = h3 / 12 - h5 * K / 80;
    double cEG = h3 / 3 * H + C * std::abs(h3 / 6 - h5 * K / 40);
    return cG >= 0 && 4 * cE * cG >= cEG * cEG;
  };
  CHECK(std::abs(scan(shell1, hmax, n) - threshold_shell1(ref).h1) <= step);
  auto shell2 = [&](double h) {
    double h3 = h * h * h;
    double lhs = h3 / 3 * (h - h3 * K / 12);
    double rhs = h3 * H / 3 + h3 * C / 12;
    return lhs >= rhs * rhs;
  };
  CHECK(std::abs(scan(shell2, hmax, n) - threshold_shell2(ref).h0) <= step);
  auto taylor = [&](double h) {
    Mat3 M = hessian_F(r, Material{1, 4, h});
    return M.determinant() >= 0;
  };
  CHECK(std::abs(scan(taylor, hmax, n) - threshold_taylor(ref).h3) <= step);
}

TEST_CASE("Hessian of the Taylor quadratic") {
  SurfaceChart c = make_plate();
  ReferenceField flat = build_reference(c, chart_grid(c, 9, 9), 1.0);
  Mat3 M = hessian_F(flat.pts[0], Material{1, 4, 1});
  Mat3 E;
  E << 2, 0, 1.0 / 6, 0, 2.0 / 3, 0, 1.0 / 6, 0, 1.0 / 40;
  CHECK((M - E).norm() < 1e-15);
  for (auto& nc : support::catalog()) {
    ReferenceField ref = build_reference(nc.chart, chart_grid(nc.chart, 9, 9), 0.3);
    for (int s = 0; s < 20; ++s) {
      const RefPoint& r = ref.pts[std::size_t(uniform(0, ref.pts.size() - 1e-9))];
      Material mat{1, uniform(0.5, 3), uniform(0.1, 1)};
      Mat3 Hs = hessian_F(r, mat);
      CHECK((Hs - Hs.transpose()).norm() == 0.0);
      Vec3 u(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      const double e = 1e-2;  // exact for a quadratic up to round-off
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          auto f = [&](double di, double dj) {
            Vec3 v = u;
            v(i) += di;
            v(j) += dj;
            return F_quadratic(r, mat, v(0), v(1), v(2));
          };
          double fd = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4 * e * e);
          CHECK(std::abs(fd - Hs(i, j)) < 1e-8 * std::max(1.0, Hs.norm()));
        }
    }
  }
}

TEST_CASE("sampled shell Hessians are positive semidefinite below the thresholds") {
  ReferenceField ref = sphere(1.0);
  Shell1Thresholds s1 = threshold_shell1(ref);
  Shell2Thresholds s2 = threshold_shell2(ref);
  for (double f : {0.5, 0.9}) {
    for (ConstantsMode mode : {ConstantsMode::Paper, ConstantsMode::Oracle}) {
      ConvexitySample a = sample_convexity(ShellDensity::F, ref, Material{1, 1, f * s1.h0}, 0, mode);
      CHECK(a.min_eig >= -1e-12 * a.scale);
      ConvexitySample b = sample_convexity(ShellDensity::G, ref, Material{1, 1, f * s2.h0}, 0, mode);
      CHECK(b.min_eig >= -1e-12 * b.scale);
    }
    TaylorThresholds tt = threshold_taylor(ref);
    for (const RefPoint& r : ref.pts) {
      Mat3 M = hessian_F(r, Material{1, 1, f * tt.h0});
      double sc = M.cwiseAbs().maxCoeff();
      for (int i = 0; i < 3; ++i) CHECK(M(i, i) >= -1e-12 * sc);
      CHECK(M.topLeftCorner<2, 2>().determinant() >= -1e-12 * sc * sc);
      CHECK(M.determinant() >= -1e-12 * sc * sc * sc);
    }
  }
  // thresholds are sufficient: the first failing thickness, if any, lies above them
  for (ShellDensity d : {ShellDensity::F, ShellDensity::G}) {
    double h0 = d == ShellDensity::F ? s1.h0 : s2.h0;
    double fail = scan(
        [&](double h) {
          ConvexitySample s = sample_convexity(d, ref, Material{1, 1, h}, 25);
          return s.min_eig >= -1e-12 * s.scale;
        },
        3 * h0, 60);
    CHECK(fail >= h0);
  }
  SurfaceChart c = make_plate();
  ReferenceField flat = build_reference(c, chart_grid(c, 9, 9), 1.0);
  for (double h : {0.01, 1.0, 100.0}) {
    ConvexitySample s = sample_convexity(ShellDensity::F, flat, Material{1, 1, h});
    CHECK(s.min_eig >= -1e-12 * s.scale);
  }
}

TEST_CASE("property: thresholds scale with the surface") {
  for (auto [a, b] : {std::pair{1.0, 2.0}, {0.5, 1.5}}) {
    ReferenceField ra = sphere(a), rb = sphere(b);
    double s = b / a;
    CHECK(threshold_shell1(rb).h0 == doctest::Approx(s * threshold_shell1(ra).h0).epsilon(1e-9));
    CHECK(threshold_shell2(rb).h0 == doctest::Approx(s * threshold_shell2(ra).h0).epsilon(1e-9));
    CHECK(threshold_taylor(rb).h0 == doctest::Approx(s * threshold_taylor(ra).h0).epsilon(1e-9));
  }
  SurfaceChart c1 = make_cylinder_patch(1.0, 1.0, 0.5), c2 = make_cylinder_patch(2.0, 2.0, 0.5);
  ReferenceField r1 = build_reference(c1, chart_grid(c1, 17, 17), 0.1);
  ReferenceField r2 = build_reference(c2, chart_grid(c2, 17, 17), 0.1);
  CHECK(threshold_shell1(r2).h0 == doctest::Approx(2 * threshold_shell1(r1).h0).epsilon(1e-6));
  CHECK(threshold_shell2(r2).h0 == doctest::Approx(2 * threshold_shell2(r1).h0).epsilon(1e-6));
}

TEST_CASE("pointwise thresholds converge under grid refinement") {
  SurfaceChart c = make_graph_poly({0, 0, 0, 0.4, 0.3, -0.2});
  double prev = 0, prev_diff = kInf;
  for (int n : {9, 17, 33}) {
    ReferenceField ref = build_reference(c, chart_grid(c, n, n), 0.05);
    double t = threshold_shell1(ref).tstar;
    if (prev > 0) {
      double d = std::abs(t - prev);
      CHECK(d <= prev_diff);
      prev_diff = d;
    }
    prev = t;
  }
  CHECK(prev_diff < 1e-2 * prev);
}

TEST_CASE("report and thickness verdicts") {
  ReferenceField ref = sphere(1.0);
  AdmissibilityReport ok = admissibility_report(ref, 0.5);
  for (Model m : {Model::I, Model::II, Model::III}) CHECK(ok.model_pass(m));
  AdmissibilityReport bad = admissibility_report(ref, 0.8);
  CHECK_FALSE(bad.model_pass(Model::I));
  CHECK(bad.model_pass(Model::II));
  CHECK_FALSE(bad.model_pass(Model::III));
  CHECK(bad.model_h_max(Model::II) == doctest::Approx(0.973706).epsilon(1e-6));
  std::string text = report_text(bad);
  CHECK(text.find("first shell density") != std::string::npos);
  CHECK(text.find("Model II h_max") != std::string::npos);
  std::string csv = report_csv(bad);
  CHECK(csv.rfind("quantity,value,pass\r\n", 0) == 0);
  CHECK(csv.find("modelI.h_max,0.70149") != std::string::npos);
  AdmissibilityReport a = admissibility_report(ref, 0.3, ConstantsMode::Oracle, Exec::Serial);
  AdmissibilityReport b = admissibility_report(ref, 0.3, ConstantsMode::Oracle, Exec::Parallel);
  CHECK(report_csv(a) == report_csv(b));
}
