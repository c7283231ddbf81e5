#include "shellred/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shellred/io.hpp"

namespace shellred {

namespace {

double eval_poly(const std::array<double, 4>& c, double t) { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; }

double bisect_root(const std::array<double, 4>& c, double lo, double hi) {
  // p(lo) > 0 >= p(hi)
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (eval_poly(c, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  // Newton polish, kept inside the bracket
  for (int it = 0; it < 3; ++it) {
    double d = (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1];
    if (d == 0.0) break;
    double tn = t - eval_poly(c, t) / d;
    if (!(tn >= lo && tn <= hi)) break;
    t = tn;
  }
  return t;
}

double snap(double x, double tol) { return std::abs(x) < tol ? 0.0 : x; }

double sqrt_or_inf(double num, double den) { return den > 0.0 ? std::sqrt(num / den) : kInf; }

}  // namespace

double smallest_positive_root(const std::array<double, 4>& c_in, double rel_tol) {
  std::array<double, 4> c = c_in;
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  int deg = 3;
  while (deg > 0 && std::abs(c[deg]) <= rel_tol * cmax) c[deg--] = 0.0;
  if (deg == 0) return kInf;
  if (deg == 1) return c[1] < 0.0 ? -c[0] / c[1] : kInf;
  if (deg == 2) {
    double a = c[2], b = c[1], d = b * b - 4.0 * a * c[0];
    if (d < 0.0) return kInf;
    double q = -0.5 * (b + std::copysign(std::sqrt(d), b));
    double r1 = q / a, r2 = q != 0.0 ? c[0] / q : kInf;
    double best = kInf;
    for (double r : {r1, r2})
      if (r > 0.0) best = std::min(best, r);
    return best;
  }
  // cubic: split (0, bound] at the critical points and bisect the first sign change
  double bound = 1.0;
  for (int k = 0; k < 3; ++k) bound = std::max(bound, 1.0 + std::abs(c[k] / c[3]));
  std::vector<double> pts{0.0};
  double a = 3.0 * c[3], b = 2.0 * c[2], cc = c[1], d = b * b - 4.0 * a * cc;
  if (d >= 0.0) {
    double s = std::sqrt(d);
    for (double r : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)})
      if (r > 0.0 && r < bound) pts.push_back(r);
  }
  pts.push_back(bound);
  std::sort(pts.begin(), pts.end());
  for (std::size_t k = 1; k < pts.size(); ++k) {
    double v = eval_poly(c, pts[k]);
    if (v == 0.0) return pts[k];
    if (v < 0.0) return bisect_root(c, pts[k - 1], pts[k]);
  }
  return kInf;
}

std::array<double, 4> shell1_poly(double H, double K, double C, ConstantsMode mode) {
  const double aH = std::abs(H), aHK = std::abs(H * K);
  if (mode == ConstantsMode::Paper) {
    return {1.0 / 3.0, -(7.0 * K / 90.0 + H * H / 9.0 + C * aH / 9.0),
            K * K / 120.0 - C * aHK / 120.0 + K * aH * C / 60.0 + C * K / 120.0,
            -K * K * K / 1600.0 + C * aHK * K / 800.0 - C * K * K / 1600.0};
  }
  // 4 A G >= (h^3 P - h^5 Q)^2 divided by h^4, with P = |H|/3 + C/6 and Q = C K / 40
  const double P = aH / 3.0 + C / 6.0, Q = C * K / 40.0;
  return {1.0 / 3.0, -(7.0 * K / 90.0 + P * P), K * K / 120.0 - C * aHK / 120.0 + 2.0 * P * Q,
          -K * K * K / 1600.0 + C * aHK * K / 800.0 - Q * Q};
}

std::array<double, 4> taylor_poly(double H, double K, ConstantsMode mode) {
  const double kc = mode == ConstantsMode::Paper ? K / 450.0 : K / 1800.0;
  return {2.0 / 135.0, kc - H * H / 90.0, -K * K / 2400.0, 0.0};
}

CurvatureFloor curvature_floor(const ReferenceField& ref) {
  CurvatureFloor f;
  if (ref.pts.empty()) return f;
  Vec3 lo = ref.pts[0].y, hi = lo;
  for (const RefPoint& r : ref.pts) {
    lo = lo.cwiseMin(r.y);
    hi = hi.cwiseMax(r.y);
  }
  double L = (hi - lo).norm();
  if (L > 0.0) f.kappa = 1e-9 / L;
  f.K = std::max(f.kappa * f.kappa, 1e-10 * ref.maxAbsKappa * ref.maxAbsKappa);
  return f;
}

namespace {

struct Snapped {
  std::vector<double> H, K;
  double C = 0, maxK = 0, maxNegK = 0, maxAbsKappa = 0;
};

Snapped snapped(const ReferenceField& ref) {
  CurvatureFloor f = curvature_floor(ref);
  Snapped s;
  s.H.resize(ref.pts.size());
  s.K.resize(ref.pts.size());
  for (std::size_t k = 0; k < ref.pts.size(); ++k) {
    s.H[k] = snap(ref.pts[k].H, f.kappa);
    s.K[k] = snap(ref.pts[k].K, f.K);
    s.maxK = std::max(s.maxK, s.K[k]);
    s.maxNegK = std::max(s.maxNegK, -s.K[k]);
  }
  s.C = snap(ref.C, f.kappa);
  s.maxAbsKappa = snap(ref.maxAbsKappa, f.kappa);
  return s;
}

// inf-reduction over per-point values, first index wins ties
void argmin_of(const std::vector<double>& v, double& best, int& at) {
  best = kInf;
  at = -1;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] < best) {
      best = v[k];
      at = int(k);
    }
}

}  // namespace

Shell1Thresholds threshold_shell1(const ReferenceField& ref, ConstantsMode mode, Exec ex) {
  Snapped s = snapped(ref);
  Shell1Thresholds t;
  t.h1p = sqrt_or_inf(20.0, 3.0 * s.maxK);
  t.tstar_pt.assign(ref.pts.size(), kInf);
  for_each_index(ex, int(ref.pts.size()), [&](int k) {
    t.tstar_pt[k] = smallest_positive_root(shell1_poly(s.H[k], s.K[k], s.C, mode));
  });
  argmin_of(t.tstar_pt, t.tstar, t.argmin);
  t.h1pp = std::sqrt(t.tstar);
  t.h1 = std::min(t.h1p, t.h1pp);
  t.h2 = t.h1p;
  t.h0 = std::min(t.h1, t.h2) * ref.safety;
  return t;
}

Shell2Thresholds threshold_shell2(const ReferenceField& ref) {
  Snapped s = snapped(ref);
  Shell2Thresholds t;
  t.T_max = 0.0;
  for (std::size_t k = 0; k < ref.pts.size(); ++k) {
    double q = std::abs(s.H[k]) + s.C / 4.0;
    double T = s.K[k] / 12.0 + q * q / 3.0;
    if (t.argmin < 0 || T > t.T_max) {
      t.T_max = T;
      t.argmin = int(k);
    }
  }
  t.h0 = (t.T_max > 0.0 ? 1.0 / std::sqrt(t.T_max) : kInf) * ref.safety;
  return t;
}

TaylorThresholds threshold_taylor(const ReferenceField& ref, ConstantsMode mode, Exec ex) {
  Snapped s = snapped(ref);
  TaylorThresholds t;
  t.h1 = sqrt_or_inf(12.0, s.maxNegK);
  t.h2p = sqrt_or_inf(16.0, 3.0 * s.maxNegK);
  t.h2pp = sqrt_or_inf(20.0, 3.0 * s.maxK);
  t.h2 = std::min({t.h1, t.h2p, t.h2pp});
  t.tstar_pt.assign(ref.pts.size(), kInf);
  for_each_index(ex, int(ref.pts.size()),
                 [&](int k) { t.tstar_pt[k] = smallest_positive_root(taylor_poly(s.H[k], s.K[k], mode)); });
  argmin_of(t.tstar_pt, t.tstar, t.argmin);
  t.h3 = std::sqrt(t.tstar);
  t.h0 = std::min(t.h3, t.h2) * ref.safety;
  return t;
}

Mat3 hessian_F(const RefPoint& r, const Material& mat) {
  const double h = mat.h, h3 = h * h * h, h5 = h3 * h * h, H = r.H, K = r.K;
  Mat3 M;
  M << 2.0 * h + K * h3 / 6.0, 0.0, h3 / 6.0,
       0.0, 2.0 * h3 / 3.0 + h5 / 40.0 * (16.0 * H * H - 4.0 * K), -H * h5 / 10.0,
       h3 / 6.0, -H * h5 / 10.0, h5 / 40.0;
  return 0.25 * mat.lambda * r.a * M;
}

Mat12 shell_hessian(ShellDensity d, const RefPoint& r, const Material& mat, ConstantsMode mode) {
  // (E,G) coefficients: the II_m coefficients of the classic table already carry II_m = -E^T G
  ShellCoeffs c = shell_coeffs(d == ShellDensity::F ? Model::I : Model::II, ConstantsMode::Paper, mat.h, r.H, r.K);
  const Mat2& C1 = mode == ConstantsMode::Oracle ? r.C1_ansatz : r.C1_classic;
  const Mat2& C2 = mode == ConstantsMode::Oracle ? r.C2_ansatz : r.C2_classic;
  Mat2 XEE = c.f0I * r.Iinv + c.f1I * C1 + c.f2I * C2;
  Mat2 XEG = c.f0II * r.Iinv + c.f1II * C1 + c.f2II * C2;
  Mat2 XGG = c.f0III * r.Iinv + c.f2III * C2;
  Mat12 Hs = Mat12::Zero();
  for (int k = 0; k < 3; ++k)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        int ea = 2 * k + a, eb = 2 * k + b, ga = 6 + ea, gb = 6 + eb;
        // <E^T X E>: z^T B z with B[(k,a),(k,b)] = X_ab, Hessian B + B^T
        Hs(ea, eb) += XEE(a, b);
        Hs(eb, ea) += XEE(a, b);
        Hs(ga, gb) += XGG(a, b);
        Hs(gb, ga) += XGG(a, b);
        Hs(ea, gb) += XEG(a, b);
        Hs(gb, ea) += XEG(a, b);
      }
  return 0.5 * mat.mu * Hs;
}

ConvexitySample sample_convexity(ShellDensity d, const ReferenceField& ref, const Material& mat, int n_samples,
                                 ConstantsMode mode, Exec ex) {
  const int n = int(ref.pts.size());
  const int ns = (n_samples <= 0 || n_samples >= n) ? n : n_samples;
  std::vector<double> mins(ns), scales(ns);
  for_each_index(ex, ns, [&](int s) {
    int k = int((long long)s * n / ns);
    Eigen::SelfAdjointEigenSolver<Mat12> es(shell_hessian(d, ref.pts[k], mat, mode), Eigen::EigenvaluesOnly);
    mins[s] = es.eigenvalues()(0);
    scales[s] = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(11)));
  });
  ConvexitySample out;
  for (int s = 0; s < ns; ++s) {
    out.scale = std::max(out.scale, scales[s]);
    if (mins[s] < out.min_eig) {
      out.min_eig = mins[s];
      out.argmin = int((long long)s * n / ns);
    }
  }
  return out;
}

AdmissibilityReport admissibility_report(const ReferenceField& ref, double h, ConstantsMode mode, Exec ex) {
  AdmissibilityReport r;
  r.h = h;
  r.chart = ref.chart_name;
  r.n1 = ref.grid.n1;
  r.safety = ref.safety;
  Snapped s = snapped(ref);
  r.h_geom = s.maxAbsKappa > 0.0 ? 2.0 / s.maxAbsKappa : kInf;
  r.geom_margin = h * s.maxAbsKappa;
  r.geom_pass = r.geom_margin < 2.0;
  r.shell1 = threshold_shell1(ref, mode, ex);
  r.shell2 = threshold_shell2(ref);
  r.taylor = threshold_taylor(ref, mode, ex);
  r.h_max[0] = std::min(r.h_geom, r.shell1.h0);
  r.h_max[1] = std::min(r.h_geom, r.shell2.h0);
  r.h_max[2] = std::min({r.h_geom, r.shell1.h0, r.taylor.h0});
  for (int m = 0; m < 3; ++m) r.pass[m] = r.geom_pass && h < r.h_max[m];
  return r;
}

namespace {

std::string where(const AdmissibilityReport& r, int k) {
  if (k < 0 || r.n1 <= 0) return "-";
  return "(" + std::to_string(k % r.n1) + ", " + std::to_string(k / r.n1) + ")";
}

}  // namespace

std::string report_text(const AdmissibilityReport& r) {
  std::ostringstream o;
  auto text = [&](const std::string& name, const std::string& v) {
    o << "  " << name << std::string(name.size() < 28 ? 28 - name.size() : 1, ' ') << v << "\n";
  };
  auto line = [&](const std::string& name, double v) { text(name, fmt_short(v)); };
  o << "admissibility report  chart=" << (r.chart.empty() ? "?" : r.chart) << "  h=" << fmt_short(r.h)
    << "  safety=" << fmt_short(r.safety) << "\n";
  o << "geometric bound\n";
  line("h*max|kappa|", r.geom_margin);
  line("h_geom", r.h_geom);
  text("verdict", r.geom_pass ? "pass" : "FAIL");
  o << "first shell density (Models I, III)\n";
  line("h1'", r.shell1.h1p);
  line("h1''", r.shell1.h1pp);
  text("t* attained at node", where(r, r.shell1.argmin));
  line("h1", r.shell1.h1);
  line("h2", r.shell1.h2);
  line("h0", r.shell1.h0);
  o << "second shell density (Model II)\n";
  line("max T", r.shell2.T_max);
  line("h0", r.shell2.h0);
  text("max T attained at node", r.shell2.T_max > 0.0 ? where(r, r.shell2.argmin) : "-");
  o << "Taylor curvature term (Model III)\n";
  line("h1", r.taylor.h1);
  line("h2'", r.taylor.h2p);
  line("h2''", r.taylor.h2pp);
  line("h2", r.taylor.h2);
  line("h3", r.taylor.h3);
  text("t* attained at node", where(r, r.taylor.argmin));
  line("h0", r.taylor.h0);
  o << "per model\n";
  for (int m = 0; m < 3; ++m) {
    std::string name = "Model " + model_name(Model(m + 1)) + " h_max";
    o << "  " << name << std::string(28 - name.size(), ' ') << fmt_short(r.h_max[m]) << "  "
      << (r.pass[m] ? "pass" : "FAIL") << "  margin " << fmt_short(r.h_max[m] - r.h) << "\n";
  }
  return o.str();
}

std::string report_csv(const AdmissibilityReport& r) {
  CsvTable t({"quantity", "value", "pass"});
  auto row = [&](const std::string& k, double v, const std::string& p = "") { t.add_row({k, fmt_num(v), p}); };
  row("h", r.h);
  row("safety", r.safety);
  row("geom.margin", r.geom_margin, r.geom_pass ? "1" : "0");
  row("geom.h_geom", r.h_geom);
  row("shell1.h1p", r.shell1.h1p);
  row("shell1.h1pp", r.shell1.h1pp);
  row("shell1.h1", r.shell1.h1);
  row("shell1.h2", r.shell1.h2);
  row("shell1.h0", r.shell1.h0);
  row("shell1.tstar", r.shell1.tstar);
  row("shell1.argmin", r.shell1.argmin);
  row("shell2.T_max", r.shell2.T_max);
  row("shell2.h0", r.shell2.h0);
  row("shell2.argmin", r.shell2.argmin);
  row("taylor.h1", r.taylor.h1);
  row("taylor.h2p", r.taylor.h2p);
  row("taylor.h2pp", r.taylor.h2pp);
  row("taylor.h2", r.taylor.h2);
  row("taylor.h3", r.taylor.h3);
  row("taylor.h0", r.taylor.h0);
  row("taylor.tstar", r.taylor.tstar);
  row("taylor.argmin", r.taylor.argmin);
  for (int m = 0; m < 3; ++m) row("model" + model_name(Model(m + 1)) + ".h_max", r.h_max[m], r.pass[m] ? "1" : "0");
  return t.str();
}

}  // namespace shellred
