#include "shellred/compare.hpp"

#include <cmath>
#include <limits>

namespace shellred {

Vec3 test_deformation(const Vec3& p, double amp) {
  return p + amp * Vec3(std::sin(1.3 * p.y() + 0.2) * std::cos(p.x()), 0.7 * std::cos(0.9 * p.x() - 0.4 * p.z()),
                        0.5 * std::sin(p.x() + p.y()) + 0.3 * p.x() * p.x());
}

double fitted_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  const std::size_t n = hs.size();
  if (n < 2 || errs.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(errs[k] > 0.0) || !(hs[k] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double x = std::log(hs[k]), y = std::log(errs[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

CompareResult compare_3d(const SurfaceChart& chart, int n1, int n2, const Material& mat, const std::vector<double>& hs,
                         const CompareOptions& opt, Exec ex) {
  Grid g = chart_grid(chart, n1, n2);
  std::vector<Vec3> y0 = sample_nodes(chart, g), m(y0.size());
  for (std::size_t k = 0; k < y0.size(); ++k) m[k] = test_deformation(y0[k], opt.amplitude);
  std::vector<Jetd> jr = finite_difference_derivatives(g, y0, opt.fd_order);
  std::vector<Jetd> jm = finite_difference_derivatives(g, m, opt.fd_order);

  CompareResult res;
  std::vector<double> errs[3], ld_h, ld_err;
  for (double h : hs) {
    Material mh = mat;
    mh.h = h;
    validate(mh);
    ReferenceField ref = build_reference(g, jr, h);
    ThicknessQuadrature quad = ThicknessQuadrature::gauss(opt.gauss_nodes, h);
    Oracle3D o = integrate_3d(jm, ref, mh, quad, ex);
    for (int mi = 0; mi < 3; ++mi) {
      EnergyOptions eo;
      eo.model = Model(mi + 1);
      eo.constants = opt.constants;
      CompareRow row;
      row.h = h;
      row.model = eo.model;
      row.e_reduced = internal_energy(jm, ref, mh, eo, ex).total;
      row.e_3d = o.total;
      row.abs_err = std::abs(row.e_reduced - row.e_3d);
      errs[mi].push_back(row.abs_err);
      res.rows.push_back(row);
    }
    const int n = g.size();
    std::vector<double> part(n);
    for_each_index(ex, n, [&](int k) {
      const RefPoint& r = ref.pts[k];
      DeformedPoint<double> d = deformed_point<double>(jm[k], r, h);
      part[k] = ref.w[k] * logdet_taylor_reduction(d.f.a, r.a, r.H, r.K, d.dH, d.dK, h);
    });
    double dense = -o.log_part / (mh.mu + 0.5 * mh.lambda);
    double e = std::abs(ordered_sum(part) - dense);
    res.logdet_err.push_back(e);
    // the expansion error falls below round-off quickly; keep it out of the fit
    if (e > 1e-13 * std::abs(dense)) {
      ld_h.push_back(h);
      ld_err.push_back(e);
    }
  }
  for (int mi = 0; mi < 3; ++mi) res.order[mi] = fitted_order(hs, errs[mi]);
  res.logdet_order = fitted_order(ld_h, ld_err);
  return res;
}

}  // namespace shellred
