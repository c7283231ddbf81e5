#include "shellred/energy.hpp"

namespace shellred {

void validate(const Material& m) {
  if (!(m.mu > 0.0) || !(m.lambda > 0.0) || !(m.h > 0.0))
    throw ShellError(ErrorKind::Config, "mu, lambda and h must be positive");
}

ShellCoeffs shell_coeffs(Model model, ConstantsMode mode, double h, double H, double K) {
  const double h3 = h * h * h, h5 = h3 * h * h;
  ShellCoeffs c;
  if (model == Model::II) {
    c.f0I = h - h3 * K / 12.0;
    c.f0II = -h3 * H / 3.0;
    c.f0III = h3 / 12.0;
    c.f1II = h3 / 6.0;
    c.f2I = h3 / 12.0;
    c.standalone = mode == ConstantsMode::Oracle ? h + h3 * K / 12.0 : h + h3 * K / 6.0;
  } else {
    c.f0I = h - h3 * K / 12.0 + h5 * K * K / 80.0;
    c.f0II = -h3 * H / 3.0;
    c.f0III = h3 / 12.0 - h5 * K / 80.0;
    c.f1I = -h5 * H * K / 40.0;
    c.f1II = h3 / 6.0 - h5 * K / 40.0;
    c.f2I = h3 / 12.0 + h5 * (4.0 * H * H - K) / 80.0;
    c.f2II = h5 * H / 20.0;
    c.f2III = h5 / 80.0;
    c.standalone = h + h3 * K / 12.0;
  }
  if (mode == ConstantsMode::Oracle) {
    // The x3-linear part of (grad m + x3 grad n)^T (grad m + x3 grad n) is -2 x3 II_m,
    // which flips every coefficient that multiplies II_m.
    c.f0II = -c.f0II;
    c.f1II = -c.f1II;
    c.f2II = -c.f2II;
  }
  return c;
}

double log_coefficient(const Material& mat, ConstantsMode mode) {
  return mode == ConstantsMode::Oracle ? -(mat.mu + 0.5 * mat.lambda) : -(mat.lambda + 2.0 * mat.mu) / 4.0;
}

std::string model_name(Model m) {
  switch (m) {
    case Model::I: return "I";
    case Model::II: return "II";
    case Model::III: return "III";
  }
  return "?";
}

EnergyBreakdown internal_energy(const std::vector<Jetd>& mjets, const ReferenceField& ref, const Material& mat,
                                const EnergyOptions& opt, Exec ex) {
  const int n = ref.grid.size();
  std::vector<double> shell(n), lg(n), det2(n), cst(n), tot(n);
  std::vector<char> ok(n, 0);
  for_each_index(ex, n, [&](int k) {
    DeformedPoint<double> d = deformed_point<double>(mjets[k], ref.pts[k], mat.h);
    PointTerms<double> p = point_terms<double>(opt.model, d, ref.pts[k], mat, opt.constants);
    ok[k] = p.ok;
    if (!p.ok) return;
    double w = ref.w[k];
    shell[k] = w * p.shell;
    lg[k] = w * p.log;
    det2[k] = w * p.det2;
    cst[k] = w * p.constant;
    tot[k] = w * (p.shell + p.log + p.det2 + p.constant);
  });
  for (int k = 0; k < n; ++k) {
    if (!ok[k]) {
      int i = k % ref.grid.n1, j = k / ref.grid.n1;
      throw OrientationViolation(i, j, ref.grid.x1(i), ref.grid.x2(j), 0.0,
                                 "a_m or A+/- not positive at node (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
    }
  }
  EnergyBreakdown e;
  e.shell_term = ordered_sum(shell);
  e.curv_log_term = ordered_sum(lg);
  e.curv_det2_term = ordered_sum(det2);
  e.constant_term = ordered_sum(cst);
  e.total = ordered_sum(tot);
  if (opt.keep_density) e.density = std::move(tot);
  return e;
}

}  // namespace shellred
