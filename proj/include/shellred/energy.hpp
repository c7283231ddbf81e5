#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "shellred/reference.hpp"

namespace shellred {

enum class Model { I = 1, II = 2, III = 3 };

// Oracle: constants, log coefficient and the shell coefficient table are the ones that
// reproduce through-thickness integration of the 3D energy. Paper: classic forms.
enum class ConstantsMode { Oracle, Paper };

struct Material {
  double mu = 1.0, lambda = 1.0, h = 0.1;
};

void validate(const Material& m);

constexpr double kEpsOrient = 1e-10;

struct ShellCoeffs {
  double f0I = 0, f0II = 0, f0III = 0;
  double f1I = 0, f1II = 0;
  double f2I = 0, f2II = 0, f2III = 0;
  double standalone = 0;
};

ShellCoeffs shell_coeffs(Model model, ConstantsMode mode, double h, double H, double K);
double log_coefficient(const Material& mat, ConstantsMode mode);

template <class T>
struct DeformedPoint {
  SurfaceFrame<T> f;
  M2<T> L;
  T H, K, Am, Ap, dH, dK;
  bool ok = false;  // a_m and A+/- above kEpsOrient
};

template <class T>
DeformedPoint<T> deformed_point(const Jet<T>& j, const RefPoint& r, double h) {
  DeformedPoint<T> d;
  if (!frame_from_jet_checked(j, d.f, kEpsOrient)) {
    d.ok = false;
    return d;
  }
  d.L = inv2<T>(d.f.I) * d.f.II;
  d.H = 0.5 * (d.L(0, 0) + d.L(1, 1));
  d.K = det2<T>(d.L);
  d.Am = 1.0 + h * d.H + (0.25 * h * h) * d.K;
  d.Ap = 1.0 - h * d.H + (0.25 * h * h) * d.K;
  d.dH = d.H - r.H;
  d.dK = d.K - r.K;
  // a fold shows up on a sampled grid as a normal turned past the reference tangent plane
  d.ok = value_of(d.Am) > kEpsOrient && value_of(d.Ap) > kEpsOrient && value_of(d.f.n(0) * r.n(0) + d.f.n(1) * r.n(1) + d.f.n(2) * r.n(2)) > 0.0;
  return d;
}

template <class T>
T contract(const M2<T>& Q, const Mat2& C) {
  return Q(0, 0) * C(0, 0) + Q(0, 1) * C(0, 1) + Q(1, 0) * C(1, 0) + Q(1, 1) * C(1, 1);
}

// Shell density per unit reference area (to be integrated against a_y0 dx').
template <class T>
T w_shell(Model model, const DeformedPoint<T>& m, const RefPoint& r, const Material& mat, ConstantsMode mode,
          bool with_const = true) {
  const double h = mat.h;
  ShellCoeffs c = shell_coeffs(model, mode, h, r.H, r.K);
  const Mat2& C1 = mode == ConstantsMode::Oracle ? r.C1_ansatz : r.C1_classic;
  const Mat2& C2 = mode == ConstantsMode::Oracle ? r.C2_ansatz : r.C2_classic;
  T s = c.f0I * contract<T>(m.f.I, r.Iinv) + c.f0II * contract<T>(m.f.II, r.Iinv) +
        c.f0III * contract<T>(m.f.III, r.Iinv) + c.f1I * contract<T>(m.f.I, C1) + c.f1II * contract<T>(m.f.II, C1) +
        c.f2I * contract<T>(m.f.I, C2) + c.f2II * contract<T>(m.f.II, C2) + c.f2III * contract<T>(m.f.III, C2);
  T w = 0.5 * mat.mu * (s + c.standalone);
  if (with_const) {
    if (mode == ConstantsMode::Oracle)
      w = w - 1.5 * mat.mu * (h + h * h * h * r.K / 12.0);
    else
      w = w - 1.5 * mat.mu;
  }
  return w;
}

// Simpson log term per unit reference area.
template <class T>
T w_curv_log(const DeformedPoint<T>& m, const RefPoint& r, const Material& mat, ConstantsMode mode) {
  using std::log;
  const double h = mat.h;
  const double la = std::log(r.a);
  T lam = log(m.f.a);
  T s = r.Am * (lam + log(m.Am) - (la + std::log(r.Am))) + 4.0 * (lam - la) +
        r.Ap * (lam + log(m.Ap) - (la + std::log(r.Ap)));
  return (log_coefficient(mat, mode) * h / 6.0) * s;
}

// Simpson (det)^2 term; carries its own a_y0 factor, so it is integrated against dx'.
template <class T>
T w_curv_det2_simpson(const DeformedPoint<T>& m, const RefPoint& r, const Material& mat, ConstantsMode mode,
                      bool with_const = true) {
  const double h = mat.h;
  T q = m.f.a / r.a;
  T qm = q * m.Am / r.Am, qp = q * m.Ap / r.Ap;
  T w = (0.25 * mat.lambda * h / 6.0 * r.a) * (r.Am * qm * qm + 4.0 * q * q + r.Ap * qp * qp);
  if (with_const) {
    double vol = mode == ConstantsMode::Oracle ? h + h * h * h * r.K / 12.0 : 1.0;
    w = w - 0.25 * mat.lambda * r.a * vol;
  }
  return w;
}

// Taylor (det)^2 term with the h^5 terms kept; integrated against dx'.
template <class T>
T w_curv_det2_taylor(const DeformedPoint<T>& m, const RefPoint& r, const Material& mat, ConstantsMode mode,
                     bool with_const = true) {
  const double h = mat.h, H = r.H, K = r.K;
  const double h3 = h * h * h, h5 = h3 * h * h;
  T q = m.f.a / r.a;
  T dH = m.dH, dK = m.dK;
  T bracket = h + (h3 / 12.0) * (K + 4.0 * dH * dH + 2.0 * dK) +
              (h5 / 80.0) * (16.0 * H * H * dH * dH - 8.0 * H * dH * dK - 4.0 * K * dH * dH + dK * dK);
  T w = (0.25 * mat.lambda * r.a) * (q * q * bracket);
  if (with_const) {
    double vol = mode == ConstantsMode::Oracle ? h + h3 * K / 12.0 : 1.0;
    w = w - 0.25 * mat.lambda * r.a * vol;
  }
  return w;
}

// Integrand contributions at one point, already in the form summed against dx'.
template <class T>
struct PointTerms {
  T shell, log, det2, constant;
  bool ok = false;
};

template <class T>
PointTerms<T> point_terms(Model model, const DeformedPoint<T>& m, const RefPoint& r, const Material& mat,
                          ConstantsMode mode) {
  PointTerms<T> p;
  p.ok = m.ok;
  if (!m.ok) return p;
  p.shell = w_shell<T>(model, m, r, mat, mode, false) * r.a;
  p.log = w_curv_log<T>(m, r, mat, mode) * r.a;
  p.det2 = model == Model::III ? w_curv_det2_taylor<T>(m, r, mat, mode, false)
                               : w_curv_det2_simpson<T>(m, r, mat, mode, false);
  const double h = mat.h;
  double vol = mode == ConstantsMode::Oracle ? h + h * h * h * r.K / 12.0 : 1.0;
  p.constant = T(-(1.5 * mat.mu + 0.25 * mat.lambda) * vol * r.a);
  return p;
}

struct EnergyBreakdown {
  double shell_term = 0, curv_log_term = 0, curv_det2_term = 0, constant_term = 0;
  double penalty_term = 0;  // boundary normal penalty
  double load_term = 0;     // load potential L, entering the total with a minus sign
  double total = 0;
  double internal() const { return shell_term + curv_log_term + curv_det2_term + constant_term; }
  std::vector<double> density;  // optional per-point integrand
};

struct EnergyOptions {
  Model model = Model::I;
  ConstantsMode constants = ConstantsMode::Oracle;
  bool keep_density = false;
};

// Internal energy of the deformation given by jets on the reference grid; penalty and load stay 0.
// Throws OrientationViolation at the first failing point in grid order.
EnergyBreakdown internal_energy(const std::vector<Jetd>& mjets, const ReferenceField& ref, const Material& mat,
                                const EnergyOptions& opt, Exec ex = Exec::Serial);

std::string model_name(Model m);

}  // namespace shellred
