#pragma once

#include <functional>
#include <vector>

#include "shellred/energy.hpp"

namespace shellred {

struct ThicknessQuadrature {
  enum class Rule { GaussLegendre, Simpson };
  Rule rule = Rule::GaussLegendre;
  std::vector<double> nodes, weights;  // on [-h/2, h/2]

  static ThicknessQuadrature gauss(int n, double h);
  // composite Simpson on n (odd) equispaced nodes
  static ThicknessQuadrature simpson(int n, double h);
};

double w_cg(const Mat3& F, const Material& mat);

enum class InverseMode { ClosedForm, Direct, CrossCheck };

struct AnsatzPoint {
  double x3 = 0;
  Mat3 grad_theta, grad_phi, F;
  double detF = 0;
  double b = 1;  // 1 - 2 H x3 + K x3^2 of y0
  Mat3 B;        // L_flat - 2H Id
};

// Builds F = grad phi (grad Theta)^{-1} under the Kirchhoff-Love ansatz.
// CrossCheck computes both inverses and throws if they differ by more than 1e-10 (relative).
AnsatzPoint ansatz_point(const DeformedPoint<double>& m, const RefPoint& r, double x3,
                         InverseMode mode = InverseMode::ClosedForm);

// Closed-form inverse of grad Theta from the shape operator.
Mat3 grad_theta_inverse(const RefPoint& r, double x3);

struct Oracle3D {
  double total = 0;
  double trace_part = 0;  // (mu/2) int (|F|^2 - 3)
  double log_part = 0;    // -(mu + lambda/2) int log det F
  double det2_part = 0;   // (lambda/4) int (det^2 - 1)
};

// int_omega int_{-h/2}^{h/2} W_CG(F) a_y0 b dx3 dx'.
Oracle3D integrate_3d(const std::vector<Jetd>& mjets, const ReferenceField& ref, const Material& mat,
                      const ThicknessQuadrature& quad, Exec ex = Exec::Serial,
                      InverseMode mode = InverseMode::ClosedForm);

// Through-thickness integral at one point (per unit reference area, i.e. divided by a_y0).
Oracle3D integrate_thickness(const DeformedPoint<double>& m, const RefPoint& r, const Material& mat,
                             const ThicknessQuadrature& quad, InverseMode mode = InverseMode::ClosedForm);

struct Alphas {
  double a[5] = {0, 0, 0, 0, 0};
  ShellCoeffs table;  // the nine coefficients of the trace expansion (classic form)
};

Alphas trace_expansion_alpha(double H, double K, double h);

struct TaylorC {
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0;
};

TaylorC det2_taylor_coeffs(double H, double K, double dH, double dK);

// Truncated expansion of int log(det F) a_y0 b dx3; a comparison diagnostic only.
double logdet_taylor_reduction(double a_m, double a_y0, double H, double K, double dH, double dK, double h);

double simpson_thickness(const std::function<double(double)>& f, double h);

}  // namespace shellred
