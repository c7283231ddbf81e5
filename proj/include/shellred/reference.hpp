#pragma once

#include <string>
#include <vector>

#include "shellred/geometry.hpp"

namespace shellred {

// All y0 quantities needed at one quadrature point.
struct RefPoint {
  Vec3 y, n;
  Mat32 dy, dn;
  Mat2 I, II, III, L;
  Mat2 Iinv, Iinv_sqrt, I_sqrt;
  double H = 0, K = 0, a = 0, kappa1 = 0, kappa2 = 0;
  double Am = 1, Ap = 1;  // A-/A+ = 1 +/- hH + h^2 K / 4
  double T = 0;           // K/12 + (|H| + C/4)^2 / 3, filled once C is known
  // contraction tensors: classic forms and the forms that follow from the ansatz
  Mat2 C1_classic, C2_classic, C1_ansatz, C2_ansatz;
};

struct ThicknessCheck {
  bool pass = true;
  double margin = 0.0;  // h * max |kappa|
  double h_geom = 0.0;  // 2 / max |kappa| (infinite when flat)
};

struct ReferenceField {
  Grid grid;
  double h = 0.0;
  int fd_order = 0;  // 0 when built from analytic derivatives
  std::vector<Jetd> jets;
  std::vector<RefPoint> pts;
  std::vector<double> w;  // tensor Simpson weights in parameter space
  double C = 0.0, T_max = 0.0, maxK = 0.0, maxNegK = 0.0, maxAbsKappa = 0.0;
  double safety = 1.0;
  ThicknessCheck thickness;
  std::string chart_name;
};

// Symmetric square root and inverse square root of an SPD 2x2 matrix (closed form).
void spd_sqrt2(const Mat2& m, Mat2& sqrt_m, Mat2& inv_sqrt_m);

RefPoint make_ref_point(const Jetd& jet, double h);
ReferenceField build_reference(const Grid& g, const std::vector<Jetd>& jets, double h);
ReferenceField build_reference(const SurfaceChart& chart, const Grid& g, double h, int fd_order = 0);
// Rebuilds A+/- and T for another thickness.
void set_thickness(ReferenceField& ref, double h);

ThicknessCheck check_thickness(const ReferenceField& ref, double h);

double F0(const Mat2& Q, const RefPoint& r);
double F1(const Mat2& Q, const RefPoint& r);
double F2(const Mat2& Q, const RefPoint& r);

void save_reference(const ReferenceField& ref, const std::string& path);
ReferenceField load_reference(const std::string& path);

}  // namespace shellred
