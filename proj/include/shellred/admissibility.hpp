#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "shellred/energy.hpp"

namespace shellred {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest positive root of c[0] + c[1] t + c[2] t^2 + c[3] t^3 given c[0] > 0; +inf if none.
// Leading coefficients below rel_tol * max|c| are treated as zero.
double smallest_positive_root(const std::array<double, 4>& c, double rel_tol = 1e-14);

// Cubic in t = h^2 whose positivity is the discriminant condition for the first shell density.
// Oracle: rederived from the bound with the C^2 terms kept. Paper: classic coefficients.
std::array<double, 4> shell1_poly(double H, double K, double C, ConstantsMode mode);
// Quadratic in t = h^2 equivalent to the 3x3 minor of hessian_F being nonnegative.
// Oracle: expanded from the minor (K/1800). Paper: classic coefficients (K/450).
std::array<double, 4> taylor_poly(double H, double K, ConstantsMode mode);

struct Shell1Thresholds {
  double h1p = kInf, h1pp = kInf, h1 = kInf, h2 = kInf, h0 = kInf;
  double tstar = kInf;
  int argmin = -1;  // grid index attaining t*
  std::vector<double> tstar_pt;
};

struct Shell2Thresholds {
  double h0 = kInf, T_max = 0;
  int argmin = -1;
};

struct TaylorThresholds {
  double h1 = kInf, h2p = kInf, h2pp = kInf, h2 = kInf, h3 = kInf, h0 = kInf;
  double tstar = kInf;
  int argmin = -1;
  std::vector<double> tstar_pt;
};

// Curvature-like quantities below these are treated as exactly zero (flat directions).
struct CurvatureFloor {
  double kappa = 0, K = 0;
};
CurvatureFloor curvature_floor(const ReferenceField& ref);

Shell1Thresholds threshold_shell1(const ReferenceField& ref, ConstantsMode mode = ConstantsMode::Oracle,
                                  Exec ex = Exec::Serial);
Shell2Thresholds threshold_shell2(const ReferenceField& ref);
TaylorThresholds threshold_taylor(const ReferenceField& ref, ConstantsMode mode = ConstantsMode::Oracle,
                                  Exec ex = Exec::Serial);

// Hessian of the (r, X, Y) quadratic behind the Taylor (det)^2 term.
Mat3 hessian_F(const RefPoint& r, const Material& mat);

enum class ShellDensity { F, G };  // first (Models I, III) and second (Model II) shell densities

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

// Hessian of the shell density as a quadratic form in z = (vec E, vec G), E_{ka} at 2k + a.
// Oracle uses the contraction tensors consistent with the ansatz, Paper the classic ones.
Mat12 shell_hessian(ShellDensity d, const RefPoint& r, const Material& mat,
                    ConstantsMode mode = ConstantsMode::Paper);

struct ConvexitySample {
  double min_eig = kInf;
  double scale = 0;  // largest |eigenvalue| seen
  int argmin = -1;
};

// Minimum Hessian eigenvalue over n_samples evenly strided grid points (all points if n_samples <= 0).
ConvexitySample sample_convexity(ShellDensity d, const ReferenceField& ref, const Material& mat, int n_samples = 0,
                                 ConstantsMode mode = ConstantsMode::Paper, Exec ex = Exec::Serial);

struct AdmissibilityReport {
  double h = 0;
  double h_geom = kInf, geom_margin = 0;
  bool geom_pass = true;
  Shell1Thresholds shell1;
  Shell2Thresholds shell2;
  TaylorThresholds taylor;
  double safety = 1.0;
  std::array<double, 3> h_max{kInf, kInf, kInf};  // Models I, II, III
  std::array<bool, 3> pass{true, true, true};
  std::string chart;
  int n1 = 0;  // grid width, to decode argmin indices

  double model_h_max(Model m) const { return h_max[int(m) - 1]; }
  bool model_pass(Model m) const { return pass[int(m) - 1]; }
};

AdmissibilityReport admissibility_report(const ReferenceField& ref, double h,
                                         ConstantsMode mode = ConstantsMode::Oracle, Exec ex = Exec::Serial);

std::string report_text(const AdmissibilityReport& r);
std::string report_csv(const AdmissibilityReport& r);

}  // namespace shellred
