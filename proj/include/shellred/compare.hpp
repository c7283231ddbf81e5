#pragma once

#include <vector>

#include "shellred/oracle.hpp"

namespace shellred {

// Smooth test family: y + amp * phi(y) with a fixed non-polynomial phi.
Vec3 test_deformation(const Vec3& y, double amp);

// Least-squares slope of log(err) against log(h); NaN if any error is not positive.
double fitted_order(const std::vector<double>& hs, const std::vector<double>& errs);

struct CompareRow {
  double h = 0;
  Model model = Model::I;
  double e_reduced = 0, e_3d = 0, abs_err = 0;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // h-major, models I, II, III
  double order[3] = {0, 0, 0};
  // int log det F a_y0 b: truncated expansion against dense quadrature
  std::vector<double> logdet_err;
  double logdet_order = 0;  // over entries above round-off
};

struct CompareOptions {
  double amplitude = 0.05;
  ConstantsMode constants = ConstantsMode::Oracle;
  int fd_order = 4;
  int gauss_nodes = 16;
};

// Nodes of y0 and of the test deformation are differentiated with the same stencils.
CompareResult compare_3d(const SurfaceChart& chart, int n1, int n2, const Material& mat, const std::vector<double>& hs,
                         const CompareOptions& opt, Exec ex = Exec::Serial);

}  // namespace shellred
