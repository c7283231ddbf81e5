#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "shellred/minimizer.hpp"

namespace support {

using namespace shellred;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240601);
  return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline Mat2 random_mat2(double s = 1.0) {
  Mat2 m;
  for (int i = 0; i < 4; ++i) m(i) = uniform(-s, s);
  return m;
}

inline Mat2 random_sym2(double s = 1.0) {
  Mat2 m = random_mat2(s);
  return 0.5 * (m + m.transpose());
}

inline Mat3 random_rotation() {
  Eigen::Quaterniond q(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
  q.normalize();
  return q.toRotationMatrix();
}

struct NamedChart {
  const char* name;
  SurfaceChart chart;
};

inline std::vector<NamedChart> catalog() {
  return {{"plate", make_plate()},
          {"sphere-cap", make_sphere_cap(1.0, 0.5)},
          {"cylinder-patch", make_cylinder_patch(1.0, 1.0, 0.5)}};
}

// Smooth random displacement built from a few low modes; amplitude relative to the domain size.
struct SmoothField {
  struct Mode {
    double k1, k2, p1, p2;
    Vec3 c;
  };
  std::vector<Mode> modes;

  static SmoothField random(int n_modes, double amp) {
    SmoothField f;
    for (int m = 0; m < n_modes; ++m)
      f.modes.push_back({uniform(0.5, 3.0), uniform(0.5, 3.0), uniform(0, 6.3), uniform(0, 6.3),
                         Vec3(uniform(-amp, amp), uniform(-amp, amp), uniform(-amp, amp))});
    return f;
  }

  Vec3 at(double x1, double x2) const {
    Vec3 v = Vec3::Zero();
    for (const Mode& m : modes) v += std::sin(m.k1 * x1 + m.p1) * std::sin(m.k2 * x2 + m.p2) * m.c;
    return v;
  }
};

// y0 plus a smooth field windowed to vanish on the boundary, so clamped nodes stay at y0.
inline std::vector<Vec3> perturbed(const ShellProblem& p, const SmoothField& f) {
  const Grid& g = p.ref().grid;
  const Domain& d = g.dom;
  std::vector<Vec3> m = p.reference_nodes();
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      double w = std::sin(M_PI * (g.x1(i) - d.a1) / (d.b1 - d.a1)) * std::sin(M_PI * (g.x2(j) - d.a2) / (d.b2 - d.a2));
      int k = g.idx(i, j);
      if (!p.fixed()[k]) m[k] += w * f.at(g.x1(i), g.x2(j));
    }
  return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace support
