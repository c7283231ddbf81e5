#pragma once

#include <functional>

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "shellred/admissibility.hpp"
#include "shellred/loads.hpp"

namespace shellred {

enum class GradientMode { AD, FiniteDifference };

struct SolverConfig {
  Model model = Model::I;
  ConstantsMode constants = ConstantsMode::Oracle;
  int max_iter = 500;
  double grad_tol = 1e-6;  // relative to the initial gradient norm
  double c1 = 1e-4;        // Armijo
  double backtrack = 0.5;
  int memory = 10;
  double beta = -1.0;  // normal penalty weight; negative selects 100 mu h
  GradientMode gradient = GradientMode::AD;
  double fd_step = 3e-8;  // times the reference length scale
  double eps_feas = 1e-8;
  int fd_order = 4;
  bool force = false;
  Exec exec = Exec::Parallel;
  int snapshot_every = 0;
  bool precondition = true;  // sparse convexified Hessian as the initial inverse-Hessian guess
  int precond_refresh = 50;  // iterations between preconditioner rebuilds

  void validate() const;
};

struct Feasibility {
  bool ok = true;
  double min_am_ratio = 0;  // min a_m / a_y0
  double min_A = 0;         // min over A+ and A-
  double min_normal_dot = 0;
  int worst = -1;
};

// Discrete objective J = internal + penalty - load over nodal positions (grid order).
class ShellProblem {
 public:
  ShellProblem(const ReferenceField& ref, const Material& mat, const BoundarySpec& bc, const NodalLoad& load,
               const SolverConfig& cfg);

  const ReferenceField& ref() const { return ref_; }
  const GridDiff& diff() const { return diff_; }
  const Material& material() const { return mat_; }
  const SolverConfig& config() const { return cfg_; }
  int size() const { return ref_.grid.size(); }
  const std::vector<char>& fixed() const { return fixed_; }
  std::vector<Vec3> reference_nodes() const;
  double length_scale() const { return length_; }
  double beta() const { return beta_; }
  double gradient_scale() const;

  std::vector<Jetd> jets(const std::vector<Vec3>& m, Exec ex) const { return diff_.jets(m, ex); }
  double objective(const std::vector<Vec3>& m, Exec ex) const;
  // Gradient with respect to all nodes; fixed nodes get zero.
  double gradient(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const;
  double gradient(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex, GradientMode mode) const;
  EnergyBreakdown breakdown(const std::vector<Vec3>& m, Exec ex, bool keep_density = false) const;
  // int_gamma_d |n_m - n_y0|^2 ds
  double normal_deviation(const std::vector<Vec3>& m, Exec ex) const;
  Feasibility feasibility(const std::vector<Vec3>& m, Exec ex) const;
  // Sum over points of J_k^T P_k J_k, P_k the per-point Hessian in jet variables with negative
  // eigenvalues clipped; fixed nodes get identity rows. Size 3n, node-major.
  Eigen::SparseMatrix<double> convex_hessian(const std::vector<Vec3>& m, Exec ex) const;

 private:
  // Objective integrand at point k (already weighted); false if the point is not orientation preserving.
  template <class T>
  bool point_value(int k, const Jet<T>& jet, T& out) const;

  double gradient_ad(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const;
  double gradient_fd(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const;

  ReferenceField ref_;
  Material mat_;
  BoundarySpec bc_;
  NodalLoad load_;
  SolverConfig cfg_;
  GridDiff diff_;
  std::vector<char> fixed_;
  std::vector<double> pen_w_;  // clamped-edge weights for the normal penalty
  double beta_ = 0, length_ = 1, area_ = 0;
};

// Largest step t0 * backtrack^k keeping every point feasible; throws StepCollapsed below 1e-14.
double project_admissible(const ShellProblem& p, const std::vector<Vec3>& m, const std::vector<Vec3>& dir, double t0,
                          Exec ex);

struct TraceRow {
  int iter = 0;
  double energy = 0, grad_norm = 0, step = 0;
  double min_am_ratio = 0, min_A = 0;
};

enum class StopReason { GradientTolerance, MaxIterations, StepCollapsed, NoProgress };
const char* stop_reason_name(StopReason r);

struct MinimizeResult {
  std::vector<Vec3> nodes;
  std::vector<TraceRow> trace;
  EnergyBreakdown final_energy;
  StopReason reason = StopReason::MaxIterations;
  int iterations = 0;
  std::vector<std::string> warnings;
};

using SnapshotFn = std::function<void(int iter, const std::vector<Vec3>& nodes)>;

// Checks the thickness gate (unless cfg.force) and the initial iterate, then runs L-BFGS.
MinimizeResult minimize(const ShellProblem& p, const std::vector<Vec3>& initial, const SnapshotFn& snapshot = {});

}  // namespace shellred
