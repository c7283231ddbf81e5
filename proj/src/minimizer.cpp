#include "shellred/minimizer.hpp"

#include "shellred/io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/SparseCholesky>

namespace shellred {

void SolverConfig::validate() const {
  if (max_iter < 0) throw ShellError(ErrorKind::Config, "solver.max_iter must be nonnegative");
  if (!(grad_tol > 0.0)) throw ShellError(ErrorKind::Config, "solver.grad_tol must be positive");
  if (!(c1 > 0.0 && c1 < 1.0)) throw ShellError(ErrorKind::Config, "solver.c1 must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ShellError(ErrorKind::Config, "solver.backtrack must lie in (0, 1)");
  if (memory < 1) throw ShellError(ErrorKind::Config, "solver.memory must be at least 1");
  if (!(fd_step > 0.0)) throw ShellError(ErrorKind::Config, "solver.fd_step must be positive");
  if (!(eps_feas > 0.0)) throw ShellError(ErrorKind::Config, "solver.eps_feas must be positive");
  if (fd_order != 2 && fd_order != 4) throw ShellError(ErrorKind::Config, "fd order must be 2 or 4");
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::GradientTolerance: return "gradient-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::StepCollapsed: return "step-collapsed";
    case StopReason::NoProgress: return "no-progress";
  }
  return "?";
}

ShellProblem::ShellProblem(const ReferenceField& ref, const Material& mat, const BoundarySpec& bc,
                           const NodalLoad& load, const SolverConfig& cfg)
    : mat_(mat), bc_(bc), load_(load), cfg_(cfg) {
  cfg_.validate();
  validate(mat_);
  const Grid& g = ref.grid;
  if (ref.fd_order != cfg_.fd_order) {
    // the objective differentiates m with grid stencils, so y0 must be seen through the same stencils
    std::vector<Vec3> nodes(ref.jets.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] = ref.jets[k].p;
    ref_ = build_reference(g, finite_difference_derivatives(g, nodes, cfg_.fd_order), mat_.h);
    ref_.fd_order = cfg_.fd_order;
    ref_.chart_name = ref.chart_name;
    ref_.safety = ref.safety;
  } else {
    ref_ = ref;
    if (ref_.h != mat_.h) set_thickness(ref_, mat_.h);
  }
  diff_ = GridDiff(g, cfg_.fd_order);
  const int n = g.size();
  fixed_.assign(n, 0);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) fixed_[g.idx(i, j)] = bc_.fixed_node(g, i, j);
  pen_w_.assign(n, 0.0);
  for (int e = 0; e < 4; ++e) {
    if (!bc_.clamped[e]) continue;
    std::vector<double> w = edge_weights(ref_, Edge(e), bc_.measure);
    for (int k = 0; k < n; ++k) pen_w_[k] += w[k];
  }
  beta_ = cfg_.beta < 0.0 ? 100.0 * mat_.mu * mat_.h : cfg_.beta;
  if (load_.A.empty()) {
    load_.A.assign(n, Vec3::Zero());
    load_.B.assign(n, Vec3::Zero());
    load_.zero = true;
  }
  if (int(load_.A.size()) != n || int(load_.B.size()) != n)
    throw ShellError(ErrorKind::Config, "nodal load does not match the grid");
  Vec3 lo = ref_.pts[0].y, hi = lo;
  area_ = 0.0;
  for (int k = 0; k < n; ++k) {
    lo = lo.cwiseMin(ref_.pts[k].y);
    hi = hi.cwiseMax(ref_.pts[k].y);
    area_ += ref_.w[k] * ref_.pts[k].a;
  }
  length_ = std::max((hi - lo).norm(), 1e-300);
}

std::vector<Vec3> ShellProblem::reference_nodes() const {
  std::vector<Vec3> out(ref_.jets.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = ref_.jets[k].p;
  return out;
}

double ShellProblem::gradient_scale() const { return mat_.mu * mat_.h * area_ / length_; }

template <class T>
bool ShellProblem::point_value(int k, const Jet<T>& jet, T& out) const {
  const RefPoint& r = ref_.pts[k];
  DeformedPoint<T> d = deformed_point<T>(jet, r, mat_.h);
  if (!d.ok) return false;
  PointTerms<T> p = point_terms<T>(cfg_.model, d, r, mat_, cfg_.constants);
  T v = ref_.w[k] * (p.shell + p.log + p.det2 + p.constant);
  if (pen_w_[k] != 0.0 || !load_.zero) {
    V3<T> dn = d.f.n - r.n.cast<T>();
    if (pen_w_[k] != 0.0) v += (beta_ * pen_w_[k]) * dot3<T>(dn, dn);
    if (!load_.zero) {
      V3<T> dv = jet.p - r.y.cast<T>();
      v -= dot3<T>(load_.A[k].cast<T>(), dv) + dot3<T>(load_.B[k].cast<T>(), dn);
    }
  }
  out = v;
  return true;
}

namespace {

[[noreturn]] void throw_orientation(const Grid& g, int k) {
  int i = k % g.n1, j = k / g.n1;
  throw OrientationViolation(i, j, g.x1(i), g.x2(j), 0.0,
                             "a_m or A+/- not positive at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

Jet<AD18> seed(const Jetd& j) {
  Jet<AD18> a;
  const Vec3* parts[6] = {&j.p, &j.d1, &j.d2, &j.d11, &j.d12, &j.d22};
  V3<AD18>* out[6] = {&a.p, &a.d1, &a.d2, &a.d11, &a.d12, &a.d22};
  for (int s = 0; s < 6; ++s)
    for (int c = 0; c < 3; ++c) (*out[s])(c) = AD18((*parts[s])(c), 18, 3 * s + c);
  return a;
}

}  // namespace

double ShellProblem::objective(const std::vector<Vec3>& m, Exec ex) const {
  const int n = size();
  std::vector<Jetd> js = diff_.jets(m, ex);
  std::vector<double> vals(n);
  std::vector<char> ok(n);
  for_each_index(ex, n, [&](int k) { ok[k] = point_value<double>(k, js[k], vals[k]); });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) throw_orientation(ref_.grid, k);
  return ordered_sum(vals);
}

double ShellProblem::gradient(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const {
  return gradient(m, g, ex, cfg_.gradient);
}

double ShellProblem::gradient(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex, GradientMode mode) const {
  double f = mode == GradientMode::AD ? gradient_ad(m, g, ex) : gradient_fd(m, g, ex);
  for (int k = 0; k < size(); ++k)
    if (fixed_[k]) g[k].setZero();
  return f;
}

double ShellProblem::gradient_ad(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const {
  const int n = size();
  std::vector<Jetd> js = diff_.jets(m, ex);
  std::vector<double> vals(n), g18(std::size_t(n) * 18);
  std::vector<char> ok(n);
  for_each_index(ex, n, [&](int k) {
    AD18 v;
    ok[k] = point_value<AD18>(k, seed(js[k]), v);
    if (!ok[k]) return;
    vals[k] = v.value();
    for (int c = 0; c < 18; ++c) g18[std::size_t(k) * 18 + c] = v.derivatives()(c);
  });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) throw_orientation(ref_.grid, k);
  g.assign(n, Vec3::Zero());
  const Grid& gr = ref_.grid;
  for (int j = 0; j < gr.n2; ++j)
    for (int i = 0; i < gr.n1; ++i) diff_.scatter(i, j, &g18[std::size_t(gr.idx(i, j)) * 18], g);
  return ordered_sum(vals);
}

double ShellProblem::gradient_fd(const std::vector<Vec3>& m, std::vector<Vec3>& g, Exec ex) const {
  const Grid& gr = ref_.grid;
  const int n = size();
  const double step = cfg_.fd_step * length_;
  g.assign(n, Vec3::Zero());
  std::vector<char> ok(n, 1);
  for_each_index(ex, n, [&](int q) {
    if (fixed_[q]) return;
    const int kk = q % gr.n1, ll = q / gr.n1;
    int i0, i1, j0, j1;
    diff_.support(kk, ll, i0, i1, j0, j1);
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int j = j0; j <= j1 && ok[q]; ++j)
        for (int i = i0; i <= i1; ++i) {
          double fp = 0.0, fm = 0.0;
          for (double sgn : {1.0, -1.0}) {
            auto node = [&](int a, int b) {
              Vec3 v = m[gr.idx(a, b)];
              if (a == kk && b == ll) v(c) += sgn * step;
              return v;
            };
            Jetd jt = diff_.jet_at<double>(node, i, j);
            if (!point_value<double>(gr.idx(i, j), jt, sgn > 0 ? fp : fm)) ok[q] = 0;
          }
          acc += fp - fm;
        }
      g[q](c) = acc / (2.0 * step);
    }
  });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) throw_orientation(gr, k);
  return objective(m, ex);
}

EnergyBreakdown ShellProblem::breakdown(const std::vector<Vec3>& m, Exec ex, bool keep_density) const {
  std::vector<Jetd> js = diff_.jets(m, ex);
  EnergyOptions opt;
  opt.model = cfg_.model;
  opt.constants = cfg_.constants;
  opt.keep_density = keep_density;
  EnergyBreakdown e = internal_energy(js, ref_, mat_, opt, ex);
  e.penalty_term = beta_ * normal_deviation(m, ex);
  e.load_term = load_potential(load_, js, ref_, ex);
  e.total = e.internal() + e.penalty_term - e.load_term;
  return e;
}

double ShellProblem::normal_deviation(const std::vector<Vec3>& m, Exec ex) const {
  const int n = size();
  std::vector<Jetd> js = diff_.jets(m, ex);
  std::vector<double> part(n, 0.0);
  std::vector<char> ok(n, 1);
  for_each_index(ex, n, [&](int k) {
    if (pen_w_[k] == 0.0) return;
    SurfaceFrame<double> f;
    if (!frame_from_jet_checked(js[k], f, kEpsOrient)) {
      ok[k] = 0;
      return;
    }
    part[k] = pen_w_[k] * (f.n - ref_.pts[k].n).squaredNorm();
  });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) throw_orientation(ref_.grid, k);
  return ordered_sum(part);
}

namespace {

double& jet_component(Jetd& j, int c) {
  Vec3* parts[6] = {&j.p, &j.d1, &j.d2, &j.d11, &j.d12, &j.d22};
  return (*parts[c / 3])(c % 3);
}

}  // namespace

Eigen::SparseMatrix<double> ShellProblem::convex_hessian(const std::vector<Vec3>& m, Exec ex) const {
  using Mat18 = Eigen::Matrix<double, 18, 18>;
  const Grid& gr = ref_.grid;
  const int n = size();
  std::vector<Jetd> js = diff_.jets(m, ex);
  std::vector<Mat18> Hk(n);
  std::vector<char> ok(n, 1);
  for_each_index(ex, n, [&](int k) {
    Mat18 Hm;
    for (int c = 0; c < 18; ++c) {
      Jetd jp = js[k], jm = js[k];
      double step = 1e-6 * std::max(1.0, std::abs(jet_component(jp, c)));
      jet_component(jp, c) += step;
      jet_component(jm, c) -= step;
      AD18 vp, vm;
      if (!point_value<AD18>(k, seed(jp), vp) || !point_value<AD18>(k, seed(jm), vm)) {
        ok[k] = 0;
        return;
      }
      Hm.col(c) = (vp.derivatives() - vm.derivatives()) / (2.0 * step);
    }
    Eigen::SelfAdjointEigenSolver<Mat18> es(0.5 * (Hm + Hm.transpose()));
    Hk[k] = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
  });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) throw_orientation(gr, k);

  const int N = 3 * n;
  Eigen::SparseMatrix<double> H(N, N);
  std::vector<Eigen::Triplet<double>> trip;
  auto flush = [&]() {
    Eigen::SparseMatrix<double> part(N, N);
    part.setFromTriplets(trip.begin(), trip.end());
    H += part;
    trip.clear();
  };
  std::vector<GridDiff::Entry> ent;
  // per distinct free node: weight of each jet group
  std::vector<std::pair<int, std::array<double, 6>>> local;
  for (int k = 0; k < n; ++k) {
    diff_.entries(k % gr.n1, k / gr.n1, ent);
    local.clear();
    for (const auto& e : ent) {
      if (fixed_[e.node]) continue;
      auto it = std::find_if(local.begin(), local.end(), [&](const auto& l) { return l.first == e.node; });
      if (it == local.end()) {
        local.emplace_back(e.node, std::array<double, 6>{});
        it = local.end() - 1;
      }
      it->second[e.group] += e.w;
    }
    for (const auto& [q1, w1] : local)
      for (const auto& [q2, w2] : local)
        for (int c1 = 0; c1 < 3; ++c1)
          for (int c2 = 0; c2 < 3; ++c2) {
            double v = 0.0;
            for (int s1 = 0; s1 < 6; ++s1)
              for (int s2 = 0; s2 < 6; ++s2) v += w1[s1] * w2[s2] * Hk[k](3 * s1 + c1, 3 * s2 + c2);
            if (v != 0.0) trip.emplace_back(3 * q1 + c1, 3 * q2 + c2, v);
          }
    if (trip.size() > 2000000) flush();
  }
  flush();
  double dmax = 0.0;
  for (int r = 0; r < N; ++r) dmax = std::max(dmax, H.coeff(r, r));
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < 3; ++c) trip.emplace_back(3 * k + c, 3 * k + c, fixed_[k] ? 1.0 : 1e-10 * dmax);
  flush();
  H.makeCompressed();
  return H;
}

Feasibility ShellProblem::feasibility(const std::vector<Vec3>& m, Exec ex) const {
  const int n = size();
  std::vector<Jetd> js = diff_.jets(m, ex);
  std::vector<double> am(n), A(n), nd(n);
  for_each_index(ex, n, [&](int k) {
    const RefPoint& r = ref_.pts[k];
    SurfaceFrame<double> f;
    if (!frame_from_jet_checked(js[k], f, 0.0)) {
      am[k] = 0.0;
      A[k] = -INFINITY;
      nd[k] = -1.0;
      return;
    }
    Mat2 L = inv2<double>(f.I) * f.II;
    double H = 0.5 * L.trace(), K = L.determinant(), h = mat_.h;
    am[k] = f.a / r.a;
    A[k] = std::min(1.0 + h * H + 0.25 * h * h * K, 1.0 - h * H + 0.25 * h * h * K);
    nd[k] = f.n.dot(r.n);
  });
  Feasibility out;
  out.min_am_ratio = INFINITY;
  out.min_A = INFINITY;
  out.min_normal_dot = INFINITY;
  for (int k = 0; k < n; ++k) {
    bool bad = am[k] < cfg_.eps_feas || A[k] < cfg_.eps_feas || !(nd[k] > 0.0);
    if (bad && out.ok) {
      out.ok = false;
      out.worst = k;
    }
    out.min_am_ratio = std::min(out.min_am_ratio, am[k]);
    out.min_A = std::min(out.min_A, A[k]);
    out.min_normal_dot = std::min(out.min_normal_dot, nd[k]);
  }
  return out;
}

namespace {

std::vector<Vec3> axpy(const std::vector<Vec3>& x, double t, const std::vector<Vec3>& d) {
  std::vector<Vec3> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + t * d[k];
  return y;
}

Eigen::VectorXd flat(const std::vector<Vec3>& v) {
  Eigen::VectorXd out(3 * v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.segment<3>(3 * k) = v[k];
  return out;
}

std::vector<Vec3> unflat(const Eigen::VectorXd& v) {
  std::vector<Vec3> out(v.size() / 3);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.segment<3>(3 * k);
  return out;
}

}  // namespace

double project_admissible(const ShellProblem& p, const std::vector<Vec3>& m, const std::vector<Vec3>& dir, double t0,
                          Exec ex) {
  double t = t0;
  while (!p.feasibility(axpy(m, t, dir), ex).ok) {
    t *= p.config().backtrack;
    if (t < 1e-14) throw ShellError(ErrorKind::StepCollapsed, "feasible step underflowed");
  }
  return t;
}

MinimizeResult minimize(const ShellProblem& p, const std::vector<Vec3>& initial, const SnapshotFn& snapshot) {
  const SolverConfig& cfg = p.config();
  const Exec ex = cfg.exec;
  MinimizeResult res;

  AdmissibilityReport rep = admissibility_report(p.ref(), p.material().h, ConstantsMode::Oracle, ex);
  if (!rep.model_pass(cfg.model)) {
    std::string msg = "h = " + fmt_short(p.material().h) + " is not below h_max = " +
                      fmt_short(rep.model_h_max(cfg.model)) + " for Model " + model_name(cfg.model);
    if (!cfg.force) throw ShellError(ErrorKind::InadmissibleThickness, msg + "\n" + report_text(rep));
    res.warnings.push_back(msg + " (forced)");
  }
  if (int(initial.size()) != p.size())
    throw ShellError(ErrorKind::InadmissibleInitialState, "initial state does not match the grid");
  std::vector<Vec3> y0 = p.reference_nodes();
  for (int k = 0; k < p.size(); ++k)
    if (p.fixed()[k] && initial[k] != y0[k])
      throw ShellError(ErrorKind::InadmissibleInitialState, "initial state differs from y0 on a clamped node");
  Feasibility feas = p.feasibility(initial, ex);
  if (!feas.ok)
    throw ShellError(ErrorKind::InadmissibleInitialState,
                     "initial state violates a_m > 0 or A+/- > 0 at node " + std::to_string(feas.worst));

  std::vector<Vec3> x = initial, gv;
  double f = p.gradient(x, gv, ex);
  Eigen::VectorXd g = flat(gv);
  const double g0 = g.norm();
  const double tol = std::max(cfg.grad_tol * g0, 1e-10 * p.gradient_scale());
  res.trace.push_back({0, f, g0, 0.0, feas.min_am_ratio, feas.min_A});
  res.nodes = x;
  res.reason = StopReason::GradientTolerance;
  if (g0 <= tol) {
    res.final_energy = p.breakdown(x, ex);
    return res;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> pre;
  bool have_pre = false;
  auto build_pre = [&]() {
    have_pre = false;
    if (!cfg.precondition) return;
    Eigen::SparseMatrix<double> H = p.convex_hessian(x, ex);
    pre.compute(H);
    have_pre = pre.info() == Eigen::Success;
    if (!have_pre) res.warnings.push_back("preconditioner factorization failed; using scaled identity");
  };
  build_pre();

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  int stalls = 0;
  res.reason = StopReason::MaxIterations;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (cfg.precondition && cfg.precond_refresh > 0 && it > 1 && (it - 1) % cfg.precond_refresh == 0) build_pre();
    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(S.size());
    for (int k = int(S.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * S[k].dot(q);
      q -= alpha[k] * Y[k];
    }
    double gamma = S.empty() ? 0.01 * p.length_scale() / g.norm() : S.back().dot(Y.back()) / Y.back().squaredNorm();
    Eigen::VectorXd d = have_pre ? Eigen::VectorXd(pre.solve(q)) : Eigen::VectorXd(gamma * q);
    for (std::size_t k = 0; k < S.size(); ++k) {
      double b = rho[k] * Y[k].dot(d);
      d += (alpha[k] - b) * S[k];
    }
    d = -d;
    double gd = g.dot(d);
    if (!(gd < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = have_pre ? Eigen::VectorXd(-pre.solve(g)) : Eigen::VectorXd(-(0.01 * p.length_scale() / g.norm()) * g);
      gd = g.dot(d);
    }
    std::vector<Vec3> dv = unflat(d);
    double t;
    try {
      t = project_admissible(p, x, dv, 1.0, ex);
    } catch (const ShellError&) {
      res.reason = StopReason::StepCollapsed;
      break;
    }
    std::vector<Vec3> xn;
    double fn = 0.0;
    bool accepted = false;
    while (t >= 1e-14) {
      xn = axpy(x, t, dv);
      try {
        fn = p.objective(xn, ex);
        if (fn <= f + cfg.c1 * t * gd) {
          accepted = true;
          break;
        }
      } catch (const OrientationViolation&) {
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      res.reason = StopReason::StepCollapsed;
      break;
    }
    std::vector<Vec3> gnv;
    fn = p.gradient(xn, gnv, ex);
    Eigen::VectorXd gn = flat(gnv);
    Eigen::VectorXd s = flat(xn) - flat(x), y = gn - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho.push_back(1.0 / sy);
      if (int(S.size()) > cfg.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    } else {
      S.clear();
      Y.clear();
      rho.clear();
    }
    double df = f - fn;
    x = std::move(xn);
    f = fn;
    g = gn;
    Feasibility fe = p.feasibility(x, ex);
    res.trace.push_back({it, f, g.norm(), t, fe.min_am_ratio, fe.min_A});
    res.iterations = it;
    if (snapshot && cfg.snapshot_every > 0 && it % cfg.snapshot_every == 0) snapshot(it, x);
    if (g.norm() <= tol) {
      res.reason = StopReason::GradientTolerance;
      break;
    }
    stalls = df <= 1e-15 * std::max(std::abs(f), p.gradient_scale() * p.length_scale()) ? stalls + 1 : 0;
    if (stalls >= 10) {
      res.reason = StopReason::NoProgress;
      break;
    }
  }
  res.nodes = x;
  res.final_energy = p.breakdown(x, ex);
  return res;
}

}  // namespace shellred
