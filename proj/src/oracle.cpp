#include "shellred/oracle.hpp"

#include <cmath>

namespace shellred {

ThicknessQuadrature ThicknessQuadrature::gauss(int n, double h) {
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  ThicknessQuadrature q;
  q.rule = Rule::GaussLegendre;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double v = es.eigenvectors()(0, k);
    q.nodes[k] = 0.5 * h * es.eigenvalues()(k);
    q.weights[k] = h * v * v;  // 2 v^2 on [-1,1], scaled by h/2
  }
  // symmetrize to remove eigen-solver round-off in the node pairs
  for (int k = 0; k < n / 2; ++k) {
    int l = n - 1 - k;
    double x = 0.5 * (q.nodes[l] - q.nodes[k]);
    double w = 0.5 * (q.weights[l] + q.weights[k]);
    q.nodes[k] = -x;
    q.nodes[l] = x;
    q.weights[k] = q.weights[l] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

ThicknessQuadrature ThicknessQuadrature::simpson(int n, double h) {
  ThicknessQuadrature q;
  q.rule = Rule::Simpson;
  q.weights = simpson_weights(n, h / (n - 1));
  q.nodes.resize(n);
  for (int k = 0; k < n; ++k) q.nodes[k] = -0.5 * h + k * h / (n - 1);
  return q;
}

double w_cg(const Mat3& F, const Material& mat) {
  double J = F.determinant();
  if (!(J > 0.0)) throw ShellError(ErrorKind::NonPositiveDeterminant, "det F = " + std::to_string(J));
  double lj = std::log(J);
  return 0.5 * mat.mu * (F.squaredNorm() - 2.0 * lj - 3.0) + 0.25 * mat.lambda * (J * J - 2.0 * lj - 1.0);
}

namespace {

Mat3 frame_matrix(const Mat32& dy, const Vec3& n) {
  Mat3 M;
  M.leftCols<2>() = dy;
  M.col(2) = n;
  return M;
}

}  // namespace

Mat3 grad_theta_inverse(const RefPoint& r, double x3) {
  double b = 1.0 - 2.0 * r.H * x3 + r.K * x3 * x3;
  Mat3 P = Mat3::Identity() + x3 * (lift_flat(r.L) - 2.0 * r.H * Mat3::Identity());
  P(2, 2) += r.K * x3 * x3;
  // (grad y0 | n0)^{-1} has rows I^{-1} grad y0^T and n0^T
  Mat3 Ainv;
  Ainv.topRows<2>() = r.Iinv * r.dy.transpose();
  Ainv.row(2) = r.n.transpose();
  return P * Ainv / b;
}

AnsatzPoint ansatz_point(const DeformedPoint<double>& m, const RefPoint& r, double x3, InverseMode mode) {
  AnsatzPoint p;
  p.x3 = x3;
  p.b = 1.0 - 2.0 * r.H * x3 + r.K * x3 * x3;
  p.B = lift_flat(r.L) - 2.0 * r.H * Mat3::Identity();
  Mat32 dth = r.dy + x3 * r.dn;
  p.grad_theta = frame_matrix(dth, r.n);
  Mat32 dph = m.f.dy + x3 * m.f.dn;
  p.grad_phi = frame_matrix(dph, m.f.n);
  if (mode == InverseMode::Direct) {
    p.F = p.grad_theta.transpose().partialPivLu().solve(p.grad_phi.transpose()).transpose();
  } else {
    p.F = p.grad_phi * grad_theta_inverse(r, x3);
    if (mode == InverseMode::CrossCheck) {
      Mat3 Fd = p.grad_theta.transpose().partialPivLu().solve(p.grad_phi.transpose()).transpose();
      if ((Fd - p.F).norm() > 1e-10 * std::max(1.0, Fd.norm()))
        throw ShellError(ErrorKind::NonPositiveDeterminant, "closed-form inverse of grad Theta disagrees with direct solve");
    }
  }
  p.detF = p.F.determinant();
  return p;
}

Oracle3D integrate_thickness(const DeformedPoint<double>& m, const RefPoint& r, const Material& mat,
                             const ThicknessQuadrature& quad, InverseMode mode) {
  Oracle3D o;
  const double clog = -(mat.mu + 0.5 * mat.lambda);
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    AnsatzPoint p = ansatz_point(m, r, quad.nodes[k], mode);
    if (!(p.detF > 0.0)) throw OrientationViolation(-1, -1, 0, 0, p.x3, "det F not positive");
    double wt = quad.weights[k] * p.b;
    double lj = std::log(p.detF);
    double tr = 0.5 * mat.mu * (p.F.squaredNorm() - 3.0);
    double lg = clog * lj;
    double d2 = 0.25 * mat.lambda * (p.detF * p.detF - 1.0);
    o.trace_part += wt * tr;
    o.log_part += wt * lg;
    o.det2_part += wt * d2;
    o.total += wt * (tr + lg + d2);
  }
  return o;
}

Oracle3D integrate_3d(const std::vector<Jetd>& mjets, const ReferenceField& ref, const Material& mat,
                      const ThicknessQuadrature& quad, Exec ex, InverseMode mode) {
  const int n = ref.grid.size();
  std::vector<double> tot(n), tr(n), lg(n), d2(n);
  std::vector<double> bad_x3(n, 0.0);
  std::vector<char> ok(n, 1);
  for_each_index(ex, n, [&](int k) {
    const RefPoint& r = ref.pts[k];
    DeformedPoint<double> m = deformed_point<double>(mjets[k], r, mat.h);
    if (!m.ok && !(m.f.a > kEpsOrient)) {
      ok[k] = 0;
      return;
    }
    try {
      Oracle3D o = integrate_thickness(m, r, mat, quad, mode);
      double s = ref.w[k] * r.a;
      tot[k] = s * o.total;
      tr[k] = s * o.trace_part;
      lg[k] = s * o.log_part;
      d2[k] = s * o.det2_part;
    } catch (const OrientationViolation& e) {
      ok[k] = 0;
      bad_x3[k] = e.x3;
    }
  });
  for (int k = 0; k < n; ++k) {
    if (!ok[k]) {
      int i = k % ref.grid.n1, j = k / ref.grid.n1;
      throw OrientationViolation(i, j, ref.grid.x1(i), ref.grid.x2(j), bad_x3[k],
                                 "det F not positive at node (" + std::to_string(i) + ", " + std::to_string(j) +
                                     "), x3 = " + std::to_string(bad_x3[k]));
    }
  }
  Oracle3D o;
  o.total = ordered_sum(tot);
  o.trace_part = ordered_sum(tr);
  o.log_part = ordered_sum(lg);
  o.det2_part = ordered_sum(d2);
  return o;
}

Alphas trace_expansion_alpha(double H, double K, double h) {
  const double h3 = h * h * h, h5 = h3 * h * h;
  Alphas a;
  a.a[0] = h + h3 / 12.0 * (4.0 * H * H - K) + h5 / 80.0 * (K * K - 12.0 * H * H * K + 16.0 * H * H * H * H);
  a.a[1] = h3 / 12.0 * (2.0 * H) + h5 / 80.0 * (8.0 * H * H * H - 4.0 * H * K);
  a.a[2] = h3 / 12.0 + h5 / 80.0 * (4.0 * H * H - K);
  a.a[3] = h5 / 80.0 * (2.0 * H);
  a.a[4] = h5 / 80.0;
  a.table = shell_coeffs(Model::I, ConstantsMode::Paper, h, H, K);
  return a;
}

TaylorC det2_taylor_coeffs(double H, double K, double dH, double dK) {
  TaylorC c;
  c.c1 = -4.0 * dH;
  c.c2 = -8.0 * H * dH + 4.0 * dH * dH + 2.0 * dK;
  c.c3 = -16.0 * H * H * dH + 16.0 * H * dH * dH + 4.0 * K * dH + 4.0 * H * dK - 4.0 * dH * dK;
  c.c4 = -32.0 * H * H * H * dH + 48.0 * H * H * dH * dH + 8.0 * H * H * dK + 16.0 * H * K * dH -
         16.0 * H * dH * dK - 8.0 * K * dH * dH - 2.0 * K * dK + dK * dK;
  return c;
}

double logdet_taylor_reduction(double a_m, double a_y0, double H, double K, double dH, double dK, double h) {
  const double h3 = h * h * h, h5 = h3 * h * h;
  const double lr = std::log(a_m / a_y0);
  const double dH2 = dH * dH;
  return a_y0 * (h * lr + h3 / 12.0 * (K * lr + dK - 2.0 * dH2) +
                 h5 / 80.0 *
                     (-4.0 * dH2 * dH2 - 32.0 / 3.0 * H * dH2 * dH + (2.0 * K - 8.0 * H * H) * dH2 + 4.0 * H * dH * dK +
                      4.0 * dH2 * dK - 0.5 * dK * dK));
}

double simpson_thickness(const std::function<double(double)>& f, double h) {
  return h / 6.0 * (f(-0.5 * h) + 4.0 * f(0.0) + f(0.5 * h));
}

}  // namespace shellred
