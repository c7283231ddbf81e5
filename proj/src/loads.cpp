#include "shellred/loads.hpp"

namespace shellred {

Vec3 Profile::at(double x3) const {
  Vec3 v = Vec3::Zero();
  double p = 1.0;
  for (const Vec3& c : coeff) {
    v += p * c;
    p *= x3;
  }
  return v;
}

bool LoadSpec::empty() const {
  auto zero = [](const Profile& p) {
    for (const Vec3& c : p.coeff)
      if (!c.isZero(0.0)) return false;
    return true;
  };
  if (!node_f.empty() || !node_mom.empty()) return false;
  if (direct) return f_bar.isZero(0.0) && f_mom.isZero(0.0) && t_bar.isZero(0.0) && t_mom.isZero(0.0);
  return zero(body) && zero(lateral) && t_plus.isZero(0.0) && t_minus.isZero(0.0);
}

LoadResultants reduce_loads(const LoadSpec& spec, double h, const ThicknessQuadrature& quad) {
  LoadResultants r;
  if (spec.direct) {
    r.f_bar = spec.f_bar;
    r.f_mom = spec.f_mom;
    r.t_bar = spec.t_bar;
    r.t_mom = spec.t_mom;
    return r;
  }
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    double x = quad.nodes[k], w = quad.weights[k];
    Vec3 f = spec.body.at(x), t = spec.lateral.at(x);
    r.f_bar += w * f;
    r.f_mom += (w * x) * f;
    r.t_bar += w * t;
    r.t_mom += (w * x) * t;
  }
  r.f_bar += spec.t_plus + spec.t_minus;
  r.f_mom += 0.5 * h * (spec.t_plus - spec.t_minus);
  return r;
}

bool BoundarySpec::fixed_node(const Grid& g, int i, int j) const {
  return (i == 0 && clamped[0]) || (i == g.n1 - 1 && clamped[1]) || (j == 0 && clamped[2]) ||
         (j == g.n2 - 1 && clamped[3]);
}

Edge parse_edge(const std::string& s) {
  if (s == "left") return Edge::Left;
  if (s == "right") return Edge::Right;
  if (s == "bottom") return Edge::Bottom;
  if (s == "top") return Edge::Top;
  throw ShellError(ErrorKind::Config, "unknown edge '" + s + "' (left, right, bottom, top)");
}

const char* edge_name(Edge e) {
  switch (e) {
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    case Edge::Bottom: return "bottom";
    case Edge::Top: return "top";
  }
  return "?";
}

std::vector<double> edge_weights(const ReferenceField& ref, Edge e, EdgeMeasure measure) {
  const Grid& g = ref.grid;
  std::vector<double> out(g.size(), 0.0);
  const bool vertical = e == Edge::Left || e == Edge::Right;  // runs along x2
  const int n = vertical ? g.n2 : g.n1;
  std::vector<double> w = simpson_weights(n, vertical ? g.dx2() : g.dx1());
  for (int s = 0; s < n; ++s) {
    int i = vertical ? (e == Edge::Left ? 0 : g.n1 - 1) : s;
    int j = vertical ? s : (e == Edge::Bottom ? 0 : g.n2 - 1);
    int k = g.idx(i, j);
    double ds = measure == EdgeMeasure::Surface ? ref.pts[k].dy.col(vertical ? 1 : 0).norm() : 1.0;
    out[k] = w[s] * ds;
  }
  return out;
}

NodalLoad assemble_loads(const LoadResultants& res, const LoadSpec& spec, const ReferenceField& ref,
                         const BoundarySpec& bc) {
  const int n = ref.grid.size();
  NodalLoad L;
  L.A.assign(n, Vec3::Zero());
  L.B.assign(n, Vec3::Zero());
  if (!spec.node_f.empty() && int(spec.node_f.size()) != n)
    throw ShellError(ErrorKind::Config, "per-node load field does not match the grid");
  if (!spec.node_mom.empty() && int(spec.node_mom.size()) != n)
    throw ShellError(ErrorKind::Config, "per-node moment field does not match the grid");
  for (int k = 0; k < n; ++k) {
    Vec3 f = res.f_bar, m = res.f_mom;
    if (!spec.node_f.empty()) f += spec.node_f[k];
    if (!spec.node_mom.empty()) m += spec.node_mom[k];
    L.A[k] = ref.w[k] * f;
    L.B[k] = ref.w[k] * m;
  }
  for (int e = 0; e < 4; ++e) {
    if (bc.clamped[e]) continue;
    std::vector<double> ew = edge_weights(ref, Edge(e), bc.measure);
    for (int k = 0; k < n; ++k) {
      L.A[k] += ew[k] * res.t_bar;
      L.B[k] += ew[k] * res.t_mom;
    }
  }
  L.zero = true;
  for (int k = 0; k < n && L.zero; ++k) L.zero = L.A[k].isZero(0.0) && L.B[k].isZero(0.0);
  return L;
}

double load_potential(const NodalLoad& load, const std::vector<Jetd>& mjets, const ReferenceField& ref, Exec ex) {
  const int n = ref.grid.size();
  if (load.zero) return 0.0;
  std::vector<double> part(n);
  std::vector<char> ok(n, 1);
  for_each_index(ex, n, [&](int k) {
    SurfaceFrame<double> f;
    if (!frame_from_jet_checked(mjets[k], f, kEpsOrient)) {
      ok[k] = 0;
      return;
    }
    part[k] = load.A[k].dot(mjets[k].p - ref.pts[k].y) + load.B[k].dot(f.n - ref.pts[k].n);
  });
  for (int k = 0; k < n; ++k)
    if (!ok[k]) {
      int i = k % ref.grid.n1, j = k / ref.grid.n1;
      throw OrientationViolation(i, j, ref.grid.x1(i), ref.grid.x2(j), 0.0, "degenerate deformed tangent plane");
    }
  return ordered_sum(part);
}

LoadPotential load_potential_parts(const LoadResultants& res, const LoadSpec& spec, const std::vector<Vec3>& m,
                                   const std::vector<Vec3>& n_m, const ReferenceField& ref, const BoundarySpec& bc) {
  const int n = ref.grid.size();
  std::vector<double> area(n), edge(n, 0.0);
  std::vector<std::vector<double>> ew;
  for (int e = 0; e < 4; ++e)
    if (!bc.clamped[e]) ew.push_back(edge_weights(ref, Edge(e), bc.measure));
  for (int k = 0; k < n; ++k) {
    Vec3 v = m[k] - ref.pts[k].y, dn = n_m[k] - ref.pts[k].n;
    Vec3 f = res.f_bar, mo = res.f_mom;
    if (!spec.node_f.empty()) f += spec.node_f[k];
    if (!spec.node_mom.empty()) mo += spec.node_mom[k];
    area[k] = ref.w[k] * (f.dot(v) + mo.dot(dn));
    double s = 0.0;
    for (const auto& w : ew) s += w[k];
    edge[k] = s * (res.t_bar.dot(v) + res.t_mom.dot(dn));
  }
  LoadPotential p;
  p.area = ordered_sum(area);
  p.edge = ordered_sum(edge);
  p.total = p.area + p.edge;
  return p;
}

}  // namespace shellred
