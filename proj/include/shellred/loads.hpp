#pragma once

#include <array>
#include <string>
#include <vector>

#include "shellred/oracle.hpp"

namespace shellred {

// x3-polynomial profile: value(x3) = sum_k coeff[k] x3^k.
struct Profile {
  std::vector<Vec3> coeff;
  Vec3 at(double x3) const;
};

// 3D load description (force per volume, per area) or directly its resultants.
struct LoadSpec {
  Profile body;                 // f~ (uniform over omega)
  Vec3 t_plus = Vec3::Zero();   // traction on x3 = +h/2
  Vec3 t_minus = Vec3::Zero();  // traction on x3 = -h/2
  Profile lateral;              // t~ on gamma_t x (-h/2, h/2)
  bool direct = false;          // use the resultants below instead of reducing
  Vec3 f_bar = Vec3::Zero(), f_mom = Vec3::Zero(), t_bar = Vec3::Zero(), t_mom = Vec3::Zero();
  // optional per-node resultants (grid order), added to the uniform ones
  std::vector<Vec3> node_f, node_mom;

  bool empty() const;
};

struct LoadResultants {
  Vec3 f_bar = Vec3::Zero();  // int f~ dx3 + (t+ + t-)
  Vec3 f_mom = Vec3::Zero();  // int x3 f~ dx3 + (h/2)(t+ - t-)
  Vec3 t_bar = Vec3::Zero();  // int t~ dx3
  Vec3 t_mom = Vec3::Zero();  // int x3 t~ dx3
};

LoadResultants reduce_loads(const LoadSpec& spec, double h, const ThicknessQuadrature& quad);

enum class Edge { Left = 0, Right = 1, Bottom = 2, Top = 3 };  // x1 = a1, x1 = b1, x2 = a2, x2 = b2
enum class EdgeMeasure { Surface, Parameter };

// gamma_d (clamped) edges; the remaining edges form gamma_t.
struct BoundarySpec {
  std::array<bool, 4> clamped{true, true, true, true};
  EdgeMeasure measure = EdgeMeasure::Surface;

  bool is_clamped(Edge e) const { return clamped[int(e)]; }
  bool any_clamped() const { return clamped[0] || clamped[1] || clamped[2] || clamped[3]; }
  bool fixed_node(const Grid& g, int i, int j) const;
};

Edge parse_edge(const std::string& s);
const char* edge_name(Edge e);

// Simpson weights of the line integral along an edge, with ds = |d y0 / d tau| d tau for Surface measure.
// Returned per grid node (zero off the edge).
std::vector<double> edge_weights(const ReferenceField& ref, Edge e, EdgeMeasure measure);

// L = sum_k <A_k, m_k - y0_k> + <B_k, n_m,k - n_y0,k>.
struct NodalLoad {
  std::vector<Vec3> A, B;
  bool zero = true;
};

NodalLoad assemble_loads(const LoadResultants& res, const LoadSpec& spec, const ReferenceField& ref,
                         const BoundarySpec& bc);

struct LoadPotential {
  double total = 0, area = 0, edge = 0;
};

// The normals n_m come from the jets of m.
double load_potential(const NodalLoad& load, const std::vector<Jetd>& mjets, const ReferenceField& ref,
                      Exec ex = Exec::Serial);
// Area and gamma_t parts separately, from nodal displacements and normals.
LoadPotential load_potential_parts(const LoadResultants& res, const LoadSpec& spec, const std::vector<Vec3>& m,
                                   const std::vector<Vec3>& n_m, const ReferenceField& ref, const BoundarySpec& bc);

}  // namespace shellred
