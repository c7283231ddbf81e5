#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shellred/io.hpp"
#include "shellred/minimizer.hpp"

namespace shellred {

struct RunConfig {
  ChartSpec chart;
  int n1 = 33, n2 = 33;
  int fd_order = 4;
  Material mat;
  Model model = Model::I;
  ConstantsMode constants = ConstantsMode::Oracle;
  LoadSpec load;
  int load_gauss = 16;
  BoundarySpec bc;
  SolverConfig solver;
  std::string out_dir;
  std::string deformation;  // energy input (VTK); empty means y0
  std::vector<double> compare_h{0.04, 0.02, 0.01, 0.005};
  double compare_amplitude = 0.05;

  static RunConfig from(const Config& c);
  void validate() const;
};

// "x y z" or "x, y, z"
Vec3 parse_vec3(const std::string& s, const std::string& key = "value");
// "v0; v1; ..." as x3-power coefficients
Profile parse_profile(const std::string& s, const std::string& key);
Model parse_model(const std::string& s);
ConstantsMode parse_constants(const std::string& s);
std::vector<double> parse_list(const std::string& s, const std::string& key);

struct CommandOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "key=value", applied after the file
  std::optional<Model> model;
  std::optional<ConstantsMode> constants;
  int threads = 0;
  bool force = false;
  std::string out_dir;
  std::string deformation;
  bool density = false;
};

int exit_code(ErrorKind k);

// Runs one of check, energy, compare3d, minimize, loads-reduce; returns the process exit code.
int run_command(const std::string& cmd, const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace shellred
