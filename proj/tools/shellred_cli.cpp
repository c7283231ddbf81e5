#include <iostream>

#include "CLI11.hpp"
#include "shellred/run_config.hpp"

using namespace shellred;

int main(int argc, char** argv) {
  CLI::App app{"Reduced shell energies: admissibility checks, 3D comparison, minimization"};
  app.require_subcommand(1);
  app.fallthrough();
  CommandOptions opt;
  std::string model, constants;
  app.add_option("--config", opt.config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", opt.overrides, "override a config key (key=value), repeatable");
  app.add_option("--model", model, "reduced model")->check(CLI::IsMember({"1", "2", "3"}));
  app.add_option("--constants", constants, "constant-term mode")->check(CLI::IsMember({"paper", "oracle"}));
  app.add_option("--threads", opt.threads, "worker threads (default: hardware count)");
  app.add_flag("--force", opt.force, "minimize even when the thickness check fails");
  app.add_option("--out", opt.out_dir, "output directory");

  const char* cmds[][2] = {{"check", "thickness admissibility report"},
                           {"energy", "energy breakdown of a deformation"},
                           {"compare3d", "reduced models against the 3D integral"},
                           {"minimize", "minimize the reduced energy"},
                           {"loads-reduce", "thickness-reduced load resultants"}};
  for (auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    if (std::string(c[0]) == "energy") {
      sub->add_option("--deformation", opt.deformation, "deformed surface (VTK); default y0");
      sub->add_flag("--density", opt.density, "also write the energy density field");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (!model.empty()) opt.model = parse_model(model);
    if (!constants.empty()) opt.constants = parse_constants(constants);
  } catch (const ShellError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return run_command(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
