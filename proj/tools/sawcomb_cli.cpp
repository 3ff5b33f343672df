#include <CLI11.hpp>
#include <yaml-cpp/exceptions.h>

#include <fstream>
#include <iostream>

#include "sawcomb/errors.hpp"
#include "sawcomb/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sawcomb: multimode SAW parametric network simulator"};
  app.require_subcommand(1);

  std::string run_path, validate_path, demo_name, demo_out;
  auto* run = app.add_subcommand("run", "run a scenario and write its report");
  run->add_option("config", run_path, "scenario file")->required();
  auto* validate = app.add_subcommand("validate", "parse and validate a scenario");
  validate->add_option("config", validate_path, "scenario file")->required();
  auto* demo = app.add_subcommand("demo", "print a ready-made scenario");
  demo->add_option("pipeline", demo_name, "twomode, multimode, calibration or scattering")->required();
  demo->add_option("-o,--output", demo_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto rep = sawcomb::run_scenario(sawcomb::load_config(run_path));
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << rep.pipeline << ": wrote " << rep.files.size() << " files to " << rep.output_dir.string() << "\n";
    } else if (*validate) {
      const auto cfg = sawcomb::load_config(validate_path);
      std::cout << validate_path << ": ok (" << sawcomb::pipeline_name(cfg.pipeline) << ")\n";
    } else if (*demo) {
      const std::string text = sawcomb::demo_config(sawcomb::parse_pipeline(demo_name));
      if (demo_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(demo_out, std::ios::binary);
        if (!f) throw sawcomb::ConfigError("cannot write " + demo_out);
        f << text;
      }
    }
  } catch (const sawcomb::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
