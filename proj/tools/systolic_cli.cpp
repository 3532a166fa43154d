// systolic: command-line front end.
//
//   systolic <command> [key=value ...] [--config FILE] [--output FILE] [--csv FILE]
//            [--seed N] [--budget N] [--perturb-density F] [--uniform-density]
//
// Settings are applied in order: config file, then key=value arguments, then
// flags. Exit status: 0 success, 1 failed checks, 2 input error.

#include "systolic/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Systoles, systolic geodesics and extremality certificates of singular Klein-bottle metrics"};
  std::string command, config_path, output, csv, seed, budget, perturb;
  std::vector<std::string> settings;
  bool uniform = false;
  app.add_option("command", command, "systole | ratio | flat-optimum | trace-geodesic | verify-extremality | coverage");
  app.add_option("settings", settings, "key=value settings");
  app.add_option("--config", config_path, "key=value config file ('#' comments)");
  app.add_option("--output", output, "JSON report path (default stdout)");
  app.add_option("--csv", csv, "trace-geodesic CSV path (default stdout)");
  app.add_option("--seed", seed, "random seed (default 0)");
  app.add_option("--budget", budget, "flat-optimum evaluation budget");
  app.add_option("--perturb-density", perturb, "scale the band density by this factor");
  app.add_flag("--uniform-density", uniform, "replace the band density by a constant of equal mass");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : systolic::kExitInputError;
  }

  // With the command in the config file the first argument may be a setting.
  if (command.find('=') != std::string::npos) {
    settings.insert(settings.begin(), command);
    command.clear();
  }

  systolic::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw systolic::InputError("cannot read config file '" + config_path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      systolic::apply_config_text(cfg, ss.str(), config_path);
      if (cfg.given.empty() && command.empty() && settings.empty()) systolic::require_complete(cfg);
    }
    if (!command.empty()) systolic::apply_setting(cfg, "command", command, "argument");
    for (const auto& s : settings) systolic::apply_token(cfg, s, "argument");
    auto flag = [&cfg](const std::string& key, const std::string& value, const char* name) {
      if (!value.empty()) systolic::apply_setting(cfg, key, value, std::string("flag ") + name);
    };
    flag("output", output, "--output");
    flag("csv", csv, "--csv");
    flag("seed", seed, "--seed");
    flag("budget", budget, "--budget");
    flag("perturb_density", perturb, "--perturb-density");
    if (uniform) systolic::apply_setting(cfg, "uniform_density", "true", "flag --uniform-density");
  } catch (const systolic::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return systolic::kExitInputError;
  }
  return systolic::run(cfg, std::cout, std::cerr);
}
