// stmcflow <config-path> [--override section.key=value]...
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 non-convergence.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stmc/config.hpp"
#include "stmc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"volume-preserving generalized mean curvature flow driver"};
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("config", config_path, "path to the sectioned key=value config")
      ->required();
  app.add_option("--override", overrides,
                 "override a config entry, e.g. --override flow.q=4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  try {
    stmc::RunConfig cfg = stmc::parse_config(buf.str(), overrides);
    int rc = stmc::execute(cfg);
    if (rc == 0)
      std::cout << "ok: artifacts in " << cfg.output_dir << "\n";
    else
      std::cerr << "failed with exit code " << rc << "; see " << cfg.output_dir
                << "/FAILED\n";
    return rc;
  } catch (const stmc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
