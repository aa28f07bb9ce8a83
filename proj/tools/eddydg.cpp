#include "eddydg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"Interior penalty DG eddy current solver"};
  std::string config_path;
  app.allow_extras();
  app.usage("eddydg [config-file] [--key value ...]");
  app.footer("Every configuration key can be overridden with --key value or --section.key value.");
  try {
    // Only a leading non-option argument is the config file.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && args.front().rfind("-", 0) != 0) {
      config_path = args.front();
      args.erase(args.begin());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    eddydg::ConfigTable table;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw eddydg::ConfigError("cannot read config file " + config_path);
      std::ostringstream text;
      text << in.rdbuf();
      table = eddydg::parse_config_text(text.str());
    }
    eddydg::apply_overrides(table, app.remaining());
    return eddydg::run(eddydg::make_run_config(table));
  } catch (const eddydg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
}
