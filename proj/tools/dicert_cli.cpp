// Configuration-driven batch runner for device-independent entropy bounds.
// Thin wrapper over the dicert C API: reads a JSON run configuration,
// applies command-line overrides, executes the sweep, writes CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dicert.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dicert: entropy certification from Bell statistics"};

  std::string config_path;
  std::string export_dir;
  std::string output_override;
  std::string mode_override;
  int workers = 0;
  int level = 0;
  int nodes = 0;
  bool print_config = false;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--export-sdpa", export_dir,
                 "write SDP instances in sparse SDPA format and skip solving");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--level", level, "relaxation level");
  app.add_option("--nodes", nodes, "integration grid nodes");
  app.add_option("--mode", mode_override, "joint or per_node");
  app.add_option("--output", output_override, "CSV output path");
  app.add_flag("--print-config", print_config,
               "print the effective configuration (all defaults explicit) and exit");

  CLI11_PARSE(app, argc, argv);

  nlohmann::json cfg;
  if (!config_path.empty()) {
    try {
      cfg = nlohmann::json::parse(read_file(config_path));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  } else if (!print_config) {
    std::cerr << "config error: --config is required (or use --print-config)\n";
    return 2;
  }

  if (workers > 0) cfg["workers"] = workers;
  if (level > 0) cfg["level"] = level;
  if (nodes > 0) cfg["grid"]["nodes"] = nodes;
  if (!mode_override.empty()) cfg["mode"] = mode_override;
  if (!output_override.empty()) cfg["output"] = output_override;

  if (print_config) {
    // Round-trip through the library so every default becomes explicit.
    char* defaults = nullptr;
    if (dc_default_config(&defaults) != DC_OK) {
      std::cerr << "error: " << dc_error_message() << "\n";
      return 2;
    }
    nlohmann::json full = nlohmann::json::parse(defaults);
    dc_string_free(defaults);
    for (auto& [key, value] : cfg.items()) {
      if (full.contains(key) && full[key].is_object() && value.is_object()) {
        for (auto& [k2, v2] : value.items()) full[key][k2] = v2;
      } else {
        full[key] = value;
      }
    }
    std::cout << full.dump(2) << "\n";
    return 0;
  }

  int exit_code = 0;
  char* csv = nullptr;
  char* log = nullptr;
  dc_status st = dc_run_config(cfg.dump().c_str(),
                               export_dir.empty() ? nullptr : export_dir.c_str(),
                               &exit_code, &csv, &log);
  if (log && log[0] != '\0') std::cerr << log;
  if (st != DC_OK && exit_code == 0) {
    std::cerr << "error: " << dc_error_message() << "\n";
    dc_string_free(csv);
    dc_string_free(log);
    return 3;
  }
  if (csv && csv[0] != '\0') std::cout << csv;
  dc_string_free(csv);
  dc_string_free(log);
  return exit_code;
}
