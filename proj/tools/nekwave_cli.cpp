#include "nekwave/cli_io.hpp"
#include "nekwave/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

std::vector<std::string> split_formats(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for Nekrasov-type periodic wave equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> mode;
  std::optional<int> order;
  std::optional<double> depth;
  std::optional<double> wavelength;
  std::optional<int> steps;
  std::optional<std::string> formats;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "Characteristic values of the linearized problem"},
      {"series", "Recurrent power series of the branch leaving mode n"},
      {"branching", "Roots of the branching equation and the series cross-check"},
      {"continue", "Pseudo-arclength continuation of the branch leaving mode n"},
      {"verify", "Cross-check battery"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--n", mode, "Mode index");
    sub->add_option("--order", order, "Series order K");
    sub->add_option("--depth", depth, "Fluid depth h (selects finite depth)");
    sub->add_option("--wavelength", wavelength, "Wavelength L (selects finite depth)");
    sub->add_option("--steps", steps, "Continuation step budget");
    sub->add_option("--format", formats, "Output formats, e.g. csv,json");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nekwave::RunConfig cfg;
  nekwave::ResultDocument doc;
  try {
    if (!config_path.empty()) cfg = nekwave::load_config(config_path);
    if (out_dir) cfg.out_dir = *out_dir;
    if (mode) cfg.mode = *mode;
    if (order) cfg.order = *order;
    if (steps) cfg.max_steps = *steps;
    if (depth || wavelength) {
      cfg.finite_depth = true;
      if (depth) cfg.depth = *depth;
      if (wavelength) cfg.wavelength = *wavelength;
    }
    if (formats) {
      cfg.write_csv = cfg.write_json = false;
      for (const auto& f : split_formats(*formats)) {
        if (f == "csv")
          cfg.write_csv = true;
        else if (f == "json")
          cfg.write_json = true;
        else
          throw nekwave::ConfigError("unknown output format '" + f + "'");
      }
    }
    nekwave::validate(cfg);
  } catch (const nekwave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    doc = nekwave::run_command(command, cfg);
    for (const auto& path : nekwave::write_outputs(doc, cfg)) std::cout << path << "\n";
  } catch (const nekwave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nekwave::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!doc.ok) {
    std::cerr << command << ": numerical checks failed\n";
    return 1;
  }
  return 0;
}
