#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rotorsim/errors.hpp"
#include "rotorsim/scenario.hpp"
#include "rotorsim/version.hpp"

namespace {

struct RunFlags {
  std::string target;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  bool no_write = false;
  bool print_json = false;
};

void add_run_options(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("target", flags.target, "scenario file or preset name")->required();
  cmd->add_option("--seed", flags.seed, "override the scenario seed");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--format", flags.format, "table output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--no-write", flags.no_write, "do not write any files");
  cmd->add_flag("--json", flags.print_json, "print the full result document to stdout");
}

int run_target(const RunFlags& flags, bool require_sweep) {
  const nlohmann::json doc = rotorsim::resolve_scenario(flags.target);
  if (require_sweep && doc.value("kind", "") != "sweep")
    throw rotorsim::ConfigError("'" + flags.target + "' is not a sweep scenario");

  rotorsim::RunOptions options;
  options.seed = flags.seed;
  options.threads = flags.threads;
  options.format = flags.format;
  if (flags.out_dir) options.out_dir = *flags.out_dir;
  options.write_files = !flags.no_write;

  const rotorsim::ScenarioOutcome out = rotorsim::run_scenario(doc, options);
  if (flags.print_json) {
    std::cout << out.document.dump(2) << "\n";
  } else {
    const nlohmann::json& d = out.document;
    std::cout << d["kind"].get<std::string>() << " '"
              << d["scenario"]["label"].get<std::string>() << "' (seed "
              << d["provenance"]["seed"] << ")\n"
              << "results: " << d["results"].dump(2) << "\n";
    for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotorsim: rotational-state molecular-ion qubit simulator"};
  app.set_version_flag("--version", rotorsim::version_string);
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario file or preset");
  add_run_options(run_cmd, run_flags);

  RunFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter-sweep scenario");
  add_run_options(sweep_cmd, sweep_flags);

  std::string validate_target;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a scenario without running it");
  validate_cmd->add_option("target", validate_target, "scenario file or preset name")->required();

  bool presets_json = false;
  CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");
  presets_cmd->add_flag("--json", presets_json, "print the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return run_target(run_flags, false);
    if (sweep_cmd->parsed()) return run_target(sweep_flags, true);
    if (validate_cmd->parsed()) {
      const nlohmann::json doc = rotorsim::resolve_scenario(validate_target);
      rotorsim::validate_scenario(doc);
      std::cout << "ok: " << doc.value("kind", "") << " '"
                << doc.value("label", doc.value("kind", "")) << "'\n";
      return 0;
    }
    if (presets_cmd->parsed()) {
      if (presets_json) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& p : rotorsim::preset_catalog())
          list.push_back({{"name", p.name}, {"summary", p.summary}});
        std::cout << list.dump(2) << "\n";
      } else {
        for (const auto& p : rotorsim::preset_catalog())
          std::cout << p.name << "\n    " << p.summary << "\n";
      }
      return 0;
    }
  } catch (const rotorsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rotorsim::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const rotorsim::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
