#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <cavspin/cli/commands.hpp>

namespace {

using cavspin::cli::ConfigError;
using cavspin::cli::json;

struct OutputTarget {
  std::string path;
  std::string format;
};

OutputTarget output_target(const json& cfg, const std::string& flag_path, const std::string& flag_format, const std::string& command) {
  OutputTarget t{"", cavspin::cli::default_format(command)};
  if (const json* o = cavspin::cli::find(cfg, "output")) {
    cavspin::cli::check_keys(*o, "output", {"path", "format"});
    t.path = cavspin::cli::string_or(*o, "path", "output", t.path);
    t.format = cavspin::cli::string_or(*o, "format", "output", t.format);
  }
  if (!flag_path.empty()) t.path = flag_path;
  if (!flag_format.empty()) t.format = flag_format;
  if (t.format != "csv" && t.format != "json") throw ConfigError("output.format", "expected csv or json");
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-cavity spin model simulator"};
  std::string command, config_path, output_path, format;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;

  app.add_option("command", command, "validate | map_params | ground_state | evolve | compare | adiabatic | sweep")
      ->check(CLI::IsMember(cavspin::cli::command_names()));
  app.add_option("--config", config_path, "JSON config (or a previous result file)")->required();
  app.add_option("--output", output_path, "output file (default: stdout)");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cavspin::cli::kConfigError;
  }

  try {
    json cfg = cavspin::cli::load_config_file(config_path);
    if (command.empty()) {
      const json* c = cfg.is_object() ? cavspin::cli::find(cfg, "command") : nullptr;
      if (!c || !c->is_string()) throw ConfigError("command", "no command given on the command line or in the config");
      command = c->get<std::string>();
    }
    const json resolved = cavspin::cli::resolve_config(cfg, command, seed);
    const OutputTarget target = output_target(resolved, output_path, format, command);
    json run_cfg = resolved;
    run_cfg.erase("output");
    const cavspin::cli::CommandResult r = cavspin::cli::run_command(command, run_cfg, threads);
    const std::string text = cavspin::cli::render(r, resolved, target.format);
    if (target.path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(target.path, std::ios::binary);
      if (!out) throw ConfigError("output.path", "cannot write \"" + target.path + "\"");
      out << text;
    }
    for (const auto& m : r.report.value("messages", std::vector<std::string>{})) std::cerr << m << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cavspin::cli::kConfigError;
  } catch (const cavspin::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return cavspin::cli::kNonConvergence;
  } catch (const cavspin::RegimeError& e) {
    std::cerr << "regime: " << e.what() << "\n";
    return cavspin::cli::kValidationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cavspin::cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cavspin::cli::kConfigError;
  }
}
