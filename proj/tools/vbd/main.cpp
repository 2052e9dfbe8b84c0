#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vbd/cli/experiments.hpp"
#include "vbd/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Structured dengue model experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  app.add_option("--config", config_path, "INI scenario file (defaults apply when omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for the random parameter search");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.fallthrough();

  const std::map<std::string, std::string> about = {
      {"reference", "UHR run and, unless sim.run_full = false, the full structured run"},
      {"simulate-uhr", "single-entry delay model to sim.uhr_t_end"},
      {"simulate-full", "structured model on the nz x ny grid to sim.full_t_end"},
      {"sweep-a13", "tau1 and R0 over the (a1, a3) grid"},
      {"sweep-a24", "tau1 and R0 over the (a2, a4) grid"},
      {"sweep-ystar", "delay-model runs for each entry fraction in sweep.alphas"},
      {"threshold", "final infected fraction against R0"},
      {"characteristics", "characteristic curves for sweep.entries and the nullclines"},
      {"sample-params", "random rates with tau1 inside [tau1_min, tau1_max]"}};
  for (const auto& name : vbd::cli::command_names()) {
    const auto it = about.find(name);
    app.add_subcommand(name, it == about.end() ? std::string() : it->second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    vbd::cli::RunContext ctx;
    if (!config_path.empty()) ctx.config = vbd::load_config(config_path);
    ctx.seed = seed;
    ctx.threads = threads;

    const vbd::cli::CommandResult result = vbd::cli::run_command(command, ctx);
    const std::vector<std::string> args(argv + 1, argv + argc);
    vbd::cli::commit_outputs(out_dir, result.files, command, args, vbd::cli::parameters_json(ctx));
    for (const auto& line : result.summary) std::cout << line << '\n';
    std::cout << fmt::format("wrote {} files to {}\n", result.files.size() + 1, out_dir);
    return 0;
  } catch (const vbd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const vbd::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
