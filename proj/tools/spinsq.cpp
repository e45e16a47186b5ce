// Command-line front end: one subcommand per artifact.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include "spinsq/config.hpp"
#include "spinsq/error.hpp"
#include "spinsq/output.hpp"
#include "spinsq/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string cache;
  int jobs = 0;
  long long seed = -1;
  double grid_scale = 0.0;
};

spinsq::ScenarioConfig resolve(const Flags &f) {
  auto c = f.config.empty() ? spinsq::default_config() : spinsq::load_config(f.config);
  if (!f.out.empty()) c.output.dir = f.out;
  if (!f.cache.empty()) c.output.cache = f.cache;
  if (f.jobs > 0) c.output.jobs = f.jobs;
  if (f.seed >= 0) c.gutzwiller.seed = static_cast<std::uint64_t>(f.seed);
  if (f.grid_scale > 0.0) c.output.grid_scale = f.grid_scale;
  spinsq::refresh_echo(c);
  return c;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spin squeezing across the superfluid to Mott ramp"};
  app.set_version_flag("--version", std::string("spinsq ") + spinsq::tool_version);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Flags flags;
  app.add_option("--config", flags.config, "INI scenario file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache", flags.cache, "energy-surface cache directory");
  app.add_option("--seed", flags.seed, "Gutzwiller multi-start seed")->check(CLI::NonNegativeNumber);
  app.add_option("--grid-scale", flags.grid_scale, "multiply depth, time and N grids")
      ->check(CLI::PositiveNumber);

  using Run = std::function<void(const spinsq::ScenarioConfig &)>;
  const std::map<std::string, std::pair<std::string, Run>> commands{
      {"params", {"Bose-Hubbard parameters over the ramp", [](auto &c) { spinsq::run_params(c); }}},
      {"vc", {"critical depth at fillings (1/2, 1/2)", [](auto &c) { spinsq::run_vc(c); }}},
      {"squeeze", {"full squeezing trajectory", [](auto &c) { spinsq::run_squeeze(c); }}},
      {"oat-scaling", {"t_best(N) sweep and power-law fit", [](auto &c) { spinsq::run_oat_scaling(c); }}},
      {"adiabatic", {"Bogoliubov adiabatic times and excitation sweep", [](auto &c) { spinsq::run_adiabatic(c); }}},
      {"losses", {"lost fraction and N_max per loss scenario", [](auto &c) { spinsq::run_losses(c); }}},
      {"figure2", {"all squeezing curves and the t_best sweep", [](auto &c) { spinsq::run_figure2(c); }}},
      {"figure3", {"loss curves and crossings", [](auto &c) { spinsq::run_figure3(c); }}},
  };
  for (const auto &[name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = resolve(flags);
    for (const auto *sub : app.get_subcommands()) commands.at(sub->get_name()).second(config);
  } catch (const spinsq::Error &e) {
    std::fprintf(stderr, "spinsq: %s\n", e.what());
    return spinsq::exit_code(e.kind());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "spinsq: %s\n", e.what());
    return 1;
  }
  return 0;
}
