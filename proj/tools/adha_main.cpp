#include <iostream>

#include <CLI11.hpp>

#include "adha/cli.hpp"

int main(int argc, char** argv) {
  using adha::cli::Command;
  using adha::cli::RunConfiguration;

  CLI::App app{"adha: automatic data layout and CPU/GPU mapping for section programs"};
  app.require_subcommand(1);

  RunConfiguration config;
  std::string profile, device, output, section, layout;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-p,--program", config.program_path, "program JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-a,--arch", config.arch_path, "architecture JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--profile", profile, "tuning profile JSON")->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "output file (default: stdout)");
    sub->add_flag("--dot", config.dot, "also write Graphviz DOT to <output>.dot");
    sub->add_option("--seed", config.seed, "seed for every random draw");
  };

  auto* ods = app.add_subcommand("ods", "per-section layouts for one device");
  add_common(ods);
  ods->add_option("-d,--device", device, "device name")->required();

  auto* pdl = app.add_subcommand("pdl", "whole-program plan as JSON (+ report in <output>.txt)");
  add_common(pdl);

  auto* explain = app.add_subcommand("explain", "whole-program plan as a text report");
  add_common(explain);

  auto* simulate = app.add_subcommand("simulate", "LRU cache miss counts per section");
  add_common(simulate);
  simulate->add_option("-d,--device", device, "device name")->required();
  simulate->add_option("--section", section, "only this section");
  simulate->add_option("--layout", layout, "layout string (default: ODS layout)");
  simulate->add_option("--iters", config.iters, "iterations to replay")->check(CLI::PositiveNumber);
  simulate->add_option("--cache-line", config.cache.line_bytes, "cache line bytes");
  simulate->add_option("--cache-sets", config.cache.num_sets, "number of sets");
  simulate->add_option("--cache-ways", config.cache.ways, "associativity");

  auto* check = app.add_subcommand("oracle-check", "compare passes against exhaustive search");
  add_common(check);
  check->add_option("--random", config.random_instances,
                    "additional random instances seeded from --seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adha::cli::kExitIo;
  }

  config.command = *adha::cli::parse_command(app.get_subcommands().front()->get_name());
  if (!profile.empty()) config.profile_path = profile;
  if (!device.empty()) config.device = device;
  if (!output.empty()) config.output_path = output;
  if (!section.empty()) config.section = section;
  if (!layout.empty()) config.layout = layout;

  return adha::cli::run(config, std::cout, std::cerr);
}
