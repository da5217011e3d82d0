#include "adha/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "adha/cost_model.hpp"
#include "adha/io.hpp"
#include "adha/ods.hpp"
#include "adha/pdl.hpp"

namespace adha::cli {

using nlohmann::json;

std::optional<Command> parse_command(std::string_view text) {
  if (text == "ods") return Command::ods;
  if (text == "pdl") return Command::pdl;
  if (text == "explain") return Command::explain;
  if (text == "simulate") return Command::simulate;
  if (text == "oracle-check") return Command::oracle_check;
  return std::nullopt;
}

namespace {

// Validation failure: reported with exit status 1.
struct Invalid {
  std::vector<Diagnostic> diagnostics;
};

class Outputs {
 public:
  Outputs(const RunConfiguration& config, std::ostream& out)
      : config_(config), out_(out) {}

  void primary(const std::string& text) { write(config_.output_path, text); }

  // Side artifact: `<output>.<suffix>` when writing to a file, else stdout.
  void side(const std::string& suffix, const std::string& text) {
    if (config_.output_path) {
      write(*config_.output_path + "." + suffix, text);
    } else {
      out_ << text;
    }
  }

 private:
  void write(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
      out_ << text;
      return;
    }
    std::ofstream file(*path, std::ios::binary | std::ios::trunc);
    if (!file) throw io::ParseError("cannot write '" + *path + "'");
    file << text;
    if (!file) throw io::ParseError("failed writing '" + *path + "'");
  }

  const RunConfiguration& config_;
  std::ostream& out_;
};

const Device& require_device(const RunConfiguration& config, const Architecture& arch) {
  if (!config.device) {
    throw Invalid{{{"device", "--device is required for this command"}}};
  }
  const Device* d = arch.find_device(*config.device);
  if (d == nullptr) {
    throw Invalid{{{"device " + *config.device, "unknown device '" + *config.device + "'"}}};
  }
  return *d;
}

json clusters_json(const Layout& layout) {
  json out = json::array();
  for (const auto& c : layout.clusters()) out.push_back(c);
  return out;
}

void run_ods(const RunConfiguration& config, const Program& program,
             const Architecture& arch, Outputs& outputs) {
  const Device& device = require_device(config, arch);
  json sections = json::array();
  json skipped = json::array();
  std::string dot;
  for (const Section* s : program.ordered_sections()) {
    if (!s->allows(device.name)) {
      skipped.push_back(s->id);
      continue;
    }
    const AffinityGraph graph = build_affinity_graph(*s, device, program.fields);
    const Layout layout = extend_to_program(greedy_cluster(graph, device), program);
    sections.push_back({{"section", s->id}, {"layout", layout.str()},
                        {"clusters", clusters_json(layout)}});
    if (config.dot) dot += affinity_graph_dot(graph, s->id + "@" + device.name);
  }
  outputs.primary(io::dump({{"schema_version", io::kSchemaVersion},
                            {"program", program.name},
                            {"device", device.name},
                            {"sections", sections},
                            {"skipped", skipped}}));
  if (config.dot) outputs.side("dot", dot);
}

void run_pdl(const RunConfiguration& config, const Program& program,
             const Architecture& arch, const TuningProfile* profile, Outputs& outputs,
             bool explain_only) {
  const RunGraph graph = build_run_graph(program, arch, profile);
  const Plan plan = shortest_plan(graph);
  const std::string report = explain_plan(plan, program);
  if (explain_only) {
    outputs.primary(report);
  } else {
    json j = io::to_json(plan);
    j["program"] = program.name;
    outputs.primary(io::dump(j));
    if (config.output_path) outputs.side("txt", report);
  }
  if (config.dot) outputs.side("dot", run_graph_dot(graph, &plan));
}

void run_simulate(const RunConfiguration& config, const Program& program,
                  const Architecture& arch, Outputs& outputs) {
  const Device& device = require_device(config, arch);
  std::optional<Layout> fixed_layout;
  if (config.layout) {
    fixed_layout = Layout::parse(*config.layout).canonicalized(program.fields);
  }
  const Layout soa = Layout::soa(program.fields);

  json results = json::array();
  bool matched = false;
  for (const Section* s : program.ordered_sections()) {
    if (config.section && *config.section != s->id) continue;
    if (!s->allows(device.name)) {
      if (config.section) {
        throw Invalid{{{"section " + s->id,
                        "device '" + device.name + "' is not allowed"}}};
      }
      continue;
    }
    matched = true;
    const Layout layout = fixed_layout ? *fixed_layout : ods(*s, device, program);
    results.push_back(
        {{"section", s->id},
         {"layout", layout.str()},
         {"misses", oracle::simulate_misses(*s, layout, config.cache, program,
                                            config.iters, config.seed)},
         {"soa_misses", oracle::simulate_misses(*s, soa, config.cache, program,
                                                config.iters, config.seed)}});
  }
  if (config.section && !matched) {
    throw Invalid{{{"section " + *config.section, "unknown section"}}};
  }
  outputs.primary(io::dump({{"schema_version", io::kSchemaVersion},
                            {"program", program.name},
                            {"device", device.name},
                            {"cache",
                             {{"line_bytes", config.cache.line_bytes},
                              {"num_sets", config.cache.num_sets},
                              {"ways", config.cache.ways}}},
                            {"iters", config.iters},
                            {"seed", config.seed},
                            {"results", results}}));
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct CheckSummary {
  std::size_t ods_checked = 0;
  std::size_t ods_identical = 0;
  double worst_ratio = 1.0;
  double lowest_ratio = std::numeric_limits<double>::infinity();
  std::size_t plans_checked = 0;
  std::size_t plan_mismatches = 0;
};

json check_instance(const Program& program, const Architecture& arch,
                    const TuningProfile* profile, CheckSummary& summary) {
  json ods_rows = json::array();
  for (const Section* s : program.ordered_sections()) {
    for (const auto& dname : s->allowed_devices) {
      const Device& d = arch.device(dname);
      const Layout greedy = ods(*s, d, program);
      const double greedy_cost = exec_cost(*s, greedy, d, program).total_ns;
      std::optional<oracle::OdsOptimum> found;
      try {
        found = oracle::brute_force_ods(*s, d, program);
      } catch (const InputError& e) {
        ods_rows.push_back({{"section", s->id}, {"device", dname}, {"skipped", e.what()}});
        continue;
      }
      const oracle::OdsOptimum& best = *found;
      const double ratio = best.cost_ns > 0.0 ? greedy_cost / best.cost_ns : 1.0;
      ++summary.ods_checked;
      if (greedy == best.layout) ++summary.ods_identical;
      summary.worst_ratio = std::max(summary.worst_ratio, ratio);
      summary.lowest_ratio = std::min(summary.lowest_ratio, ratio);
      ods_rows.push_back({{"section", s->id},
                          {"device", dname},
                          {"greedy_layout", greedy.str()},
                          {"oracle_layout", best.layout.str()},
                          {"greedy_cost_ns", greedy_cost},
                          {"oracle_cost_ns", best.cost_ns},
                          {"ratio", ratio},
                          {"identical", greedy == best.layout}});
    }
  }

  json plan_row;
  if (program.order.size() <= oracle::kMaxPlanSections) {
    const Plan fast = shortest_plan(build_run_graph(program, arch, profile));
    const Plan slow = oracle::brute_force_plan(program, arch, profile);
    const bool equal = nearly_equal(fast.total_ns, slow.total_ns);
    ++summary.plans_checked;
    if (!equal) ++summary.plan_mismatches;
    plan_row = {{"shortest_total_ns", fast.total_ns},
                {"brute_force_total_ns", slow.total_ns},
                {"equal", equal}};
  } else {
    plan_row = {{"skipped", "too many sections for enumeration"}};
  }
  return {{"program", program.name}, {"ods", ods_rows}, {"plan", plan_row}};
}

void run_oracle_check(const RunConfiguration& config, const Program& program,
                      const Architecture& arch, const TuningProfile* profile,
                      Outputs& outputs) {
  CheckSummary summary;
  json report = check_instance(program, arch, profile, summary);

  json random_rows = json::array();
  for (std::uint64_t i = 0; i < config.random_instances; ++i) {
    const oracle::Instance inst = oracle::random_instance(config.seed + i);
    json row = check_instance(inst.program, inst.arch, &inst.profile, summary);
    row["seed"] = config.seed + i;
    random_rows.push_back(std::move(row));
  }

  // Greedy can never beat the exhaustive optimum.
  const bool ok = summary.plan_mismatches == 0 && summary.lowest_ratio >= 1.0 - 1e-12 &&
                  std::isfinite(summary.worst_ratio);
  outputs.primary(io::dump({{"schema_version", io::kSchemaVersion},
                            {"seed", config.seed},
                            {"instance", report},
                            {"random", random_rows},
                            {"summary",
                             {{"ods_checked", summary.ods_checked},
                              {"ods_identical", summary.ods_identical},
                              {"worst_greedy_ratio", summary.worst_ratio},
                              {"lowest_greedy_ratio", summary.lowest_ratio},
                              {"plans_checked", summary.plans_checked},
                              {"plan_mismatches", summary.plan_mismatches}}},
                            {"ok", ok}}));
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, std::ostream& err) {
  for (const auto& d : diagnostics) err << "error: " << d.subject << ": " << d.message << "\n";
}

}  // namespace

int run(const RunConfiguration& config, std::ostream& out, std::ostream& err) {
  try {
    const Program program = io::load_program(config.program_path);
    const Architecture arch = io::load_architecture(config.arch_path);
    std::optional<TuningProfile> profile;
    if (config.profile_path) profile = io::load_profile(*config.profile_path);

    const auto diagnostics = validate_program(program, arch);
    if (!diagnostics.empty()) {
      print_diagnostics(diagnostics, err);
      return kExitInvalid;
    }

    Outputs outputs(config, out);
    const TuningProfile* prof = profile ? &*profile : nullptr;
    switch (config.command) {
      case Command::ods:
        run_ods(config, program, arch, outputs);
        break;
      case Command::pdl:
        run_pdl(config, program, arch, prof, outputs, false);
        break;
      case Command::explain:
        run_pdl(config, program, arch, prof, outputs, true);
        break;
      case Command::simulate:
        run_simulate(config, program, arch, outputs);
        break;
      case Command::oracle_check:
        run_oracle_check(config, program, arch, prof, outputs);
        break;
    }
    return kExitOk;
  } catch (const Invalid& e) {
    print_diagnostics(e.diagnostics, err);
    return kExitInvalid;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace adha::cli
