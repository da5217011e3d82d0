#include "adha/pdl.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <utility>

#include "adha/cost_model.hpp"
#include "adha/ods.hpp"

namespace adha {

RunGraph::RunGraph(std::size_t section_count, std::vector<RunNode> nodes,
                   std::vector<RunEdge> edges)
    : section_count_(section_count),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {}

namespace {

std::vector<std::string> run_fields(std::span<const Section* const> members,
                                    const Program& program) {
  std::vector<std::string> all;
  for (const Section* s : members) {
    for (auto& f : s->accessed_fields()) all.push_back(std::move(f));
  }
  return common_fields(all, all, program);
}

std::string fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i != 0) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

RunNode make_run_node(const Program& program, std::size_t begin, std::size_t end,
                      const Device& device, const TuningProfile* profile) {
  const auto ordered = program.ordered_sections();
  if (begin > end || end >= ordered.size()) {
    throw InputError("run [" + std::to_string(begin) + ", " + std::to_string(end) +
                     "] outside the section order");
  }
  std::span<const Section* const> members(ordered.data() + begin, end - begin + 1);
  const Section merged = merge_sections(members);

  RunNode node;
  node.begin = begin;
  node.end = end;
  node.device = device.name;
  node.layout = ods(merged, device, program);
  for (const Section* s : members) {
    node.sections.push_back(s->id);
    node.exec_ns += exec_cost(*s, node.layout, device, program, profile).total_ns;
  }
  node.fields = run_fields(members, program);
  return node;
}

RunGraph build_run_graph(const Program& program, const Architecture& arch,
                         const TuningProfile* profile) {
  const auto ordered = program.ordered_sections();
  const std::size_t k = ordered.size();
  if (k == 0) throw InputError("program has no sections to plan");
  for (const Section* s : ordered) {
    bool any = false;
    for (const auto& d : s->allowed_devices) {
      if (arch.find_device(d) == nullptr) {
        throw InputError("section '" + s->id + "' allows unknown device '" + d + "'");
      }
      any = true;
    }
    if (!any) throw InputError("section '" + s->id + "' has no allowed device");
  }

  // Nodes grouped by end index, devices in architecture order.
  std::vector<RunNode> nodes;
  for (std::size_t end = 0; end < k; ++end) {
    for (std::size_t begin = 0; begin <= end; ++begin) {
      for (const auto& device : arch.devices) {
        const bool allowed = std::all_of(
            ordered.begin() + static_cast<std::ptrdiff_t>(begin),
            ordered.begin() + static_cast<std::ptrdiff_t>(end) + 1,
            [&](const Section* s) { return s->allows(device.name); });
        if (!allowed) continue;
        nodes.push_back(make_run_node(program, begin, end, device, profile));
      }
    }
  }

  const std::size_t source = nodes.size();
  const std::size_t sink = nodes.size() + 1;
  std::vector<RunEdge> edges;
  for (std::size_t to = 0; to < nodes.size(); ++to) {
    const RunNode& next = nodes[to];
    if (next.begin == 0) {
      edges.push_back({source, to, 0.0, next.exec_ns, {}});
      continue;
    }
    for (std::size_t from = 0; from < nodes.size(); ++from) {
      const RunNode& prev = nodes[from];
      if (prev.end + 1 != next.begin) continue;
      const RemapCost remap =
          remap_cost(prev.layout, arch.device(prev.device), next.layout,
                     arch.device(next.device),
                     common_fields(prev.fields, next.fields, program), program, arch);
      edges.push_back({from, to, remap.cost_ns, remap.cost_ns + next.exec_ns,
                       remap.moved});
    }
  }
  for (std::size_t from = 0; from < nodes.size(); ++from) {
    if (nodes[from].end + 1 == k) edges.push_back({from, sink, 0.0, 0.0, {}});
  }
  return RunGraph(k, std::move(nodes), std::move(edges));
}

namespace {

struct Label {
  bool reached = false;
  double cost = 0.0;
  std::size_t runs = 0;
  std::vector<std::pair<std::string, std::size_t>> sequence;
  std::size_t via_edge = 0;
};

bool better(const Label& a, const Label& b) {
  if (!b.reached) return a.reached;
  if (!a.reached) return false;
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.runs != b.runs) return a.runs < b.runs;
  return a.sequence < b.sequence;
}

}  // namespace

Plan shortest_plan(const RunGraph& graph) {
  const auto& nodes = graph.nodes();
  const auto& edges = graph.edges();
  const std::size_t source = graph.source();
  const std::size_t sink = graph.sink();

  std::vector<std::vector<std::size_t>> incoming(nodes.size() + 2);
  for (std::size_t e = 0; e < edges.size(); ++e) incoming[edges[e].to].push_back(e);

  // Topological order: by end index; every edge goes from a smaller end to a
  // larger one, and the sink comes last.
  std::vector<std::size_t> topo(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) topo[i] = i;
  std::stable_sort(topo.begin(), topo.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a].end < nodes[b].end;
  });
  topo.push_back(sink);

  std::vector<Label> labels(nodes.size() + 2);
  labels[source].reached = true;
  for (std::size_t v : topo) {
    for (std::size_t e : incoming[v]) {
      const RunEdge& edge = edges[e];
      const Label& from = labels[edge.from];
      if (!from.reached) continue;
      Label candidate;
      candidate.reached = true;
      candidate.cost = from.cost + edge.weight;
      candidate.via_edge = e;
      candidate.sequence = from.sequence;
      candidate.runs = from.runs;
      if (v != sink) {
        candidate.runs += 1;
        candidate.sequence.emplace_back(nodes[v].device, nodes[v].begin);
      }
      if (better(candidate, labels[v])) labels[v] = std::move(candidate);
    }
  }
  if (!labels[sink].reached) throw InputError("run graph has no source-to-sink path");

  std::vector<std::size_t> path_edges;
  for (std::size_t v = sink; v != source;) {
    const std::size_t e = labels[v].via_edge;
    path_edges.push_back(e);
    v = edges[e].from;
  }
  std::reverse(path_edges.begin(), path_edges.end());

  Plan plan;
  for (std::size_t e : path_edges) {
    const RunEdge& edge = edges[e];
    if (edge.to == sink) continue;
    if (edge.from != source) {
      plan.remaps.push_back({nodes[edge.to].begin, edge.moved, edge.remap_ns});
    }
    plan.runs.push_back(nodes[edge.to]);
  }
  plan.total_ns = labels[sink].cost;
  return plan;
}

Plan assemble_plan(std::vector<RunNode> runs, const Program& program,
                   const Architecture& arch) {
  Plan plan;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i == 0) {
      plan.total_ns = runs[i].exec_ns;
      continue;
    }
    const RunNode& prev = runs[i - 1];
    const RunNode& next = runs[i];
    if (prev.end + 1 != next.begin) throw InputError("runs are not contiguous");
    const RemapCost remap =
        remap_cost(prev.layout, arch.device(prev.device), next.layout,
                   arch.device(next.device),
                   common_fields(prev.fields, next.fields, program), program, arch);
    plan.remaps.push_back({next.begin, remap.moved, remap.cost_ns});
    plan.total_ns += remap.cost_ns + next.exec_ns;
  }
  plan.runs = std::move(runs);
  return plan;
}

std::string explain_plan(const Plan& plan, const Program& program) {
  std::ostringstream out;
  out << "program " << program.name << ": " << plan.runs.size()
      << (plan.runs.size() == 1 ? " run" : " runs") << ", " << plan.remaps.size()
      << (plan.remaps.size() == 1 ? " remap" : " remaps") << "\n";

  std::size_t next_remap = 0;
  for (std::size_t i = 0; i < plan.runs.size(); ++i) {
    const RunNode& run = plan.runs[i];
    if (i != 0 && next_remap < plan.remaps.size()) {
      const RemapRecord& r = plan.remaps[next_remap++];
      out << "remap after section " << r.after << ": moved {" << join(r.moved, ",")
          << "} cost_ns " << fixed(r.cost_ns) << "\n";
    }
    out << "run " << i + 1 << ": sections " << run.begin + 1 << "-" << run.end + 1
        << " [" << join(run.sections, ", ") << "] on " << run.device << "\n"
        << "  layout  " << run.layout.str() << "\n"
        << "  exec_ns " << fixed(run.exec_ns) << "\n";
  }
  out << "total_ns " << fixed(plan.total_ns) << "\n";
  return out.str();
}

std::string run_graph_dot(const RunGraph& graph, const Plan* chosen) {
  const auto& nodes = graph.nodes();
  auto is_chosen_node = [&](std::size_t v) {
    if (chosen == nullptr || v >= nodes.size()) return false;
    return std::any_of(chosen->runs.begin(), chosen->runs.end(), [&](const RunNode& r) {
      return r.begin == nodes[v].begin && r.end == nodes[v].end &&
             r.device == nodes[v].device;
    });
  };
  auto name = [&](std::size_t v) -> std::string {
    if (v == graph.source()) return "SRC";
    if (v == graph.sink()) return "SNK";
    return "r" + std::to_string(nodes[v].begin + 1) + "_" +
           std::to_string(nodes[v].end + 1) + "_" + nodes[v].device;
  };

  std::ostringstream out;
  out << "digraph runs {\n  rankdir=LR;\n  SRC [shape=point];\n  SNK [shape=point];\n";
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    out << "  \"" << name(v) << "\" [label=\"" << nodes[v].begin + 1 << "-"
        << nodes[v].end + 1 << " " << nodes[v].device << "\\n"
        << nodes[v].layout.str() << "\\n" << fixed(nodes[v].exec_ns) << " ns\"";
    if (is_chosen_node(v)) out << ", color=red, penwidth=2";
    out << "];\n";
  }
  for (const RunEdge& e : graph.edges()) {
    const bool on_path = (e.from == graph.source() || is_chosen_node(e.from)) &&
                         (e.to == graph.sink() || is_chosen_node(e.to));
    out << "  \"" << name(e.from) << "\" -> \"" << name(e.to) << "\" [label=\""
        << fixed(e.weight) << "\"";
    if (on_path) out << ", color=red, penwidth=2";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace adha
