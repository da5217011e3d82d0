#pragma once

// Whole-program layout and device mapping. Every contiguous run of sections
// on every device they all allow becomes a node whose layout is the ODS of the
// merged run; a shortest source-to-sink path through the run graph picks where
// to combine sections and where to pay a remap.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adha/model.hpp"

namespace adha {

struct RunNode {
  std::size_t begin = 0;  // indices into Program::order, inclusive
  std::size_t end = 0;
  std::string device;
  Layout layout;
  double exec_ns = 0.0;
  std::vector<std::string> sections;  // ids, in execution order
  std::vector<std::string> fields;    // accessed by any member, decl order
};

struct RunEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double remap_ns = 0.0;
  double weight = 0.0;  // remap_ns + exec_ns of `to`; 0 into the sink
  std::vector<std::string> moved;
};

class RunGraph {
 public:
  RunGraph(std::size_t section_count, std::vector<RunNode> nodes,
           std::vector<RunEdge> edges);

  std::size_t section_count() const { return section_count_; }
  const std::vector<RunNode>& nodes() const { return nodes_; }
  const std::vector<RunEdge>& edges() const { return edges_; }
  std::size_t source() const { return nodes_.size(); }
  std::size_t sink() const { return nodes_.size() + 1; }

 private:
  std::size_t section_count_;
  std::vector<RunNode> nodes_;
  std::vector<RunEdge> edges_;
};

struct RemapRecord {
  std::size_t after = 0;  // number of sections executed before the boundary
  std::vector<std::string> moved;
  double cost_ns = 0.0;
};

struct Plan {
  std::vector<RunNode> runs;
  std::vector<RemapRecord> remaps;  // one per run boundary
  double total_ns = 0.0;
};

// Builds the run node for sections [begin, end] of the execution order on
// `device`. Throws InputError when a member does not allow the device.
RunNode make_run_node(const Program& program, std::size_t begin, std::size_t end,
                      const Device& device, const TuningProfile* profile);

RunGraph build_run_graph(const Program& program, const Architecture& arch,
                         const TuningProfile* profile = nullptr);

// Minimum total path. Ties: fewer runs, then the lexicographically smaller
// sequence of (device name, begin index).
Plan shortest_plan(const RunGraph& graph);

// Plan for a fixed choice of runs, recomputing remaps between neighbours.
Plan assemble_plan(std::vector<RunNode> runs, const Program& program,
                   const Architecture& arch);

std::string explain_plan(const Plan& plan, const Program& program);

// DOT export; edges on `chosen` are drawn bold red.
std::string run_graph_dot(const RunGraph& graph, const Plan* chosen = nullptr);

}  // namespace adha
