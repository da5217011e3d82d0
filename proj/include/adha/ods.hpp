#pragma once

// Per-section layout selection: field affinity graph + greedy clustering.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adha/model.hpp"

namespace adha {

// Weighted undirected graph over the fields a section touches. Absent pairs
// have weight 0; self edges never exist.
class AffinityGraph {
 public:
  struct Edge {
    std::string a;  // lower decl_index endpoint
    std::string b;
    double weight = 0.0;
  };

  AffinityGraph() = default;
  // `nodes` must be sorted by decl_index.
  AffinityGraph(std::vector<Field> nodes, std::vector<Edge> edges);

  const std::vector<Field>& nodes() const { return nodes_; }
  // Edges in greedy order: weight desc, then (min decl_index, max decl_index)
  // ascending.
  const std::vector<Edge>& edges() const { return edges_; }
  double weight(std::string_view f, std::string_view g) const;

 private:
  std::vector<Field> nodes_;
  std::vector<Edge> edges_;
};

// weight(f,g) = sum over groups containing both of trip * freq * w, with
// w = +1 for irregular groups, and for streaming groups +1 on non-coalescing
// devices, -1 on coalescing ones.
AffinityGraph build_affinity_graph(const Section& section, const Device& device,
                                   std::span<const Field> fields);

// Kruskal-style merge over positive edges, bounded by the device's
// cluster_capacity_bytes. Returns a canonical layout over the graph's nodes.
Layout greedy_cluster(const AffinityGraph& graph, const Device& device);

// Greedy layout for `section` on `device`, extended with every program field
// the section does not touch as a singleton.
Layout ods(const Section& section, const Device& device, const Program& program);

// Synthetic section for a contiguous run: trip_count 1, member groups with
// freq scaled by member trip_count, allowed devices intersected.
Section merge_sections(std::span<const Section* const> sections);
Section merge_sections(std::span<const Section> sections);

// Appends untouched program fields as singletons and canonicalizes.
Layout extend_to_program(const Layout& partial, const Program& program);

std::string affinity_graph_dot(const AffinityGraph& graph, std::string_view name);

}  // namespace adha
