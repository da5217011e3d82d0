#include "adha/ods.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace adha {

AffinityGraph::AffinityGraph(std::vector<Field> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::unordered_map<std::string, std::size_t> rank;
  for (const auto& n : nodes_) rank.emplace(n.name, n.decl_index);
  std::stable_sort(edges_.begin(), edges_.end(),
                   [&](const Edge& x, const Edge& y) {
                     if (x.weight != y.weight) return x.weight > y.weight;
                     const auto xa = rank.at(x.a), xb = rank.at(x.b);
                     const auto ya = rank.at(y.a), yb = rank.at(y.b);
                     return std::pair(std::min(xa, xb), std::max(xa, xb)) <
                            std::pair(std::min(ya, yb), std::max(ya, yb));
                   });
}

double AffinityGraph::weight(std::string_view f, std::string_view g) const {
  for (const auto& e : edges_) {
    if ((e.a == f && e.b == g) || (e.a == g && e.b == f)) return e.weight;
  }
  return 0.0;
}

AffinityGraph build_affinity_graph(const Section& section, const Device& device,
                                   std::span<const Field> fields) {
  if (!section.allows(device.name)) {
    throw InputError("device '" + device.name + "' is not allowed for section '" +
                     section.id + "'");
  }
  std::vector<Field> nodes;
  for (const auto& name : section.accessed_fields()) {
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const Field& f) { return f.name == name; });
    if (it == fields.end()) {
      throw InputError("section '" + section.id + "' references undeclared field '" +
                       name + "'");
    }
    nodes.push_back(*it);
  }
  std::sort(nodes.begin(), nodes.end(), [](const Field& a, const Field& b) {
    return a.decl_index < b.decl_index;
  });

  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < nodes.size(); ++i) pos.emplace(nodes[i].name, i);

  // Keyed by node position so the pair is unordered by construction.
  std::map<std::pair<std::size_t, std::size_t>, double> weights;
  const double trip = static_cast<double>(section.trip_count);
  for (const auto& group : section.groups) {
    double sign = 1.0;
    if (group.pattern == AccessPattern::streaming && device.coalescing) sign = -1.0;
    const double w = trip * group.freq * sign;

    std::vector<std::size_t> members;
    for (const auto& f : group.fields) members.push_back(pos.at(f));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        weights[{members[i], members[j]}] += w;
      }
    }
  }

  std::vector<AffinityGraph::Edge> edges;
  edges.reserve(weights.size());
  for (const auto& [key, w] : weights) {
    edges.push_back({nodes[key.first].name, nodes[key.second].name, w});
  }
  return AffinityGraph(std::move(nodes), std::move(edges));
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::vector<std::uint64_t> bytes)
      : parent_(bytes.size()), bytes_(std::move(bytes)) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  std::uint64_t bytes(std::size_t root) const { return bytes_[root]; }

  void unite(std::size_t a, std::size_t b) {
    // Keep the lower index as root; any choice works since output is
    // canonicalized.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    bytes_[a] += bytes_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint64_t> bytes_;
};

}  // namespace

Layout greedy_cluster(const AffinityGraph& graph, const Device& device) {
  const auto& nodes = graph.nodes();
  if (nodes.empty()) throw InputError("affinity graph has no nodes");

  std::unordered_map<std::string, std::size_t> pos;
  std::vector<std::uint64_t> bytes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].elem_bytes > device.cluster_capacity_bytes) {
      throw InputError("field '" + nodes[i].name + "' (" +
                       std::to_string(nodes[i].elem_bytes) +
                       " bytes) exceeds cluster capacity of device '" +
                       device.name + "'");
    }
    pos.emplace(nodes[i].name, i);
    bytes.push_back(nodes[i].elem_bytes);
  }

  DisjointSets sets(std::move(bytes));
  for (const auto& e : graph.edges()) {
    if (!(e.weight > 0.0)) break;  // edges are sorted by weight
    const std::size_t ra = sets.find(pos.at(e.a));
    const std::size_t rb = sets.find(pos.at(e.b));
    if (ra == rb) continue;
    if (sets.bytes(ra) + sets.bytes(rb) > device.cluster_capacity_bytes) continue;
    sets.unite(ra, rb);
  }

  std::map<std::size_t, Layout::Cluster> by_root;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    by_root[sets.find(i)].push_back(nodes[i].name);
  }
  std::vector<Layout::Cluster> clusters;
  for (auto& [root, c] : by_root) clusters.push_back(std::move(c));
  return Layout::canonical(std::move(clusters), nodes);
}

Layout extend_to_program(const Layout& partial, const Program& program) {
  std::vector<Layout::Cluster> clusters = partial.clusters();
  for (const auto& f : program.fields) {
    if (!partial.contains(f.name)) clusters.push_back({f.name});
  }
  return Layout::canonical(std::move(clusters), program.fields);
}

Layout ods(const Section& section, const Device& device, const Program& program) {
  const AffinityGraph graph = build_affinity_graph(section, device, program.fields);
  return extend_to_program(greedy_cluster(graph, device), program);
}

Section merge_sections(std::span<const Section* const> sections) {
  if (sections.empty()) throw InputError("cannot merge an empty run of sections");
  Section merged;
  merged.trip_count = 1;
  merged.allowed_devices = sections.front()->allowed_devices;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const Section& s = *sections[i];
    if (i != 0) merged.id += '+';
    merged.id += s.id;
    for (auto group : s.groups) {
      group.freq *= static_cast<double>(s.trip_count);
      merged.groups.push_back(std::move(group));
    }
    std::erase_if(merged.allowed_devices,
                  [&](const std::string& d) { return !s.allows(d); });
  }
  if (merged.allowed_devices.empty()) {
    throw InputError("sections '" + merged.id + "' share no allowed device");
  }
  return merged;
}

Section merge_sections(std::span<const Section> sections) {
  std::vector<const Section*> ptrs;
  ptrs.reserve(sections.size());
  for (const auto& s : sections) ptrs.push_back(&s);
  return merge_sections(std::span<const Section* const>(ptrs));
}

std::string affinity_graph_dot(const AffinityGraph& graph, std::string_view name) {
  std::ostringstream out;
  out << "graph \"" << name << "\" {\n";
  for (const auto& n : graph.nodes()) {
    out << "  \"" << n.name << "\" [label=\"" << n.name << " (" << n.elem_bytes
        << "B)\"];\n";
  }
  out.precision(17);
  for (const auto& e : graph.edges()) {
    out << "  \"" << e.a << "\" -- \"" << e.b << "\" [label=\"" << e.weight
        << "\"";
    if (e.weight <= 0.0) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace adha
