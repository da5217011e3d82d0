#include "adha/cost_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "adha/ods.hpp"

namespace adha {

namespace {

void check_spans_program(const Layout& layout, const Program& program) {
  if (layout.field_count() != program.fields.size()) {
    throw InputError("layout '" + layout.str() + "' does not span the " +
                     std::to_string(program.fields.size()) + " program fields");
  }
  for (const auto& f : program.fields) {
    if (!layout.contains(f.name)) {
      throw InputError("layout '" + layout.str() + "' is missing field '" +
                       f.name + "'");
    }
  }
}

}  // namespace

CostBreakdown exec_cost(const Section& section, const Layout& layout,
                        const Device& device, const Program& program,
                        const TuningProfile* profile) {
  check_spans_program(layout, program);
  if (!section.allows(device.name)) {
    throw InputError("device '" + device.name + "' is not allowed for section '" +
                     section.id + "'");
  }

  if (profile != nullptr) {
    if (auto t = profile->find(section.id, device.name, layout.str())) {
      return {0.0, 0.0, *t, CostSource::profile};
    }
  }

  const auto& clusters = layout.clusters();
  std::unordered_map<std::string, std::size_t> cluster_of;
  std::vector<double> cluster_bytes(clusters.size(), 0.0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto& name : clusters[c]) cluster_of.emplace(name, c);
    cluster_bytes[c] = static_cast<double>(layout.cluster_bytes(c, program.fields));
  }

  const double trip = static_cast<double>(section.trip_count);
  CostBreakdown out;
  std::vector<bool> touched(clusters.size());
  for (const auto& group : section.groups) {
    std::fill(touched.begin(), touched.end(), false);
    for (const auto& f : group.fields) {
      auto it = cluster_of.find(f);
      if (it == cluster_of.end()) {
        throw InputError("section '" + section.id + "' accesses field '" + f +
                         "' absent from the layout");
      }
      touched[it->second] = true;
    }

    double lines = 0.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (!touched[c]) continue;
      if (group.pattern == AccessPattern::irregular) {
        lines += 1.0;
      } else {
        double line_cost = cluster_bytes[c] / static_cast<double>(device.line_bytes);
        if (device.coalescing && clusters[c].size() > 1) {
          line_cost *= device.stream_cluster_penalty;
        }
        lines += line_cost;
      }
    }
    out.memory_ns += trip * group.freq * lines * device.line_time_ns;
    out.compute_ns += trip * group.freq * group.ops / device.throughput_ops_per_ns;
  }
  out.total_ns = out.memory_ns + out.compute_ns;
  out.source = CostSource::model;
  return out;
}

std::vector<std::string> common_fields(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b,
                                       const Program& program) {
  std::set<std::string, std::less<>> in_a(a.begin(), a.end());
  std::set<std::string, std::less<>> in_b(b.begin(), b.end());
  std::vector<std::string> out;
  // program.fields is not necessarily stored in decl order
  std::vector<const Field*> ordered;
  for (const auto& f : program.fields) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(),
            [](const Field* x, const Field* y) { return x->decl_index < y->decl_index; });
  for (const Field* f : ordered) {
    if (in_a.contains(f->name) && in_b.contains(f->name)) out.push_back(f->name);
  }
  return out;
}

namespace {

// The cluster holding `field`, restricted to `common`.
std::set<std::string> restricted_cluster(const Layout& layout,
                                         const std::string& field,
                                         const std::set<std::string>& common) {
  std::set<std::string> out;
  auto c = layout.cluster_of(field);
  if (!c) throw InputError("layout '" + layout.str() + "' is missing field '" + field + "'");
  for (const auto& f : layout.clusters()[*c]) {
    if (common.contains(f)) out.insert(f);
  }
  return out;
}

}  // namespace

RemapCost remap_cost(const Layout& from_layout, const Device& from_device,
                     const Layout& to_layout, const Device& to_device,
                     const std::vector<std::string>& common,
                     const Program& program, const Architecture& arch) {
  const bool same_device = from_device.name == to_device.name;
  const std::set<std::string> common_set(common.begin(), common.end());

  std::vector<const Field*> ordered;
  for (const auto& f : common) {
    const Field* field = program.find_field(f);
    if (field == nullptr) throw InputError("remap names undeclared field '" + f + "'");
    ordered.push_back(field);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Field* a, const Field* b) { return a->decl_index < b->decl_index; });

  RemapCost out;
  for (const Field* field : ordered) {
    const std::string& f = field->name;
    const bool moves =
        !same_device || restricted_cluster(from_layout, f, common_set) !=
                            restricted_cluster(to_layout, f, common_set);
    if (!moves) continue;
    out.moved.push_back(f);
    out.bytes += program.record_count * field->elem_bytes;
  }
  if (out.bytes == 0) return out;

  const double bytes = static_cast<double>(out.bytes);
  if (same_device) {
    out.cost_ns = bytes / arch.same_device_remap_bandwidth_bytes_per_ns +
                  arch.remap_fixed_overhead_ns;
  } else {
    const Link* link = arch.find_link(from_device.name, to_device.name);
    if (link == nullptr) {
      throw InputError("no link between devices '" + from_device.name + "' and '" +
                       to_device.name + "'");
    }
    out.cost_ns = bytes / link->bandwidth_bytes_per_ns + link->latency_ns;
  }
  return out;
}

double combine_loss(const Section& s1, const Section& s2, const Device& device,
                    const Program& program, const TuningProfile* profile) {
  const Section pair[] = {s1, s2};
  const Layout merged = ods(merge_sections(std::span<const Section>(pair)), device, program);
  const Layout own1 = ods(s1, device, program);
  const Layout own2 = ods(s2, device, program);
  const double combined = exec_cost(s1, merged, device, program, profile).total_ns +
                          exec_cost(s2, merged, device, program, profile).total_ns;
  const double separate = exec_cost(s1, own1, device, program, profile).total_ns +
                          exec_cost(s2, own2, device, program, profile).total_ns;
  return combined - separate;
}

}  // namespace adha
