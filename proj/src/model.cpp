#include "adha/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace adha {

std::string_view to_string(AccessPattern pattern) {
  switch (pattern) {
    case AccessPattern::streaming:
      return "streaming";
    case AccessPattern::irregular:
      return "irregular";
  }
  return "streaming";
}

std::optional<AccessPattern> parse_access_pattern(std::string_view text) {
  if (text == "streaming") return AccessPattern::streaming;
  if (text == "irregular") return AccessPattern::irregular;
  return std::nullopt;
}

bool is_power_of_two(std::uint64_t value) {
  return value != 0 && (value & (value - 1)) == 0;
}

bool Section::allows(std::string_view device) const {
  return std::find(allowed_devices.begin(), allowed_devices.end(), device) !=
         allowed_devices.end();
}

std::vector<std::string> Section::accessed_fields() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& group : groups) {
    for (const auto& f : group.fields) {
      if (seen.insert(f).second) out.push_back(f);
    }
  }
  return out;
}

const Field* Program::find_field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const Section* Program::find_section(std::string_view id) const {
  for (const auto& s : sections) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<const Section*> Program::ordered_sections() const {
  std::vector<const Section*> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const Section* s = find_section(id);
    if (s == nullptr) throw InputError("order names unknown section '" + id + "'");
    out.push_back(s);
  }
  return out;
}

const Device* Architecture::find_device(std::string_view name) const {
  for (const auto& d : devices) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const Device& Architecture::device(std::string_view name) const {
  const Device* d = find_device(name);
  if (d == nullptr) throw InputError("unknown device '" + std::string(name) + "'");
  return *d;
}

const Link* Architecture::find_link(std::string_view a,
                                    std::string_view b) const {
  for (const auto& l : links) {
    if ((l.from == a && l.to == b) || (l.from == b && l.to == a)) return &l;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Layout

Layout::Layout(std::vector<Cluster> clusters) : clusters_(std::move(clusters)) {}

Layout Layout::canonical(std::vector<Cluster> clusters,
                         std::span<const Field> fields) {
  std::unordered_map<std::string, std::size_t> rank;
  for (const auto& f : fields) rank.emplace(f.name, f.decl_index);
  auto rank_of = [&](const std::string& name) {
    auto it = rank.find(name);
    if (it == rank.end()) {
      throw InputError("layout names undeclared field '" + name + "'");
    }
    return it->second;
  };

  std::erase_if(clusters, [](const Cluster& c) { return c.empty(); });
  for (auto& c : clusters) {
    std::sort(c.begin(), c.end(), [&](const auto& a, const auto& b) {
      return rank_of(a) < rank_of(b);
    });
  }
  std::sort(clusters.begin(), clusters.end(),
            [&](const Cluster& a, const Cluster& b) {
              return rank_of(a.front()) < rank_of(b.front());
            });
  return Layout(std::move(clusters));
}

Layout Layout::soa(std::span<const Field> fields) {
  std::vector<Cluster> clusters;
  clusters.reserve(fields.size());
  for (const auto& f : fields) clusters.push_back({f.name});
  return canonical(std::move(clusters), fields);
}

Layout Layout::canonicalized(std::span<const Field> fields) const {
  return canonical(clusters_, fields);
}

bool Layout::is_canonical(std::span<const Field> fields) const {
  return canonicalized(fields) == *this;
}

std::size_t Layout::field_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters_) n += c.size();
  return n;
}

std::optional<std::size_t> Layout::cluster_of(std::string_view field) const {
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    for (const auto& f : clusters_[i]) {
      if (f == field) return i;
    }
  }
  return std::nullopt;
}

std::uint64_t Layout::cluster_bytes(std::size_t cluster,
                                    std::span<const Field> fields) const {
  std::uint64_t bytes = 0;
  for (const auto& name : clusters_.at(cluster)) {
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const Field& f) { return f.name == name; });
    if (it == fields.end()) {
      throw InputError("layout names undeclared field '" + name + "'");
    }
    bytes += it->elem_bytes;
  }
  return bytes;
}

std::string Layout::str() const {
  std::string out;
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    if (i != 0) out += '|';
    out += '{';
    for (std::size_t j = 0; j < clusters_[i].size(); ++j) {
      if (j != 0) out += ',';
      out += clusters_[i][j];
    }
    out += '}';
  }
  return out;
}

Layout Layout::parse(std::string_view text) {
  auto fail = [&](const std::string& why) {
    throw InputError("malformed layout '" + std::string(text) + "': " + why);
  };
  std::vector<Cluster> clusters;
  std::set<std::string, std::less<>> seen;
  std::size_t pos = 0;
  while (true) {
    if (pos >= text.size() || text[pos] != '{') fail("expected '{'");
    ++pos;
    Cluster cluster;
    while (true) {
      std::size_t end = text.find_first_of(",}", pos);
      if (end == std::string_view::npos) fail("unterminated cluster");
      std::string name(text.substr(pos, end - pos));
      if (name.empty()) fail("empty field name");
      if (name.find_first_of("{}|") != std::string::npos) fail("stray delimiter");
      if (!seen.insert(name).second) fail("field '" + name + "' repeated");
      cluster.push_back(std::move(name));
      pos = end + 1;
      if (text[end] == '}') break;
    }
    clusters.push_back(std::move(cluster));
    if (pos == text.size()) break;
    if (text[pos] != '|') fail("expected '|'");
    ++pos;
  }
  return Layout(std::move(clusters));
}

std::string canonical_layout_string(const Layout& layout) { return layout.str(); }

// ---------------------------------------------------------------------------
// TuningProfile

void TuningProfile::add(std::string section, std::string device,
                        std::string layout, double time_ns) {
  if (!(time_ns > 0.0)) {
    throw InputError("profile time for section '" + section +
                     "' must be positive");
  }
  Key key{std::move(section), std::move(device), std::move(layout)};
  auto [it, inserted] = entries_.emplace(std::move(key), time_ns);
  if (!inserted) {
    throw InputError("duplicate profile entry for section '" +
                     std::get<0>(it->first) + "' on '" +
                     std::get<1>(it->first) + "'");
  }
}

std::optional<double> TuningProfile::find(std::string_view section,
                                          std::string_view device,
                                          std::string_view layout) const {
  auto it = entries_.find(
      Key{std::string(section), std::string(device), std::string(layout)});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool TuningProfile::erase(std::string_view section, std::string_view device,
                          std::string_view layout) {
  return entries_.erase(Key{std::string(section), std::string(device),
                            std::string(layout)}) > 0;
}

std::vector<TuningProfile::Entry> TuningProfile::entries() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [key, t] : entries_) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), t});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate_program(const Program& program,
                                         const Architecture& arch) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string subject, std::string message) {
    out.push_back({std::move(subject), std::move(message)});
  };

  if (program.record_count == 0) {
    report("program " + program.name, "record_count must be positive");
  }

  // Fields.
  std::set<std::string, std::less<>> field_names;
  std::vector<bool> index_used(program.fields.size(), false);
  for (const auto& f : program.fields) {
    const std::string subject = "field " + f.name;
    if (f.name.empty()) report(subject, "field name is empty");
    if (!field_names.insert(f.name).second) report(subject, "duplicate field name");
    if (f.elem_bytes == 0) report(subject, "elem_bytes must be >= 1");
    if (f.decl_index >= program.fields.size()) {
      report(subject, "decl_index " + std::to_string(f.decl_index) +
                          " outside 0.." +
                          std::to_string(program.fields.size() - 1));
    } else if (index_used[f.decl_index]) {
      report(subject, "decl_index " + std::to_string(f.decl_index) + " repeated");
    } else {
      index_used[f.decl_index] = true;
    }
  }

  // Architecture.
  std::set<std::string, std::less<>> device_names;
  for (const auto& d : arch.devices) {
    const std::string subject = "device " + d.name;
    if (!device_names.insert(d.name).second) report(subject, "duplicate device name");
    if (!is_power_of_two(d.line_bytes)) report(subject, "line_bytes must be a power of two");
    if (!is_power_of_two(d.cluster_capacity_bytes)) {
      report(subject, "cluster_capacity_bytes must be a power of two");
    }
    if (!(d.line_time_ns > 0.0)) report(subject, "line_time_ns must be positive");
    if (!(d.throughput_ops_per_ns > 0.0)) {
      report(subject, "throughput_ops_per_ns must be positive");
    }
    if (!(d.stream_cluster_penalty >= 1.0)) {
      report(subject, "stream_cluster_penalty must be >= 1");
    }
  }
  if (arch.devices.empty()) report("architecture", "no devices declared");
  if (!(arch.same_device_remap_bandwidth_bytes_per_ns > 0.0)) {
    report("architecture", "same_device_remap_bandwidth_bytes_per_ns must be positive");
  }
  if (!(arch.remap_fixed_overhead_ns >= 0.0)) {
    report("architecture", "remap_fixed_overhead_ns must be nonnegative");
  }
  for (const auto& l : arch.links) {
    const std::string subject = "link " + l.from + "->" + l.to;
    if (!device_names.contains(l.from) || !device_names.contains(l.to)) {
      report(subject, "link names an unknown device");
    }
    if (!(l.bandwidth_bytes_per_ns > 0.0)) report(subject, "bandwidth must be positive");
    if (!(l.latency_ns >= 0.0)) report(subject, "latency must be nonnegative");
  }

  // Sections.
  std::set<std::string, std::less<>> section_ids;
  std::set<std::string, std::less<>> used_devices;
  for (const auto& s : program.sections) {
    const std::string subject = "section " + s.id;
    if (!section_ids.insert(s.id).second) report(subject, "duplicate section id");
    if (s.trip_count == 0) report(subject, "trip_count must be positive");
    if (s.groups.empty()) report(subject, "section has no access groups");
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
      const auto& group = s.groups[g];
      const std::string gsubject = subject + " group " + std::to_string(g);
      if (group.fields.empty()) report(gsubject, "access group has no fields");
      if (!(group.freq > 0.0)) report(gsubject, "freq must be positive");
      if (!(group.ops >= 0.0)) report(gsubject, "ops must be nonnegative");
      for (const auto& f : group.fields) {
        if (!field_names.contains(f)) {
          report(gsubject, "undeclared field '" + f + "'");
        }
      }
    }
    if (s.allowed_devices.empty()) report(subject, "allowed_devices is empty");
    for (const auto& d : s.allowed_devices) {
      if (!device_names.contains(d)) {
        report(subject, "device '" + d + "' is not in the architecture");
      } else {
        used_devices.insert(d);
      }
    }
  }

  // Execution order.
  std::set<std::string, std::less<>> ordered;
  for (const auto& id : program.order) {
    if (!section_ids.contains(id)) {
      report("order", "unknown section '" + id + "'");
    } else if (!ordered.insert(id).second) {
      report("order", "section '" + id + "' listed twice");
    }
  }
  for (const auto& s : program.sections) {
    if (!ordered.contains(s.id)) report("order", "section '" + s.id + "' missing from order");
  }

  // Every pair of devices the program can use must be connected.
  std::vector<std::string> used(used_devices.begin(), used_devices.end());
  for (std::size_t i = 0; i < used.size(); ++i) {
    for (std::size_t j = i + 1; j < used.size(); ++j) {
      if (arch.find_link(used[i], used[j]) == nullptr) {
        report("link " + used[i] + "<->" + used[j], "no link between devices");
      }
    }
  }
  return out;
}

}  // namespace adha
