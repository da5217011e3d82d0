#pragma once

// Program / architecture / layout data model shared by every pass.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace adha {

// Raised when an input violates a pass precondition (unknown device, field
// wider than a cluster, malformed layout text, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AccessPattern { streaming, irregular };

std::string_view to_string(AccessPattern pattern);
std::optional<AccessPattern> parse_access_pattern(std::string_view text);

struct Field {
  std::string name;
  std::uint32_t elem_bytes = 4;
  std::size_t decl_index = 0;
};

// One co-occurrence site: the fields touched together by one access in the
// loop body, how often per iteration, and whether it vectorizes.
struct AccessGroup {
  std::vector<std::string> fields;
  double freq = 1.0;
  AccessPattern pattern = AccessPattern::streaming;
  double ops = 0.0;
};

struct Section {
  std::string id;
  std::uint64_t trip_count = 1;
  std::vector<AccessGroup> groups;
  std::vector<std::string> allowed_devices;

  bool allows(std::string_view device) const;
  // Union of all group field sets, deduplicated, in first-seen order.
  std::vector<std::string> accessed_fields() const;
};

struct Program {
  std::string name;
  std::uint64_t record_count = 1;
  std::vector<Field> fields;
  std::vector<Section> sections;
  std::vector<std::string> order;

  const Field* find_field(std::string_view name) const;
  const Section* find_section(std::string_view id) const;
  // Sections in execution order. Throws InputError on a dangling id.
  std::vector<const Section*> ordered_sections() const;
};

struct Device {
  std::string name;
  std::uint32_t line_bytes = 64;
  double line_time_ns = 1.0;
  double throughput_ops_per_ns = 1.0;
  bool coalescing = false;
  double stream_cluster_penalty = 2.0;
  std::uint32_t cluster_capacity_bytes = 64;
};

struct Link {
  std::string from;
  std::string to;
  double bandwidth_bytes_per_ns = 1.0;
  double latency_ns = 0.0;
};

struct Architecture {
  std::vector<Device> devices;
  std::vector<Link> links;
  double same_device_remap_bandwidth_bytes_per_ns = 1.0;
  double remap_fixed_overhead_ns = 0.0;

  const Device* find_device(std::string_view name) const;
  const Device& device(std::string_view name) const;
  // Links are symmetric; either direction matches.
  const Link* find_link(std::string_view a, std::string_view b) const;
};

// A partition of a field set into clusters. Size >= 2 clusters are AoS
// groups, singletons are SoA arrays. Canonical form: fields inside a cluster
// sorted by decl_index, clusters sorted by their minimum decl_index.
class Layout {
 public:
  using Cluster = std::vector<std::string>;

  Layout() = default;
  // Stores clusters as given; use canonical() to normalize.
  explicit Layout(std::vector<Cluster> clusters);

  static Layout canonical(std::vector<Cluster> clusters,
                          std::span<const Field> fields);
  // All-singleton layout over `fields`.
  static Layout soa(std::span<const Field> fields);
  // Inverse of str(). Throws InputError on malformed text or repeated names.
  static Layout parse(std::string_view text);

  Layout canonicalized(std::span<const Field> fields) const;
  bool is_canonical(std::span<const Field> fields) const;

  const std::vector<Cluster>& clusters() const { return clusters_; }
  std::size_t field_count() const;
  std::optional<std::size_t> cluster_of(std::string_view field) const;
  bool contains(std::string_view field) const {
    return cluster_of(field).has_value();
  }
  std::uint64_t cluster_bytes(std::size_t cluster,
                              std::span<const Field> fields) const;

  // "{f,g,h}|{x}|{y}", no whitespace.
  std::string str() const;

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::vector<Cluster> clusters_;
};

std::string canonical_layout_string(const Layout& layout);

// Measured execution times keyed by (section id, device, canonical layout).
class TuningProfile {
 public:
  // Throws InputError on a duplicate key or a non-positive time.
  void add(std::string section, std::string device, std::string layout,
           double time_ns);
  std::optional<double> find(std::string_view section, std::string_view device,
                             std::string_view layout) const;
  bool erase(std::string_view section, std::string_view device,
             std::string_view layout);
  std::size_t size() const { return entries_.size(); }

  struct Entry {
    std::string section;
    std::string device;
    std::string layout;
    double time_ns;
  };
  std::vector<Entry> entries() const;

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, double, std::less<>> entries_;
};

struct Diagnostic {
  std::string subject;  // section / field / device identity
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::vector<Diagnostic> validate_program(const Program& program,
                                         const Architecture& arch);

bool is_power_of_two(std::uint64_t value);

}  // namespace adha
