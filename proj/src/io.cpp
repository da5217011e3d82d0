#include "adha/io.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

namespace adha::io {

using nlohmann::json;

namespace {

void check_version(const json& j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  if (!j.contains("schema_version")) return;
  if (!j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion) {
    throw ParseError(std::string(what) + ": unsupported schema_version " +
                     j["schema_version"].dump());
  }
}

template <typename T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) {
    throw ParseError(std::string(where) + ": missing key '" + key + "'");
  }
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_unsigned()) {
      throw ParseError(std::string(where) + ": key '" + key +
                       "' must be a nonnegative integer");
    }
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(where) + ": key '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

}  // namespace

Program program_from_json(const json& j) {
  check_version(j, "program");
  Program p;
  p.name = get<std::string>(j, "name", "program");
  p.record_count = get<std::uint64_t>(j, "record_count", "program");

  const json fields = get<json>(j, "fields", "program");
  if (!fields.is_array()) throw ParseError("program: 'fields' must be an array");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const json& f = fields[i];
    const std::string where = "program field " + std::to_string(i);
    p.fields.push_back({get<std::string>(f, "name", where),
                        get<std::uint32_t>(f, "elem_bytes", where),
                        get_or<std::size_t>(f, "decl_index", i, where)});
  }

  const json sections = get<json>(j, "sections", "program");
  if (!sections.is_array()) throw ParseError("program: 'sections' must be an array");
  for (const json& s : sections) {
    Section sec;
    sec.id = get<std::string>(s, "id", "program section");
    const std::string where = "section " + sec.id;
    sec.trip_count = get<std::uint64_t>(s, "trip_count", where);
    sec.allowed_devices = get<std::vector<std::string>>(s, "allowed_devices", where);
    const json groups = get<json>(s, "groups", where);
    if (!groups.is_array()) throw ParseError(where + ": 'groups' must be an array");
    for (const json& g : groups) {
      AccessGroup group;
      group.fields = get<std::vector<std::string>>(g, "fields", where);
      group.freq = get<double>(g, "freq", where);
      const auto pattern = get<std::string>(g, "pattern", where);
      const auto parsed = parse_access_pattern(pattern);
      if (!parsed) {
        throw ParseError(where + ": pattern must be \"streaming\" or \"irregular\", got \"" +
                         pattern + "\"");
      }
      group.pattern = *parsed;
      group.ops = get_or<double>(g, "ops", 0.0, where);
      sec.groups.push_back(std::move(group));
    }
    p.sections.push_back(std::move(sec));
  }

  if (j.contains("order")) {
    p.order = get<std::vector<std::string>>(j, "order", "program");
  } else {
    for (const auto& s : p.sections) p.order.push_back(s.id);
  }
  return p;
}

Architecture architecture_from_json(const json& j) {
  check_version(j, "architecture");
  Architecture a;
  const json devices = get<json>(j, "devices", "architecture");
  if (!devices.is_array()) throw ParseError("architecture: 'devices' must be an array");
  for (const json& d : devices) {
    Device dev;
    dev.name = get<std::string>(d, "name", "device");
    const std::string where = "device " + dev.name;
    dev.line_bytes = get<std::uint32_t>(d, "line_bytes", where);
    dev.line_time_ns = get<double>(d, "line_time_ns", where);
    dev.throughput_ops_per_ns = get<double>(d, "throughput_ops_per_ns", where);
    dev.coalescing = get<bool>(d, "coalescing", where);
    dev.stream_cluster_penalty = get_or<double>(d, "stream_cluster_penalty", 2.0, where);
    dev.cluster_capacity_bytes =
        get_or<std::uint32_t>(d, "cluster_capacity_bytes", dev.line_bytes, where);
    a.devices.push_back(std::move(dev));
  }
  if (j.contains("links")) {
    for (const json& l : get<json>(j, "links", "architecture")) {
      a.links.push_back({get<std::string>(l, "from", "link"), get<std::string>(l, "to", "link"),
                         get<double>(l, "bandwidth_bytes_per_ns", "link"),
                         get_or<double>(l, "latency_ns", 0.0, "link")});
    }
  }
  a.same_device_remap_bandwidth_bytes_per_ns =
      get<double>(j, "same_device_remap_bandwidth_bytes_per_ns", "architecture");
  a.remap_fixed_overhead_ns = get_or<double>(j, "remap_fixed_overhead_ns", 0.0, "architecture");
  return a;
}

TuningProfile profile_from_json(const json& j) {
  const json* entries = &j;
  if (j.is_object()) {
    check_version(j, "profile");
    if (!j.contains("entries")) throw ParseError("profile: missing key 'entries'");
    entries = &j["entries"];
  }
  if (!entries->is_array()) throw ParseError("profile: expected an array of entries");
  TuningProfile profile;
  for (const json& e : *entries) {
    std::string layout = get<std::string>(e, "layout", "profile entry");
    try {
      // Keys must already be canonical strings; reject anything that does not
      // print back identically.
      if (Layout::parse(layout).str() != layout) {
        throw ParseError("profile: layout '" + layout + "' is not a canonical string");
      }
      profile.add(get<std::string>(e, "section", "profile entry"),
                  get<std::string>(e, "device", "profile entry"), std::move(layout),
                  get<double>(e, "time_ns", "profile entry"));
    } catch (const InputError& err) {
      throw ParseError(std::string("profile: ") + err.what());
    }
  }
  return profile;
}

json to_json(const Program& program) {
  json fields = json::array();
  for (const auto& f : program.fields) {
    fields.push_back({{"name", f.name}, {"elem_bytes", f.elem_bytes},
                      {"decl_index", f.decl_index}});
  }
  json sections = json::array();
  for (const auto& s : program.sections) {
    json groups = json::array();
    for (const auto& g : s.groups) {
      groups.push_back({{"fields", g.fields}, {"freq", g.freq},
                        {"pattern", std::string(to_string(g.pattern))}, {"ops", g.ops}});
    }
    sections.push_back({{"id", s.id}, {"trip_count", s.trip_count},
                        {"allowed_devices", s.allowed_devices}, {"groups", groups}});
  }
  return {{"schema_version", kSchemaVersion}, {"name", program.name},
          {"record_count", program.record_count}, {"fields", fields},
          {"sections", sections}, {"order", program.order}};
}

json to_json(const Architecture& arch) {
  json devices = json::array();
  for (const auto& d : arch.devices) {
    devices.push_back({{"name", d.name}, {"line_bytes", d.line_bytes},
                       {"line_time_ns", d.line_time_ns},
                       {"throughput_ops_per_ns", d.throughput_ops_per_ns},
                       {"coalescing", d.coalescing},
                       {"stream_cluster_penalty", d.stream_cluster_penalty},
                       {"cluster_capacity_bytes", d.cluster_capacity_bytes}});
  }
  json links = json::array();
  for (const auto& l : arch.links) {
    links.push_back({{"from", l.from}, {"to", l.to},
                     {"bandwidth_bytes_per_ns", l.bandwidth_bytes_per_ns},
                     {"latency_ns", l.latency_ns}});
  }
  return {{"schema_version", kSchemaVersion}, {"devices", devices}, {"links", links},
          {"same_device_remap_bandwidth_bytes_per_ns",
           arch.same_device_remap_bandwidth_bytes_per_ns},
          {"remap_fixed_overhead_ns", arch.remap_fixed_overhead_ns}};
}

json to_json(const TuningProfile& profile) {
  json entries = json::array();
  for (const auto& e : profile.entries()) {
    entries.push_back({{"section", e.section}, {"device", e.device},
                       {"layout", e.layout}, {"time_ns", e.time_ns}});
  }
  return {{"schema_version", kSchemaVersion}, {"entries", entries}};
}

json to_json(const Plan& plan) {
  json runs = json::array();
  for (const auto& r : plan.runs) {
    runs.push_back({{"sections", r.sections}, {"device", r.device},
                    {"layout", r.layout.str()}, {"exec_ns", r.exec_ns}});
  }
  json remaps = json::array();
  for (const auto& r : plan.remaps) {
    remaps.push_back({{"after", r.after}, {"moved", r.moved}, {"cost_ns", r.cost_ns}});
  }
  return {{"schema_version", kSchemaVersion}, {"runs", runs}, {"remaps", remaps},
          {"total_ns", plan.total_ns}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

Program load_program(const std::filesystem::path& path) {
  return program_from_json(read_json_file(path));
}

Architecture load_architecture(const std::filesystem::path& path) {
  return architecture_from_json(read_json_file(path));
}

TuningProfile load_profile(const std::filesystem::path& path) {
  return profile_from_json(read_json_file(path));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace adha::io
