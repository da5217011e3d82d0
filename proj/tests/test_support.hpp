#pragma once

#include <string>
#include <vector>

#include "adha/model.hpp"

namespace adha::testing {

inline std::string fixture(const std::string& name) {
  return std::string(ADHA_FIXTURE_DIR) + "/" + name;
}

inline Device cpu_device(std::uint32_t capacity = 64) {
  Device d;
  d.name = "cpu";
  d.line_bytes = 64;
  d.line_time_ns = 1.0;
  d.throughput_ops_per_ns = 4.0;
  d.coalescing = false;
  d.cluster_capacity_bytes = capacity;
  return d;
}

inline Device gpu_device(std::uint32_t capacity = 128) {
  Device d;
  d.name = "gpu";
  d.line_bytes = 128;
  d.line_time_ns = 0.5;
  d.throughput_ops_per_ns = 64.0;
  d.coalescing = true;
  d.stream_cluster_penalty = 2.0;
  d.cluster_capacity_bytes = capacity;
  return d;
}

inline Architecture cpu_gpu(std::uint32_t cpu_capacity = 64, std::uint32_t gpu_capacity = 128) {
  Architecture a;
  a.devices = {cpu_device(cpu_capacity), gpu_device(gpu_capacity)};
  a.links = {{"cpu", "gpu", 8.0, 1000.0}};
  a.same_device_remap_bandwidth_bytes_per_ns = 16.0;
  a.remap_fixed_overhead_ns = 100.0;
  return a;
}

inline std::vector<Field> fields_of(const std::vector<std::string>& names,
                                    std::uint32_t bytes = 4) {
  std::vector<Field> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], bytes, i});
  return out;
}

inline AccessGroup streaming(std::vector<std::string> fields, double freq = 1.0,
                             double ops = 0.0) {
  return {std::move(fields), freq, AccessPattern::streaming, ops};
}

inline AccessGroup irregular(std::vector<std::string> fields, double freq = 1.0,
                             double ops = 0.0) {
  return {std::move(fields), freq, AccessPattern::irregular, ops};
}

inline Section section(std::string id, std::uint64_t trip, std::vector<AccessGroup> groups,
                       std::vector<std::string> devices = {"cpu", "gpu"}) {
  return {std::move(id), trip, std::move(groups), std::move(devices)};
}

inline Program program(std::vector<Field> fields, std::vector<Section> sections,
                       std::uint64_t records = 1024) {
  Program p;
  p.name = "test";
  p.record_count = records;
  p.fields = std::move(fields);
  for (const auto& s : sections) p.order.push_back(s.id);
  p.sections = std::move(sections);
  return p;
}

inline const std::vector<std::string>& medical_names() {
  static const std::vector<std::string> names = {"V1", "V2", "V3", "U1", "U2",
                                                 "U3", "S",  "T",  "interpT"};
  return names;
}

inline std::vector<std::string> kmeans_names() {
  std::vector<std::string> names;
  for (int i = 0; i < 32; ++i) names.push_back((i < 10 ? "f0" : "f") + std::to_string(i));
  return names;
}

}  // namespace adha::testing
