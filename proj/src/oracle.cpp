#include "adha/oracle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <tuple>
#include <unordered_map>

#include "adha/cost_model.hpp"
#include "adha/ods.hpp"

namespace adha::oracle {

namespace {

struct Enumerator {
  std::vector<Field> fields;  // decl order
  std::uint64_t capacity;
  const std::function<void(const Layout&)>& visit;
  std::vector<Layout::Cluster> clusters;
  std::vector<std::uint64_t> bytes;

  void run(std::size_t next) {
    if (next == fields.size()) {
      visit(Layout(clusters));
      return;
    }
    const Field& f = fields[next];
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (bytes[c] + f.elem_bytes > capacity) continue;
      clusters[c].push_back(f.name);
      bytes[c] += f.elem_bytes;
      run(next + 1);
      bytes[c] -= f.elem_bytes;
      clusters[c].pop_back();
    }
    if (f.elem_bytes > capacity) return;
    clusters.push_back({f.name});
    bytes.push_back(f.elem_bytes);
    run(next + 1);
    bytes.pop_back();
    clusters.pop_back();
  }
};

}  // namespace

void enumerate_layouts(std::span<const Field> fields, std::uint64_t capacity_bytes,
                       const std::function<void(const Layout&)>& visit) {
  if (fields.size() > kMaxEnumeratedFields) {
    throw InputError("layout enumeration is limited to " +
                     std::to_string(kMaxEnumeratedFields) + " fields, got " +
                     std::to_string(fields.size()));
  }
  if (fields.empty()) return;
  Enumerator e{{fields.begin(), fields.end()}, capacity_bytes, visit, {}, {}};
  std::sort(e.fields.begin(), e.fields.end(),
            [](const Field& a, const Field& b) { return a.decl_index < b.decl_index; });
  e.run(0);
}

namespace {

std::vector<Field> touched_fields(const Section& section, const Program& program) {
  std::vector<Field> touched;
  for (const auto& name : section.accessed_fields()) {
    const Field* f = program.find_field(name);
    if (f == nullptr) throw InputError("undeclared field '" + name + "'");
    touched.push_back(*f);
  }
  std::sort(touched.begin(), touched.end(),
            [](const Field& a, const Field& b) { return a.decl_index < b.decl_index; });
  return touched;
}

class BestLayout {
 public:
  void offer(const Layout& partial, const Section& section, const Device& device,
             const Program& program) {
    Layout full = extend_to_program(partial, program);
    const double cost = exec_cost(section, full, device, program).total_ns;
    std::string text = full.str();
    if (!best_ || cost < best_->cost_ns || (cost == best_->cost_ns && text < text_)) {
      best_ = OdsOptimum{std::move(full), cost};
      text_ = std::move(text);
    }
  }

  OdsOptimum take(const Section& section) {
    if (!best_) {
      throw InputError("no capacity-feasible layout for section '" + section.id + "'");
    }
    return std::move(*best_);
  }

 private:
  std::optional<OdsOptimum> best_;
  std::string text_;
};

}  // namespace

OdsOptimum enumerated_ods(const Section& section, const Device& device,
                          const Program& program) {
  BestLayout best;
  enumerate_layouts(touched_fields(section, program), device.cluster_capacity_bytes,
                    [&](const Layout& partial) { best.offer(partial, section, device, program); });
  return best.take(section);
}

OdsOptimum symmetric_ods_search(const Section& section, const Device& device,
                                const Program& program) {
  const std::vector<Field> touched = touched_fields(section, program);

  // Interchangeability classes, keyed by (elem_bytes, group membership).
  std::map<std::pair<std::uint32_t, std::vector<bool>>, std::size_t> class_of_key;
  std::vector<std::vector<std::string>> members;  // per class, decl order
  std::vector<std::uint64_t> class_bytes;
  for (const Field& f : touched) {
    std::vector<bool> membership;
    for (const auto& g : section.groups) {
      membership.push_back(std::find(g.fields.begin(), g.fields.end(), f.name) !=
                           g.fields.end());
    }
    auto [it, inserted] =
        class_of_key.emplace(std::make_pair(f.elem_bytes, membership), members.size());
    if (inserted) {
      members.emplace_back();
      class_bytes.push_back(f.elem_bytes);
    }
    members[it->second].push_back(f.name);
    if (f.elem_bytes > device.cluster_capacity_bytes) {
      throw InputError("field '" + f.name + "' exceeds cluster capacity");
    }
  }
  const std::size_t m = members.size();
  std::vector<std::size_t> remaining(m);
  for (std::size_t j = 0; j < m; ++j) remaining[j] = members[j].size();

  // Every feasible cluster count vector, in descending lexicographic order.
  std::vector<std::vector<std::size_t>> shapes;
  {
    std::vector<std::size_t> v(m, 0);
    std::function<void(std::size_t, std::uint64_t)> gen = [&](std::size_t j,
                                                              std::uint64_t bytes) {
      if (j == m) {
        if (bytes > 0) shapes.push_back(v);
        return;
      }
      for (std::size_t c = remaining[j] + 1; c-- > 0;) {
        const std::uint64_t b = bytes + c * class_bytes[j];
        if (b > device.cluster_capacity_bytes) continue;
        v[j] = c;
        gen(j + 1, b);
      }
      v[j] = 0;
    };
    gen(0, 0);
  }

  BestLayout best;
  std::uint64_t visited = 0;
  std::vector<std::size_t> chosen;  // indices into shapes, non-decreasing
  std::function<void(std::size_t)> search = [&](std::size_t first_shape) {
    if (std::all_of(remaining.begin(), remaining.end(), [](auto r) { return r == 0; })) {
      if (++visited > kMaxSymmetricCandidates) {
        throw InputError("symmetric layout search exceeded " +
                         std::to_string(kMaxSymmetricCandidates) + " candidates");
      }
      std::vector<std::size_t> next(m, 0);
      std::vector<Layout::Cluster> clusters;
      for (std::size_t s : chosen) {
        Layout::Cluster c;
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < shapes[s][j]; ++k) c.push_back(members[j][next[j]++]);
        }
        clusters.push_back(std::move(c));
      }
      best.offer(Layout::canonical(std::move(clusters), touched), section, device, program);
      return;
    }
    for (std::size_t s = first_shape; s < shapes.size(); ++s) {
      bool fits = true;
      for (std::size_t j = 0; j < m && fits; ++j) fits = shapes[s][j] <= remaining[j];
      if (!fits) continue;
      for (std::size_t j = 0; j < m; ++j) remaining[j] -= shapes[s][j];
      chosen.push_back(s);
      search(s);
      chosen.pop_back();
      for (std::size_t j = 0; j < m; ++j) remaining[j] += shapes[s][j];
    }
  };
  search(0);
  return best.take(section);
}

OdsOptimum brute_force_ods(const Section& section, const Device& device,
                           const Program& program) {
  if (section.accessed_fields().size() > kMaxEnumeratedFields) {
    return symmetric_ods_search(section, device, program);
  }
  return enumerated_ods(section, device, program);
}

Plan brute_force_plan(const Program& program, const Architecture& arch,
                      const TuningProfile* profile) {
  const auto ordered = program.ordered_sections();
  const std::size_t k = ordered.size();
  if (k == 0 || k > kMaxPlanSections) {
    throw InputError("plan enumeration needs 1.." + std::to_string(kMaxPlanSections) +
                     " sections, got " + std::to_string(k));
  }

  std::map<std::tuple<std::size_t, std::size_t, std::string>, RunNode> cache;
  auto node = [&](std::size_t b, std::size_t e, const Device& d) -> const RunNode& {
    auto key = std::make_tuple(b, e, d.name);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, make_run_node(program, b, e, d, profile)).first;
    }
    return it->second;
  };
  auto allowed = [&](std::size_t b, std::size_t e) {
    std::vector<const Device*> out;
    for (const auto& d : arch.devices) {
      bool ok = true;
      for (std::size_t i = b; i <= e; ++i) ok = ok && ordered[i]->allows(d.name);
      if (ok) out.push_back(&d);
    }
    return out;
  };

  std::optional<Plan> best;
  auto sequence = [](const Plan& p) {
    std::vector<std::pair<std::string, std::size_t>> seq;
    for (const auto& r : p.runs) seq.emplace_back(r.device, r.begin);
    return seq;
  };
  auto better = [&](const Plan& a, const Plan& b) {
    if (a.total_ns != b.total_ns) return a.total_ns < b.total_ns;
    if (a.runs.size() != b.runs.size()) return a.runs.size() < b.runs.size();
    return sequence(a) < sequence(b);
  };

  // Bit i of `cuts` set means a run boundary after section i.
  for (std::uint64_t cuts = 0; cuts < (std::uint64_t{1} << (k - 1)); ++cuts) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i + 1 == k || (cuts >> i) & 1U) {
        runs.emplace_back(begin, i);
        begin = i + 1;
      }
    }
    std::vector<std::vector<const Device*>> choices;
    bool feasible = true;
    for (const auto& [b, e] : runs) {
      choices.push_back(allowed(b, e));
      feasible = feasible && !choices.back().empty();
    }
    if (!feasible) continue;

    std::vector<std::size_t> pick(runs.size(), 0);
    while (true) {
      std::vector<RunNode> nodes;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        nodes.push_back(node(runs[r].first, runs[r].second, *choices[r][pick[r]]));
      }
      Plan candidate = assemble_plan(std::move(nodes), program, arch);
      if (!best || better(candidate, *best)) best = std::move(candidate);

      std::size_t r = 0;
      while (r < runs.size() && ++pick[r] == choices[r].size()) pick[r++] = 0;
      if (r == runs.size()) break;
    }
  }
  if (!best) throw InputError("no feasible plan: adjacent sections share no device path");
  return *best;
}

// ---------------------------------------------------------------------------
// Cache simulation

LruCache::LruCache(const CacheConfig& config) : config_(config), sets_(config.num_sets) {
  if (!is_power_of_two(config.line_bytes) || !is_power_of_two(config.num_sets) ||
      config.ways == 0) {
    throw InputError("cache needs power-of-two line_bytes and num_sets, ways >= 1");
  }
}

bool LruCache::access_line(std::uint64_t line_address) {
  ++accesses_;
  auto& set = sets_[line_address & (config_.num_sets - 1)];
  const std::uint64_t tag = line_address / config_.num_sets;
  auto it = std::find(set.begin(), set.end(), tag);
  if (it != set.end()) {
    std::rotate(set.begin(), it, it + 1);
    return true;
  }
  ++misses_;
  if (set.size() == config_.ways) set.pop_back();
  set.insert(set.begin(), tag);
  return false;
}

std::uint64_t simulate_misses(const Section& section, const Layout& layout,
                              const CacheConfig& config, const Program& program,
                              std::uint64_t iters, std::uint64_t seed) {
  if (iters == 0) throw InputError("simulation needs at least one iteration");
  LruCache cache(config);

  struct Placement {
    std::uint64_t base;
    std::uint64_t stride;
    std::uint64_t offset;
    std::uint32_t bytes;
  };
  std::unordered_map<std::string, Placement> where;
  std::uint64_t next_base = 0;
  const auto& clusters = layout.clusters();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const std::uint64_t stride = layout.cluster_bytes(c, program.fields);
    std::uint64_t offset = 0;
    for (const auto& name : clusters[c]) {
      const Field* f = program.find_field(name);
      where.emplace(name, Placement{next_base, stride, offset, f->elem_bytes});
      offset += f->elem_bytes;
    }
    next_base += stride * program.record_count;
    next_base = (next_base + config.line_bytes - 1) / config.line_bytes * config.line_bytes;
  }

  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < iters; ++i) {
    for (const auto& group : section.groups) {
      const std::uint64_t record = group.pattern == AccessPattern::irregular
                                       ? rng() % program.record_count
                                       : i % program.record_count;
      for (const auto& name : group.fields) {
        auto it = where.find(name);
        if (it == where.end()) {
          throw InputError("layout '" + layout.str() + "' is missing field '" + name + "'");
        }
        const Placement& p = it->second;
        const std::uint64_t addr = p.base + record * p.stride + p.offset;
        const std::uint64_t first = addr / config.line_bytes;
        const std::uint64_t last = (addr + p.bytes - 1) / config.line_bytes;
        for (std::uint64_t line = first; line <= last; ++line) cache.access_line(line);
      }
    }
  }
  return cache.misses();
}

// ---------------------------------------------------------------------------
// Random instances

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  // Uniform in [lo, hi], inclusive.
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return lo + rng_() % (hi - lo + 1);
  }
  double real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  bool chance(double p) { return real(0.0, 1.0) < p; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

Instance random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  Draw draw(seed);
  Instance inst;

  Device cpu;
  cpu.name = "cpu";
  cpu.line_bytes = 64;
  cpu.line_time_ns = draw.real(0.5, 2.0);
  cpu.throughput_ops_per_ns = draw.real(1.0, 8.0);
  cpu.coalescing = false;
  cpu.cluster_capacity_bytes = 1U << draw.integer(4, 6);
  Device gpu;
  gpu.name = "gpu";
  gpu.line_bytes = 128;
  gpu.line_time_ns = draw.real(0.1, 1.0);
  gpu.throughput_ops_per_ns = draw.real(4.0, 64.0);
  gpu.coalescing = true;
  gpu.stream_cluster_penalty = draw.real(1.0, 3.0);
  gpu.cluster_capacity_bytes = 1U << draw.integer(4, 7);
  inst.arch.devices = {cpu, gpu};
  inst.arch.links = {{"cpu", "gpu", draw.real(1.0, 16.0), draw.real(0.0, 1e4)}};
  inst.arch.same_device_remap_bandwidth_bytes_per_ns = draw.real(4.0, 32.0);
  inst.arch.remap_fixed_overhead_ns = draw.real(0.0, 1e3);

  Program& p = inst.program;
  p.name = "random-" + std::to_string(seed);
  const std::size_t field_count = draw.integer(1, std::max<std::size_t>(1, options.max_fields));
  for (std::size_t i = 0; i < field_count; ++i) {
    p.fields.push_back({"f" + std::to_string(i),
                        static_cast<std::uint32_t>(draw.chance(0.7) ? 4 : 8), i});
  }
  std::uint64_t max_trip = 1;
  const std::size_t section_count =
      draw.integer(1, std::max<std::size_t>(1, options.max_sections));
  for (std::size_t s = 0; s < section_count; ++s) {
    Section sec;
    sec.id = "s" + std::to_string(s + 1);
    sec.trip_count = draw.integer(100, 100000);
    max_trip = std::max(max_trip, sec.trip_count);
    const std::size_t groups = draw.integer(1, std::max<std::size_t>(1, options.max_groups));
    for (std::size_t g = 0; g < groups; ++g) {
      AccessGroup group;
      const std::size_t size = draw.integer(1, std::min<std::size_t>(4, field_count));
      std::vector<std::size_t> idx(field_count);
      for (std::size_t i = 0; i < field_count; ++i) idx[i] = i;
      for (std::size_t i = 0; i < size; ++i) {
        std::swap(idx[i], idx[draw.integer(i, field_count - 1)]);
        group.fields.push_back(p.fields[idx[i]].name);
      }
      group.freq = draw.real(0.5, 4.0);
      group.pattern = draw.chance(0.5) ? AccessPattern::streaming : AccessPattern::irregular;
      group.ops = draw.chance(0.5) ? draw.real(0.0, 20.0) : 0.0;
      sec.groups.push_back(std::move(group));
    }
    const double roll = draw.real(0.0, 1.0);
    if (roll < 0.7) {
      sec.allowed_devices = {"cpu", "gpu"};
    } else if (roll < 0.85) {
      sec.allowed_devices = {"cpu"};
    } else {
      sec.allowed_devices = {"gpu"};
    }
    p.order.push_back(sec.id);
    p.sections.push_back(std::move(sec));
  }
  p.record_count = max_trip;

  if (options.with_profile) {
    for (const auto& sec : p.sections) {
      for (const auto& dname : sec.allowed_devices) {
        const Device& d = inst.arch.device(dname);
        if (draw.chance(0.3)) {
          const Layout own = ods(sec, d, p);
          const double model = exec_cost(sec, own, d, p).total_ns;
          inst.profile.add(sec.id, dname, own.str(), model * draw.real(0.3, 1.5));
        }
        if (draw.chance(0.2)) {
          const Layout soa = Layout::soa(p.fields);
          if (!inst.profile.find(sec.id, dname, soa.str())) {
            const double model = exec_cost(sec, soa, d, p).total_ns;
            inst.profile.add(sec.id, dname, soa.str(), model * draw.real(0.3, 1.5));
          }
        }
      }
    }
  }
  return inst;
}

}  // namespace adha::oracle
