#pragma once

// Ground truth for the passes: exhaustive layout / plan search, and a
// set-associative LRU cache simulator to sanity-check the analytic cost model.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "adha/model.hpp"
#include "adha/pdl.hpp"

namespace adha::oracle {

inline constexpr std::size_t kMaxEnumeratedFields = 12;  // Bell(12) ~ 4.2M
inline constexpr std::size_t kMaxPlanSections = 6;

// Calls `visit` once per set partition of `fields` whose clusters each fit
// in `capacity_bytes`. Layouts are canonical; order is restricted-growth
// order over decl_index. Throws InputError above kMaxEnumeratedFields.
void enumerate_layouts(std::span<const Field> fields, std::uint64_t capacity_bytes,
                       const std::function<void(const Layout&)>& visit);

struct OdsOptimum {
  Layout layout;
  double cost_ns = 0.0;
};

// Model-cost argmin over all capacity-feasible layouts of the section's
// fields (untouched program fields stay singletons). Ties go to the smaller
// canonical string. Sections with more than kMaxEnumeratedFields fields are
// handed to symmetric_ods_search.
OdsOptimum brute_force_ods(const Section& section, const Device& device,
                           const Program& program);

// Plain enumeration only; throws above kMaxEnumeratedFields.
OdsOptimum enumerated_ods(const Section& section, const Device& device,
                          const Program& program);

inline constexpr std::uint64_t kMaxSymmetricCandidates = 5'000'000;

// Exact search over partitions of field *classes*: fields with the same
// elem_bytes and the same group memberships are interchangeable, so the model
// cost of a layout only depends on how many members of each class every
// cluster holds. Each multiset partition is realized by handing class members
// out in decl order to clusters taken in descending count-vector order; ties
// go to the smaller canonical string among those realizations. Throws when
// more than kMaxSymmetricCandidates partitions would be visited.
OdsOptimum symmetric_ods_search(const Section& section, const Device& device,
                                const Program& program);

// Exhaustive minimum over every contiguous partition of the execution order
// and every per-run device choice, with the same tie-break as shortest_plan.
Plan brute_force_plan(const Program& program, const Architecture& arch,
                      const TuningProfile* profile = nullptr);

struct CacheConfig {
  std::uint32_t line_bytes = 64;
  std::uint32_t num_sets = 64;
  std::uint32_t ways = 8;
};

class LruCache {
 public:
  explicit LruCache(const CacheConfig& config);
  // True on hit. Misses install the line, evicting the least recently used.
  bool access_line(std::uint64_t line_address);
  std::uint64_t misses() const { return misses_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  CacheConfig config_;
  std::vector<std::vector<std::uint64_t>> sets_;  // most recent first
  std::uint64_t misses_ = 0;
  std::uint64_t accesses_ = 0;
};

// Replays `iters` iterations of `section` under `layout` and counts misses.
// Each cluster owns a line-aligned region of record_count records; field f of
// record i lives at base(c) + i * bytes(c) + offset(f). Streaming groups hit
// record i; irregular groups hit one record per iteration drawn as
// mt19937_64(seed)() % record_count and shared by all the group's fields.
std::uint64_t simulate_misses(const Section& section, const Layout& layout,
                              const CacheConfig& config, const Program& program,
                              std::uint64_t iters, std::uint64_t seed);

struct RandomInstanceOptions {
  std::size_t max_fields = 8;
  std::size_t max_sections = 5;
  std::size_t max_groups = 3;
  bool with_profile = true;
};

struct Instance {
  Program program;
  Architecture arch;
  TuningProfile profile;
};

// Small valid program + cpu/gpu architecture drawn from `seed`.
Instance random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

}  // namespace adha::oracle
