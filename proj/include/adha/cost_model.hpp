#pragma once

// Analytic section execution cost, remap cost and combine loss. Measured
// tuning-profile entries take precedence over the model.

#include <string>
#include <vector>

#include "adha/model.hpp"

namespace adha {

enum class CostSource { model, profile };

struct CostBreakdown {
  double memory_ns = 0.0;
  double compute_ns = 0.0;
  double total_ns = 0.0;
  CostSource source = CostSource::model;
};

// Time of `section` on `device` under `layout`. `layout` must span every
// program field. A null profile means model only.
//
// Model: each group G costs trip * freq per iteration of
//   streaming: sum over touched clusters c of bytes(c) / line_bytes
//              (x stream_cluster_penalty when the device coalesces and |c|>1)
//   irregular: one line per touched cluster
// times line_time_ns, plus trip * freq * ops / throughput for compute.
CostBreakdown exec_cost(const Section& section, const Layout& layout,
                        const Device& device, const Program& program,
                        const TuningProfile* profile = nullptr);

struct RemapCost {
  std::vector<std::string> moved;  // in declaration order
  std::uint64_t bytes = 0;
  double cost_ns = 0.0;
};

// Cost of relayouting the `common` fields from (from_layout, from_device) to
// (to_layout, to_device). On the same device only fields whose cluster
// (restricted to `common`) changes move; across devices all of `common` moves.
RemapCost remap_cost(const Layout& from_layout, const Device& from_device,
                     const Layout& to_layout, const Device& to_device,
                     const std::vector<std::string>& common,
                     const Program& program, const Architecture& arch);

// Fields accessed by both field lists, in declaration order.
std::vector<std::string> common_fields(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b,
                                       const Program& program);

// Extra time of running s1 and s2 under the ODS layout of their merge versus
// each under its own ODS layout.
double combine_loss(const Section& s1, const Section& s2, const Device& device,
                    const Program& program, const TuningProfile* profile = nullptr);

}  // namespace adha
