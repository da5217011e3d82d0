#include <gtest/gtest.h>

#include "adha/cost_model.hpp"
#include "adha/io.hpp"
#include "adha/ods.hpp"
#include "adha/oracle.hpp"
#include "adha/pdl.hpp"
#include "test_support.hpp"

namespace adha {
namespace {

using namespace adha::testing;

Program chain(std::size_t k) {
  std::vector<Section> ss;
  for (std::size_t i = 0; i < k; ++i) {
    ss.push_back(section("s" + std::to_string(i + 1), 1000,
                         {irregular({"A", "B"}), streaming({"C"}, 1.0, 4.0)}));
  }
  return program(fields_of({"A", "B", "C"}), ss);
}

std::size_t count_edges_into_sink(const RunGraph& g) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.to == g.sink();
  return n;
}

TEST(RunGraph, NodeAndEdgeCounts) {
  const Architecture a = cpu_gpu();
  const RunGraph g1 = build_run_graph(chain(1), a);
  EXPECT_EQ(g1.nodes().size(), 2U);
  EXPECT_EQ(g1.edges().size(), 4U);
  EXPECT_EQ(count_edges_into_sink(g1), 2U);

  EXPECT_EQ(build_run_graph(chain(2), a).nodes().size(), 6U);
  EXPECT_EQ(build_run_graph(chain(7), a).nodes().size(), 56U);
}

TEST(RunGraph, RunsRespectEveryMembersDevices) {
  Program p = chain(3);
  p.sections[1].allowed_devices = {"cpu"};
  const RunGraph g = build_run_graph(p, cpu_gpu());
  for (const auto& n : g.nodes()) {
    if (n.begin <= 1 && n.end >= 1) {
      EXPECT_EQ(n.device, "cpu");
    }
  }
  // 6 runs on cpu, plus gpu for (1,1) and (3,3).
  EXPECT_EQ(g.nodes().size(), 8U);
}

TEST(RunGraph, SectionWithoutDevicesIsRejected) {
  Program p = chain(2);
  p.sections[1].allowed_devices.clear();
  EXPECT_THROW(build_run_graph(p, cpu_gpu()), InputError);
}

TEST(ShortestPlan, SingleSectionPicksCheaperDevice) {
  const Program p = chain(1);
  const Architecture a = cpu_gpu();
  const Plan plan = shortest_plan(build_run_graph(p, a));
  ASSERT_EQ(plan.runs.size(), 1U);
  EXPECT_TRUE(plan.remaps.empty());
  const double cpu = exec_cost(p.sections[0], ods(p.sections[0], a.device("cpu"), p),
                               a.device("cpu"), p).total_ns;
  const double gpu = exec_cost(p.sections[0], ods(p.sections[0], a.device("gpu"), p),
                               a.device("gpu"), p).total_ns;
  EXPECT_EQ(plan.runs[0].device, cpu <= gpu ? "cpu" : "gpu");
  EXPECT_DOUBLE_EQ(plan.total_ns, std::min(cpu, gpu));
}

Plan fixture_plan(const std::string& stem, Program* program_out = nullptr) {
  const Program p = io::load_program(fixture(stem + ".program.json"));
  const Architecture a = io::load_architecture(fixture(stem + ".arch.json"));
  const TuningProfile prof = io::load_profile(fixture(stem + ".profile.json"));
  if (program_out != nullptr) *program_out = p;
  return shortest_plan(build_run_graph(p, a, &prof));
}

TEST(ShortestPlan, MedicalFixtureSplitsCpuThenGpu) {
  Program p;
  const Plan plan = fixture_plan("medical", &p);
  ASSERT_EQ(plan.runs.size(), 2U);
  EXPECT_EQ(plan.runs[0].begin, 0U);
  EXPECT_EQ(plan.runs[0].end, 2U);
  EXPECT_EQ(plan.runs[0].device, "cpu");
  EXPECT_EQ(plan.runs[1].begin, 3U);
  EXPECT_EQ(plan.runs[1].end, 6U);
  EXPECT_EQ(plan.runs[1].device, "gpu");
  ASSERT_EQ(plan.remaps.size(), 1U);
  EXPECT_EQ(plan.remaps[0].after, 3U);
  EXPECT_EQ(plan.remaps[0].moved, (std::vector<std::string>{"V1", "V2", "V3"}));

  const std::string report = explain_plan(plan, p);
  EXPECT_NE(report.find("moved {V1,V2,V3}"), std::string::npos) << report;
}

TEST(ShortestPlan, KMeansFixtureIsOneCpuRun) {
  const Plan plan = fixture_plan("kmeans");
  ASSERT_EQ(plan.runs.size(), 1U);
  EXPECT_EQ(plan.runs[0].device, "cpu");
  EXPECT_EQ(plan.runs[0].sections.size(), 2U);
  EXPECT_TRUE(plan.remaps.empty());
}

TEST(ExplainPlan, SingleRunReport) {
  const Program p = chain(1);
  const Plan plan = shortest_plan(build_run_graph(p, cpu_gpu()));
  const std::string report = explain_plan(plan, p);
  EXPECT_EQ(report.find("remap after"), std::string::npos);
  EXPECT_NE(report.find("1 run, 0 remaps"), std::string::npos) << report;
  EXPECT_EQ(report, explain_plan(plan, p));
  char total[64];
  std::snprintf(total, sizeof total, "total_ns %.3f\n", plan.total_ns);
  EXPECT_NE(report.find(total), std::string::npos);
}

TEST(RunGraphDot, HighlightsChosenRuns) {
  const Program p = chain(2);
  const RunGraph g = build_run_graph(p, cpu_gpu());
  const Plan plan = shortest_plan(g);
  const std::string dot = run_graph_dot(g, &plan);
  EXPECT_EQ(dot.rfind("digraph", 0), 0U);
  EXPECT_NE(dot.find("color=red"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Properties over random instances.

Architecture slower_remaps(Architecture a, double extra_ns_per_byte) {
  a.same_device_remap_bandwidth_bytes_per_ns =
      1.0 / (1.0 / a.same_device_remap_bandwidth_bytes_per_ns + extra_ns_per_byte);
  for (auto& l : a.links) {
    l.bandwidth_bytes_per_ns = 1.0 / (1.0 / l.bandwidth_bytes_per_ns + extra_ns_per_byte);
  }
  return a;
}

class PlanProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PlanProperties, CoverOptimalityDeterminismMonotonicity) {
  const oracle::Instance inst = oracle::random_instance(GetParam());
  const Program& p = inst.program;
  const RunGraph g = build_run_graph(p, inst.arch, &inst.profile);
  const Plan plan = shortest_plan(g);

  std::size_t next = 0;
  double sum = 0.0;
  for (const auto& r : plan.runs) {
    EXPECT_EQ(r.begin, next);
    next = r.end + 1;
    sum += r.exec_ns;
  }
  EXPECT_EQ(next, p.order.size());
  ASSERT_EQ(plan.remaps.size(), plan.runs.size() - 1);
  for (const auto& r : plan.remaps) sum += r.cost_ns;
  EXPECT_NEAR(plan.total_ns, sum, 1e-9 * sum);
  for (std::size_t i = 0; i + 1 < plan.runs.size(); ++i) {
    if (plan.runs[i].device == plan.runs[i + 1].device &&
        plan.runs[i].layout == plan.runs[i + 1].layout) {
      EXPECT_EQ(plan.remaps[i].cost_ns, 0.0);
    }
  }

  const Plan slow = oracle::brute_force_plan(p, inst.arch, &inst.profile);
  EXPECT_NEAR(plan.total_ns, slow.total_ns, 1e-12 * slow.total_ns);

  const Plan again = shortest_plan(build_run_graph(p, inst.arch, &inst.profile));
  EXPECT_EQ(explain_plan(again, p), explain_plan(plan, p));
  EXPECT_EQ(io::dump(io::to_json(again)), io::dump(io::to_json(plan)));

  const Architecture slower = slower_remaps(inst.arch, 0.5);
  const Plan degraded = shortest_plan(build_run_graph(p, slower, &inst.profile));
  EXPECT_GE(degraded.total_ns, plan.total_ns * (1.0 - 1e-12));
}

INSTANTIATE_TEST_SUITE_P(Seeds, PlanProperties, ::testing::Range<std::uint64_t>(1, 101));

TEST(ShortestPlan, TiesPreferFewerRuns) {
  // Both devices identical, no remap cost difference: every plan ties on the
  // combined run; fewer runs and then device name order decide.
  Architecture a = cpu_gpu();
  a.devices[1] = cpu_device();
  a.devices[1].name = "gpu";
  const Program p = chain(3);
  const Plan plan = shortest_plan(build_run_graph(p, a));
  ASSERT_EQ(plan.runs.size(), 1U);
  EXPECT_EQ(plan.runs[0].device, "cpu");
  EXPECT_EQ(plan.total_ns, oracle::brute_force_plan(p, a).total_ns);
}

}  // namespace
}  // namespace adha
