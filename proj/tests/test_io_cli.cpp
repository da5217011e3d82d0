#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adha/cli.hpp"
#include "adha/io.hpp"
#include "adha/oracle.hpp"
#include "test_support.hpp"

namespace adha {
namespace {

namespace fs = std::filesystem;
using namespace adha::testing;
using nlohmann::json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("adha-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(Io, ProgramArchitectureProfileRoundTrip) {
  const oracle::Instance inst = oracle::random_instance(5);
  const Program p = io::program_from_json(io::to_json(inst.program));
  EXPECT_EQ(io::dump(io::to_json(p)), io::dump(io::to_json(inst.program)));
  const Architecture a = io::architecture_from_json(io::to_json(inst.arch));
  EXPECT_EQ(io::dump(io::to_json(a)), io::dump(io::to_json(inst.arch)));
  const TuningProfile prof = io::profile_from_json(io::to_json(inst.profile));
  EXPECT_EQ(io::dump(io::to_json(prof)), io::dump(io::to_json(inst.profile)));
}

TEST(Io, ProfileAcceptsBareArray) {
  const json j = json::parse(R"([{"section":"s","device":"cpu","layout":"{A}|{B}","time_ns":5}])");
  EXPECT_EQ(io::profile_from_json(j).find("s", "cpu", "{A}|{B}"), 5.0);
}

TEST(Io, RejectsMalformedDocuments) {
  EXPECT_THROW(io::profile_from_json(json::parse(
                   R"([{"section":"s","device":"cpu","layout":"{A} | {B}","time_ns":5}])")),
               io::ParseError);
  json p = io::to_json(oracle::random_instance(1).program);
  p["sections"][0]["groups"][0]["pattern"] = "Streaming";
  EXPECT_THROW(io::program_from_json(p), io::ParseError);
  p = io::to_json(oracle::random_instance(1).program);
  p["schema_version"] = 2;
  EXPECT_THROW(io::program_from_json(p), io::ParseError);
  p = io::to_json(oracle::random_instance(1).program);
  p["record_count"] = -3;
  EXPECT_THROW(io::program_from_json(p), io::ParseError);
  EXPECT_THROW(io::load_program("/nonexistent/adha.json"), io::ParseError);
}

TEST(Io, PlanJsonShape) {
  const Program p = io::load_program(fixture("kmeans.program.json"));
  const Architecture a = io::load_architecture(fixture("kmeans.arch.json"));
  const json j = io::to_json(shortest_plan(build_run_graph(p, a)));
  EXPECT_EQ(j["schema_version"], 1);
  ASSERT_TRUE(j["runs"].is_array());
  EXPECT_TRUE(j["runs"][0].contains("sections"));
  EXPECT_TRUE(j["runs"][0].contains("device"));
  EXPECT_TRUE(j["runs"][0].contains("layout"));
  EXPECT_TRUE(j["runs"][0].contains("exec_ns"));
  EXPECT_TRUE(j["remaps"].is_array());
  EXPECT_TRUE(j["total_ns"].is_number());
}

cli::RunConfiguration medical(cli::Command command) {
  cli::RunConfiguration c;
  c.command = command;
  c.program_path = fixture("medical.program.json");
  c.arch_path = fixture("medical.arch.json");
  c.profile_path = fixture("medical.profile.json");
  return c;
}

TEST(Cli, ParseCommand) {
  EXPECT_EQ(cli::parse_command("oracle-check"), cli::Command::oracle_check);
  EXPECT_FALSE(cli::parse_command("plan").has_value());
}

TEST(Cli, PdlOnMedicalFixture) {
  TempDir dir;
  cli::RunConfiguration c = medical(cli::Command::pdl);
  c.output_path = (dir / "plan.json").string();
  c.dot = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(c, out, err), cli::kExitOk) << err.str();
  const json plan = json::parse(slurp(dir / "plan.json"));
  ASSERT_EQ(plan["runs"].size(), 2U);
  EXPECT_EQ(plan["runs"][0]["device"], "cpu");
  EXPECT_EQ(plan["runs"][0]["sections"], json({"s1", "s2", "s3"}));
  EXPECT_EQ(plan["runs"][1]["device"], "gpu");
  EXPECT_EQ(plan["runs"][1]["sections"], json({"s4", "s5", "s6", "s7"}));
  ASSERT_EQ(plan["remaps"].size(), 1U);
  EXPECT_EQ(plan["remaps"][0]["moved"], json({"V1", "V2", "V3"}));
  EXPECT_EQ(plan["remaps"][0]["after"], 3);
  EXPECT_NE(slurp(dir / "plan.json.txt").find("moved {V1,V2,V3}"), std::string::npos);
  EXPECT_EQ(slurp(dir / "plan.json.dot").rfind("digraph", 0), 0U);
}

TEST(Cli, RepeatedRunsAreByteIdenticalAndInputsUntouched) {
  TempDir dir;
  const std::string before = slurp(fixture("medical.program.json"));
  for (auto command : {cli::Command::pdl, cli::Command::ods, cli::Command::simulate,
                       cli::Command::explain}) {
    cli::RunConfiguration c = medical(command);
    c.device = "cpu";
    c.iters = 256;
    c.dot = command != cli::Command::simulate;
    c.output_path = (dir / "a.out").string();
    std::ostringstream out, err;
    ASSERT_EQ(cli::run(c, out, err), cli::kExitOk) << err.str();
    c.output_path = (dir / "b.out").string();
    ASSERT_EQ(cli::run(c, out, err), cli::kExitOk) << err.str();
    EXPECT_EQ(slurp(dir / "a.out"), slurp(dir / "b.out"));
    EXPECT_FALSE(slurp(dir / "a.out").empty());
  }
  EXPECT_EQ(slurp(fixture("medical.program.json")), before);
}

TEST(Cli, UnknownDeviceIsAValidationFailure) {
  cli::RunConfiguration c = medical(cli::Command::ods);
  c.device = "tpu";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kExitInvalid);
  EXPECT_NE(err.str().find("tpu"), std::string::npos);
  EXPECT_TRUE(out.str().empty());
}

TEST(Cli, MissingDeviceIsAValidationFailure) {
  cli::RunConfiguration c = medical(cli::Command::simulate);
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kExitInvalid);
}

TEST(Cli, InvalidProgramReportsDiagnostics) {
  TempDir dir;
  json p = io::read_json_file(fixture("medical.program.json"));
  p["sections"][0]["groups"][0]["fields"].push_back("X");
  write(dir / "bad.json", p.dump());
  cli::RunConfiguration c = medical(cli::Command::pdl);
  c.program_path = (dir / "bad.json").string();
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kExitInvalid);
  EXPECT_NE(err.str().find("X"), std::string::npos);
}

TEST(Cli, IoAndParseFailuresExitTwo) {
  TempDir dir;
  std::ostringstream out, err;
  cli::RunConfiguration c = medical(cli::Command::pdl);
  c.program_path = (dir / "missing.json").string();
  EXPECT_EQ(cli::run(c, out, err), cli::kExitIo);

  write(dir / "broken.json", "{ not json");
  c = medical(cli::Command::pdl);
  c.arch_path = (dir / "broken.json").string();
  EXPECT_EQ(cli::run(c, out, err), cli::kExitIo);
}

TEST(Cli, OracleCheckOnKMeans) {
  cli::RunConfiguration c;
  c.command = cli::Command::oracle_check;
  c.program_path = fixture("kmeans.program.json");
  c.arch_path = fixture("kmeans.arch.json");
  c.profile_path = fixture("kmeans.profile.json");
  c.random_instances = 3;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(c, out, err), cli::kExitOk) << err.str();
  const json report = json::parse(out.str());
  EXPECT_TRUE(report["ok"].get<bool>());
  const json& rows = report["instance"]["ods"];
  ASSERT_EQ(rows.size(), 4U);
  for (const auto& row : rows) EXPECT_TRUE(row["identical"].get<bool>()) << row.dump();
  EXPECT_TRUE(report["instance"]["plan"]["equal"].get<bool>());
  EXPECT_GE(report["summary"]["ods_checked"].get<int>(), 4);
  EXPECT_EQ(report["random"].size(), 3U);
}

TEST(Cli, SimulateReportsMisses) {
  cli::RunConfiguration c = medical(cli::Command::simulate);
  c.device = "cpu";
  c.section = "s5";
  c.iters = 512;
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(c, out, err), cli::kExitOk) << err.str();
  const json report = json::parse(out.str());
  ASSERT_EQ(report["results"].size(), 1U);
  EXPECT_EQ(report["results"][0]["layout"], "{V1}|{V2}|{V3}|{U1,U2,U3}|{S}|{T}|{interpT}");
  EXPECT_LT(report["results"][0]["misses"].get<std::uint64_t>(),
            report["results"][0]["soa_misses"].get<std::uint64_t>());
}

}  // namespace
}  // namespace adha
