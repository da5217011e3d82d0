#pragma once

// Batch driver behind the `adha` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "adha/oracle.hpp"

namespace adha::cli {

enum class Command { ods, pdl, explain, simulate, oracle_check };

std::optional<Command> parse_command(std::string_view text);

struct RunConfiguration {
  Command command = Command::pdl;
  std::string program_path;
  std::string arch_path;
  std::optional<std::string> profile_path;
  std::optional<std::string> device;       // ods, simulate
  std::optional<std::string> output_path;  // stdout when absent
  bool dot = false;
  std::uint64_t seed = 0;

  // simulate
  std::optional<std::string> section;
  std::optional<std::string> layout;
  std::uint64_t iters = 4096;
  oracle::CacheConfig cache;

  // oracle-check: extra seeded random instances on top of the given program
  std::uint64_t random_instances = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

// Runs one command. Primary output goes to `output_path` or `out`;
// diagnostics go to `err`. Returns one of the exit codes above.
int run(const RunConfiguration& config, std::ostream& out, std::ostream& err);

}  // namespace adha::cli
