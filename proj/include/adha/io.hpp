#pragma once

// JSON encodings of the data model. Every top-level document carries
// "schema_version": 1.

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "adha/model.hpp"
#include "adha/pdl.hpp"

namespace adha::io {

inline constexpr int kSchemaVersion = 1;

// Unreadable file, malformed JSON, missing keys or wrong types.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Program program_from_json(const nlohmann::json& j);
Architecture architecture_from_json(const nlohmann::json& j);
// Accepts either a bare array of {section, device, layout, time_ns} or an
// object {"schema_version": 1, "entries": [...]}.
TuningProfile profile_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Program& program);
nlohmann::json to_json(const Architecture& arch);
nlohmann::json to_json(const TuningProfile& profile);
nlohmann::json to_json(const Plan& plan);

nlohmann::json read_json_file(const std::filesystem::path& path);
Program load_program(const std::filesystem::path& path);
Architecture load_architecture(const std::filesystem::path& path);
TuningProfile load_profile(const std::filesystem::path& path);

// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace adha::io
