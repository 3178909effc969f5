#pragma once

#include <json.hpp>

#include <string>

namespace fsl {

inline constexpr const char* kReportSchema = "fsl-report/1";
inline constexpr const char* kToolVersion = "1.0.0";

// %.17g for every floating value, sorted keys, two-space indent
std::string format_double(double x);
std::string dump_report(const nlohmann::json& doc);

// Adds schema and tool version, then writes. Throws IoError.
void write_report(const nlohmann::json& doc, const std::string& path);
void write_text(const std::string& text, const std::string& path);

}  // namespace fsl
