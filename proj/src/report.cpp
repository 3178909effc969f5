#include "fsl/report.hpp"

#include "fsl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fsl {

using nlohmann::json;

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

void emit(const json& j, std::ostringstream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        emit(it.value(), os, indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = true;
      for (const auto& x : j)
        if (x.is_structured()) flat = false;
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(j[i], os, indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(j[i], os, indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_report(const json& doc) {
  std::ostringstream os;
  emit(doc, os, 0);
  os << "\n";
  return os.str();
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

void write_report(const json& doc, const std::string& path) {
  json full = doc;
  full["schema"] = kReportSchema;
  full["tool_version"] = kToolVersion;
  write_text(dump_report(full), path);
}

}  // namespace fsl
