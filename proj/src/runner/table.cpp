#include "jamgame/runner/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace jamgame::runner {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell(const nlohmann::json& v, int digits) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>(), digits);
  if (v.is_string()) return quote(v.get<std::string>());
  return quote(v.dump());
}

}  // namespace

std::string format_number(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x == 0.0 ? 0.0 : x);
  return buf;
}

std::string emit_table(const std::vector<std::string>& columns, const std::vector<nlohmann::json>& rows,
                       int digits) {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << quote(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      if (row.contains(columns[i])) out << cell(row.at(columns[i]), digits);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace jamgame::runner
