#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace jamgame::runner {

/// Formats a finite number with `digits` significant digits.
std::string format_number(double x, int digits);

/// Comma-separated table: a header line, then one line per row. Cells come
/// from the row object by column name; missing keys are left empty, numbers
/// are printed with `digits` significant digits (integers in full).
std::string emit_table(const std::vector<std::string>& columns, const std::vector<nlohmann::json>& rows,
                       int digits = 4);

}  // namespace jamgame::runner
