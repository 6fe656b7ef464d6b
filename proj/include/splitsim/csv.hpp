#pragma once

#include <string>
#include <vector>

namespace splitsim {

/// Deterministic number formatting for CSV output: shortest-ish fixed style
/// via %.12g, so identical runs produce byte-identical files.
std::string csv_num(double v);

/// RFC-4180 field escaping (quotes fields containing comma, quote or newline).
std::string csv_escape(const std::string& field);

std::string csv_row(const std::vector<std::string>& fields);

}  // namespace splitsim
