#pragma once

// Deterministic JSON output: keys in insertion order, two-space indent,
// floats with 17 significant digits, scalar arrays on one line.

#include <json.hpp>

#include <string>

namespace pwcalc::cli {

using Json = nlohmann::ordered_json;

/// "%.17g", with ".0" appended when the result would read back as an integer
/// (keeps -0.0 and integral doubles bit-exact through a parse).
std::string format_double(double v);

std::string dump(const Json& j);

} // namespace pwcalc::cli
