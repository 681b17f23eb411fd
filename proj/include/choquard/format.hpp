#pragma once

#include <string>

namespace choquard {

/// Shortest-stable text for a double: 17 significant digits, "null" when not finite.
std::string fmt17(double v);

/// Quotes and escapes a string for JSON.
std::string json_string(const std::string& s);

}  // namespace choquard
