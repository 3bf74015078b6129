#pragma once

#include <string>

#include "halfline/types.hpp"
#include "json.hpp"

namespace halfline::tools {

using Json = nlohmann::json;

// 17 significant digits, shortest %g form, negative zero normalized to "0".
// Round-trips exactly through a correctly-rounded parser. Non-finite values
// are refused; nothing in the result set may be NaN or infinite.
std::string format_double(double v);

// Deterministic serialization: keys in byte order, two-space indentation,
// numbers through format_double, trailing newline. Parsing the output and
// re-serializing reproduces it byte for byte.
std::string canonical_json(const Json& doc);

void write_json_file(const std::string& path, const Json& doc);

// Complex numbers are carried as two-element arrays [re, im].
Json complex_json(Complex z);

}  // namespace halfline::tools
