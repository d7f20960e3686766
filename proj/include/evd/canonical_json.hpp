#pragma once

#include <string>

#include "json.hpp"

namespace evd {

/// Shortest decimal text that parses back to exactly `v`. Negative zero is
/// written as "-0.0" so it survives a JSON round-trip; non-finite values are
/// written as null.
std::string format_double(double v);

/// Canonical serialization: object keys in byte order, no insignificant
/// whitespace, floats via format_double.
std::string canonical_dump(const nlohmann::json& value);

}  // namespace evd
