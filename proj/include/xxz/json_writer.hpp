#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace xxz {

using Json = nlohmann::ordered_json;

// "%.17g"; non-finite values become "inf", "-inf" or "nan".
std::string format_double(double v);

// Pretty JSON with every floating-point number printed to 17 significant
// digits. Non-finite numbers are written as null.
void write_json(std::ostream& os, const Json& value, int indent = 2);

}  // namespace xxz
