#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <string>

namespace nsfe {

/// Extended-precision real (50 significant decimal digits).
using xreal = boost::multiprecision::cpp_bin_float_50;

/// Decimal representation that parses back to the identical value.
std::string to_decimal_string(const xreal& value);
xreal xreal_from_string(const std::string& text);

}  // namespace nsfe
