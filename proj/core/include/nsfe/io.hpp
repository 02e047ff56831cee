#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nsfe/core.hpp"

namespace nsfe {

/// One decimal float per line, LF endings. A trailing newline is optional;
/// blank or malformed lines raise ParseError with the 1-based line number.
ThetaVector parse_theta(std::string_view text);
ThetaVector read_theta_file(const std::string& path);
std::string format_theta(const ThetaVector& theta);
void write_theta_file(const std::string& path, const ThetaVector& theta);

/// Accepts either a JSON object or `key=value` lines with keys d, s, eps,
/// gamma and optional c. Lines starting with '#' are comments.
ProblemConfig parse_config(std::string_view text);
std::string config_to_json(const ProblemConfig& cfg);
std::string config_to_key_value(const ProblemConfig& cfg);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace nsfe
