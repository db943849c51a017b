#pragma once

#include <istream>
#include <map>
#include <string>

namespace collab {

/// Reads a flat `key = value` file. Blank lines and '#' comments are skipped;
/// keys are trimmed and '-' is normalized to '_'. Duplicate keys or lines
/// without '=' throw Error{InvalidConfig}.
std::map<std::string, std::string> read_key_values(std::istream& in);

/// Strict numeric parse; accepts "inf". Throws Error{InvalidConfig}
/// naming `field` on failure.
double parse_real(const std::string& text, const std::string& field);

}  // namespace collab
