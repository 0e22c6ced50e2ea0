#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gafzero {

// %.12g-style formatting, used for canonical descriptor echoes.
std::string format_double(double x);

std::vector<std::string> split(std::string_view text, char sep);

// Strict double/int parsing; throws std::invalid_argument with `what` in
// the message on garbage or trailing junk.
double parse_double_strict(std::string_view text, const std::string& what);
long long parse_int_strict(std::string_view text, const std::string& what);

}  // namespace gafzero
