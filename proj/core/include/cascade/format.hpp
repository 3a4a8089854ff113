#pragma once

#include <string>
#include <string_view>

namespace cascade {

/// Shortest decimal text that parses back to exactly `x`. Output is a pure
/// function of the bit pattern, so files written with it are reproducible.
std::string format_double(double x);

bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::string_view trim(std::string_view s);

} // namespace cascade
