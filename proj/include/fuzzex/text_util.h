#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fuzzex::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Lowercase, every non-alphanumeric character mapped to '_'.
std::string to_atom(std::string_view s);

// Fixed-point rendering with the given number of decimals.
std::string fixed(double value, int decimals);

// Shortest text that parses back to the same double.
std::string exact(double value);

// "a", "a and b", "a, b, and c".
std::string join_list(const std::vector<std::string>& items);

// Levenshtein distance, used for near-miss matching of names.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace fuzzex::text
