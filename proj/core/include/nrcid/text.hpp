#ifndef NRCID_TEXT_HPP
#define NRCID_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nrcid {

// Shortest decimal form that parses back to the identical double.
// All file formats use this so re-runs are byte-identical.
std::string format_double(double value);

// Locale-independent strict parsers; on failure raise DecodeParse with
// `what` naming the field being parsed.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// FNV-1a 64-bit, used as the serialization checksum.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace nrcid

#endif
