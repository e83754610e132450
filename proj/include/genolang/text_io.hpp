#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace genolang {

// Whole-file helpers. Failures raise ErrorKind::io naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Splits text into lines; accepts LF and CRLF, drops the trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line, char delimiter);
std::string_view trim(std::string_view s);

// Parsers that reject trailing garbage; return false on failure.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

// Shortest 17-significant-digit rendering, stable under round trip.
std::string format_g17(double x);
// Shortest decimal that parses back to the same double.
std::string format_shortest(double x);
std::string format_fixed(double x, int decimals);

std::string sha256_hex(std::string_view data);

} // namespace genolang
