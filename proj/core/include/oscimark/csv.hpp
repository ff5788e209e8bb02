#pragma once

#include <map>
#include <string>
#include <vector>

namespace oscimark {

// Minimal CSV + key=value file helpers. No quoting support -- the formats
// this tool reads and writes never contain embedded commas.

std::vector<std::string> split_csv_line(const std::string& line);

std::vector<std::vector<std::string>> read_csv(const std::string& path);

// key=value lines; '#' starts a comment, blank lines ignored, order kept.
std::vector<std::pair<std::string, std::string>> read_kv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Round-trip-exact decimal serialization (17 significant digits).
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);

// FNV-1a over bytes; used to stamp outputs with the config that made them.
std::string content_hash(const std::string& bytes);

}  // namespace oscimark
