#include "oscimark/csv.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oscimark/errors.hpp"

namespace oscimark {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    std::string field = (pos == std::string::npos)
                            ? line.substr(start)
                            : line.substr(start, pos - start);
    // trim whitespace and CR
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ' || field.back() == '\t'))
      field.pop_back();
    std::size_t f = 0;
    while (f < field.size() && (field[f] == ' ' || field[f] == '\t')) ++f;
    out.push_back(field.substr(f));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, "cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::vector<std::pair<std::string, std::string>> read_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, "cannot open file: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Schema, "malformed key=value line in " + path + ": " + line);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Schema, "cannot write file: " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Schema, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& context) {
  if (s.empty()) throw Error(ErrorKind::Schema, "empty numeric field (" + context + ")");
  double v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::Schema, "non-numeric value '" + s + "' (" + context + ")");
  return v;
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace oscimark
