#include "daqn/xprun/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace daqn {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format value");
  return std::string(buf, ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

template <class T>
T parse_number(const std::string& s, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_csv(std::vector<MetricRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return std::tie(a.seed, a.milestone, a.metric) < std::tie(b.seed, b.milestone, b.metric);
  });
  std::string out = std::string(kCsvHeader) + '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.seed) + ',' + std::to_string(r.milestone) + ',' + r.metric + ',' + format_double(r.value) +
           ',' + r.method + ',' + r.env + ',' + r.config_hash + '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, std::vector<MetricRow> rows) {
  const std::string text = format_csv(std::move(rows));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<MetricRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("line 1: expected header '" + std::string(kCsvHeader) + "'");
  std::vector<MetricRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) throw std::runtime_error("line " + std::to_string(n) + ": expected 7 fields");
    rows.push_back({parse_number<std::uint64_t>(f[0], n), parse_number<long>(f[1], n), f[2],
                    parse_number<double>(f[3], n), f[4], f[5], f[6]});
  }
  return rows;
}

std::vector<MetricRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace daqn
