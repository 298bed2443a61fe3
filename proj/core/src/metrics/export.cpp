#include "ranharness/metrics/export.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

#include "ranharness/common/format.hpp"

namespace ranharness::metrics {

std::optional<ExportFormat> parse_export_format(const std::string& s) {
  if (s == "csv") return ExportFormat::csv;
  if (s == "json") return ExportFormat::json;
  return std::nullopt;
}

void write_csv(const MetricsStore& store, std::ostream& out) {
  out << "measurement,tags,ts_slot,field,value\n";
  for (const auto& s : store.snapshot()) {
    const std::string tags = format_tags(s.tags);
    for (const auto& [field, samples] : s.fields)
      for (const auto& sample : samples)
        out << s.measurement << ',' << tags << ',' << sample.slot << ',' << field << ','
            << format_double(sample.value) << '\n';
  }
}

void write_json(const MetricsStore& store, std::ostream& out) {
  // One series per line keeps large exports diffable.
  out << "{\"series\":[";
  bool first = true;
  for (const auto& s : store.snapshot()) {
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();
    for (const auto& [field, samples] : s.fields) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& sample : samples) arr.push_back({sample.slot, sample.value});
      fields[field] = std::move(arr);
    }
    nlohmann::ordered_json series{{"measurement", s.measurement}, {"tags", s.tags}, {"fields", fields}};
    out << (first ? "\n" : ",\n") << series.dump();
    first = false;
  }
  out << "\n]}\n";
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    auto end = line.find(sep, pos);
    parts.push_back(line.substr(pos, end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return parts;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

MetricsStore read_csv(std::istream& in) {
  MetricsStore store;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "measurement,tags,ts_slot,field,value")
    throw std::runtime_error("csv: missing header");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 5)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 5 columns");
    MetricPoint p;
    p.measurement = parts[0];
    p.tags = parse_tags(parts[1]);
    p.ts_slot = parse_number<std::uint64_t>(parts[2], line_no);
    p.fields[parts[3]] = parse_number<double>(parts[4], line_no);
    store.insert(p);
  }
  return store;
}

MetricsStore read_json(std::istream& in) {
  MetricsStore store;
  auto doc = nlohmann::json::parse(in);
  for (const auto& s : doc.at("series")) {
    MetricPoint base;
    base.measurement = s.at("measurement").get<std::string>();
    base.tags = s.at("tags").get<Tags>();
    for (const auto& [field, samples] : s.at("fields").items()) {
      for (const auto& pair : samples) {
        MetricPoint p = base;
        p.ts_slot = pair.at(0).get<std::uint64_t>();
        p.fields[field] = pair.at(1).get<double>();
        store.insert(p);
      }
    }
  }
  return store;
}

void export_store(const MetricsStore& store, ExportFormat format,
                  const std::filesystem::path& path) {
  std::ostringstream buf;
  if (format == ExportFormat::csv)
    write_csv(store, buf);
  else
    write_json(store, buf);

  errno = 0;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    const int err = errno ? errno : EIO;
    throw std::system_error(err, std::generic_category(), "cannot write " + path.string());
  }
  const std::string bytes = buf.str();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    const int err = errno ? errno : EIO;
    throw std::system_error(err, std::generic_category(), "write failed for " + path.string());
  }
}

MetricsStore import_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "cannot read " + path.string());
  if (path.extension() == ".json") return read_json(in);
  return read_csv(in);
}

}  // namespace ranharness::metrics
