#include "asdal/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

namespace asdal {
namespace {

constexpr std::size_t kFixedColumns = 4;

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != last) {
    throw DataError("not a real number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<Sample> read_dataset(std::istream& in, std::string_view source_name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(source_name) + ": no samples");
  strip_cr(line);
  const auto header = split_csv_line(line);
  if (header.size() <= kFixedColumns || header[0] != "id" || header[1] != "machine" ||
      header[2] != "domain" || header[3] != "label") {
    throw DataError(where(source_name, 1) + "header must be id,machine,domain,label,e0,...");
  }
  const std::size_t dim = header.size() - kFixedColumns;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[kFixedColumns + j] != "e" + std::to_string(j)) {
      throw DataError(where(source_name, 1) + "expected column 'e" + std::to_string(j) + "'");
    }
  }

  std::vector<Sample> samples;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw DataError(where(source_name, line_no) + "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(f.size()));
    }
    try {
      if (f[0].empty()) throw DataError("empty id");
      if (f[1].empty()) throw DataError("empty machine");
      Domain domain;
      if (f[2] == "source") {
        domain = Domain::Source;
      } else if (f[2] == "target") {
        domain = Domain::Target;
      } else {
        throw DataError("domain must be 'source' or 'target', got '" + std::string(f[2]) + "'");
      }
      Label label;
      if (f[3] == "0") {
        label = Label::Normal;
      } else if (f[3] == "1") {
        label = Label::Anomalous;
      } else {
        throw DataError("label must be 0 or 1, got '" + std::string(f[3]) + "'");
      }
      std::vector<double> values(dim);
      for (std::size_t j = 0; j < dim; ++j) values[j] = parse_real(f[kFixedColumns + j]);
      Sample s{std::string(f[0]), std::string(f[1]), domain, label, Embedding(std::move(values))};
      if (!ids.insert(s.id).second) throw DataError("duplicate id '" + s.id + "'");
      samples.push_back(std::move(s));
    } catch (const DataError& ex) {
      throw DataError(where(source_name, line_no) + ex.what());
    }
  }
  if (samples.empty()) throw DataError(std::string(source_name) + ": no samples");
  return samples;
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return read_dataset(in, path.string());
}

void write_dataset(std::ostream& out, std::span<const Sample> samples) {
  if (samples.empty()) throw DataError("refusing to write an empty dataset");
  const std::size_t dim = samples.front().embedding.dim();
  out << "id,machine,domain,label";
  for (std::size_t j = 0; j < dim; ++j) out << ",e" << j;
  out << '\n';
  auto plain = [](const std::string& field) {
    return !field.empty() && field.find_first_of(",\r\n") == std::string::npos;
  };
  for (const auto& s : samples) {
    if (s.embedding.dim() != dim) throw DataError("dataset mixes embedding dimensions");
    if (!plain(s.id) || !plain(s.machine)) {
      throw DataError("id and machine must be non-empty and free of commas and newlines");
    }
    out << s.id << ',' << s.machine << ',' << to_string(s.domain) << ','
        << static_cast<int>(s.label);
    for (double v : s.embedding.values()) out << ',' << format_real(v);
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, std::span<const Sample> samples) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset '" + path.string() + "'");
  write_dataset(out, samples);
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

}  // namespace asdal
