#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asdal/types.hpp"

namespace asdal {

// Dataset CSV:
//
//   id,machine,domain,label,e0,e1,...,e{D-1}
//
// domain is `source` or `target`, label is 0 (normal) or 1 (anomalous).
// Reals are written in shortest round-trip form.

/// Throws DataError (with line numbers) on malformed rows, inconsistent
/// dimensions, invalid embeddings, duplicate ids or a file without samples.
[[nodiscard]] std::vector<Sample> read_dataset(std::istream& in,
                                               std::string_view source_name = "<stream>");
[[nodiscard]] std::vector<Sample> load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, std::span<const Sample> samples);
void save_dataset(const std::filesystem::path& path, std::span<const Sample> samples);

/// Shortest decimal string that parses back to the same double.
[[nodiscard]] std::string format_real(double value);
/// Strict full-string parse. Throws DataError on failure.
[[nodiscard]] double parse_real(std::string_view text);

[[nodiscard]] std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace asdal
