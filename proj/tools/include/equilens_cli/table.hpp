#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "equilens/linalg.hpp"

namespace equilens::cli {

using CsvRow = std::vector<std::string>;

// RFC 4180: fields containing a comma, quote, CR or LF are quoted and
// embedded quotes doubled. Lines end with CRLF.
std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& fields);

// Parses a whole document. Accepts LF or CRLF line ends; a final line break
// is optional. Errors carry the source name and line number.
std::vector<CsvRow> parse_csv(std::string_view text, std::string_view source);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view where);
long long parse_integer(std::string_view text, std::string_view where);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Latent code table:
//   id,group,<metadata columns>,z0,z1,...
// `group` records the acting group in the compact grammar (e.g. "sym:6").
// Metadata columns are numeric graph properties such as "class" or "prop".
struct LatentTable {
  std::vector<std::string> ids;
  std::string group;
  std::vector<std::string> meta_names;
  Matrix meta;  // rows x meta_names.size()
  Matrix values;

  std::size_t rows() const { return ids.size(); }
  // Index of a metadata column; throws InputError naming the known columns.
  std::size_t meta_column(std::string_view name) const;
  // Row index of an id; throws InputError when absent.
  std::size_t row_of(std::string_view id) const;
};

std::string dump_latent_table(const LatentTable& table);
LatentTable parse_latent_table(std::string_view text, std::string_view source);
LatentTable read_latent_table(const std::filesystem::path& path);

}  // namespace equilens::cli
