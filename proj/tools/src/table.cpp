#include "equilens_cli/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "equilens/error.hpp"

namespace equilens::cli {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const CsvRow& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += "\r\n";
  return line;
}

std::vector<CsvRow> parse_csv(std::string_view text, std::string_view source) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw FormatError(std::string(source) + ":" + std::to_string(line) +
                            ": quote inside an unquoted field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw FormatError(std::string(source) + ": unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path), path.string());
}

std::string format_double(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text, std::string_view where) {
  double v = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), v);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw FormatError(std::string(where) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

long long parse_integer(std::string_view text, std::string_view where) {
  long long v = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), v);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw FormatError(std::string(where) + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

std::size_t LatentTable::meta_column(std::string_view name) const {
  for (std::size_t i = 0; i < meta_names.size(); ++i) {
    if (meta_names[i] == name) return i;
  }
  std::string known;
  for (const auto& m : meta_names) known += (known.empty() ? "" : ", ") + m;
  throw InputError("no metadata column '" + std::string(name) + "' (available: " +
                   (known.empty() ? "none" : known) + ")");
}

std::size_t LatentTable::row_of(std::string_view id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  throw InputError("no latent with id '" + std::string(id) + "'");
}

std::string dump_latent_table(const LatentTable& table) {
  CsvRow header{"id", "group"};
  header.insert(header.end(), table.meta_names.begin(), table.meta_names.end());
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) header.push_back("z" + std::to_string(c));
  std::string out = csv_line(header);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    CsvRow row{table.ids[r], table.group};
    const auto ri = static_cast<Eigen::Index>(r);
    for (Eigen::Index m = 0; m < table.meta.cols(); ++m) row.push_back(format_double(table.meta(ri, m)));
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      row.push_back(format_double(table.values(ri, c)));
    }
    out += csv_line(row);
  }
  return out;
}

LatentTable parse_latent_table(std::string_view text, std::string_view source) {
  const std::string where(source);
  const auto rows = parse_csv(text, source);
  if (rows.empty()) throw FormatError(where + ": empty latent table");
  const CsvRow& header = rows.front();
  if (header.size() < 3 || header[0] != "id" || header[1] != "group") {
    throw FormatError(where + ":1: latent tables start with columns id,group");
  }
  LatentTable table;
  std::size_t first_latent = header.size();
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c] == "z0") {
      first_latent = c;
      break;
    }
    table.meta_names.push_back(header[c]);
  }
  for (std::size_t c = first_latent; c < header.size(); ++c) {
    if (header[c] != "z" + std::to_string(c - first_latent)) {
      throw FormatError(where + ":1: expected column 'z" + std::to_string(c - first_latent) +
                        "', got '" + header[c] + "'");
    }
  }
  if (first_latent == header.size()) throw FormatError(where + ":1: no latent columns z0, z1, ...");
  const auto rows_count = static_cast<Eigen::Index>(rows.size() - 1);
  const auto dim = static_cast<Eigen::Index>(header.size() - first_latent);
  table.meta.resize(rows_count, static_cast<Eigen::Index>(table.meta_names.size()));
  table.values.resize(rows_count, dim);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const std::string at = where + ":" + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw FormatError(at + ": expected " + std::to_string(header.size()) + " fields, got " +
                        std::to_string(row.size()));
    }
    table.ids.push_back(row[0]);
    if (r == 1) {
      table.group = row[1];
    } else if (row[1] != table.group) {
      throw FormatError(at + ": mixed group specs in one table");
    }
    const auto ri = static_cast<Eigen::Index>(r - 1);
    for (std::size_t m = 0; m < table.meta_names.size(); ++m) {
      table.meta(ri, static_cast<Eigen::Index>(m)) = parse_double(row[2 + m], at);
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double v = parse_double(row[first_latent + static_cast<std::size_t>(c)], at);
      if (!std::isfinite(v)) throw FormatError(at + ": non-finite latent value");
      table.values(ri, c) = v;
    }
  }
  return table;
}

LatentTable read_latent_table(const std::filesystem::path& path) {
  return parse_latent_table(read_text_file(path), path.string());
}

}  // namespace equilens::cli
