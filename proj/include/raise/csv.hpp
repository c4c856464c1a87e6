#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "raise/diag.hpp"

namespace raise::csv {

/// Header row plus data rows; all fields are raw text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 style: comma separated, LF (or CRLF) records, double quotes
/// around fields containing commas, quotes or newlines, quote escaped by
/// doubling. `locus_prefix` (usually the file name) labels diagnostics.
inline ParseResult<Table> parse(std::string_view text, const std::string& locus_prefix = {}) {
  std::vector<Diagnostic> diags;
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;

  auto end_field = [&] {
    fields.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (field_started || !fields.empty()) {
      end_field();
      records.push_back(fields);
      fields.clear();
    }
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty())
          diags.push_back(err("CSV001", "quote inside unquoted field",
                              locus_prefix + ":" + std::to_string(line)));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // a comma always opens the next field
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes)
    diags.push_back(err("CSV002", "unterminated quoted field",
                        locus_prefix + ":" + std::to_string(line)));
  end_record();

  if (records.empty()) diags.push_back(err("CSV003", "file has no header row", locus_prefix));
  if (!diags.empty()) return diags;

  Table t;
  t.header = records.front();
  t.rows.assign(records.begin() + 1, records.end());
  return t;
}

inline std::string quote_field(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Writes LF-terminated rows with minimal quoting.
inline std::string write(const Table& t) {
  std::string out;
  auto write_row = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += quote_field(row[i]);
    }
    out += '\n';
  };
  write_row(t.header);
  for (const auto& r : t.rows) write_row(r);
  return out;
}

}  // namespace raise::csv
