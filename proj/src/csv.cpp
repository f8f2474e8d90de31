#include "provis/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <iterator>
#include <sstream>

#include "provis/error.hpp"

namespace provis {

namespace {

struct Cell {
  std::string_view raw;  // for unquoted cells, a view into the source
  std::string unescaped; // for quoted cells
  bool quoted = false;
  std::string_view text() const { return quoted ? std::string_view(unescaped) : raw; }
};

class RecordReader {
 public:
  explicit RecordReader(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }

  /// Reads one record into `cells`; returns the line it started on.
  std::size_t next(std::vector<Cell>& cells) {
    cells.clear();
    const std::size_t start_line = line_;
    while (true) {
      Cell cell;
      if (pos_ < text_.size() && text_[pos_] == '"') {
        cell.quoted = true;
        ++pos_;
        while (true) {
          if (pos_ >= text_.size()) {
            throw Error(ErrorCode::ParseError, "unterminated quoted field", start_line);
          }
          char c = text_[pos_++];
          if (c == '"') {
            if (pos_ < text_.size() && text_[pos_] == '"') {
              cell.unescaped += '"';
              ++pos_;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line_;
            cell.unescaped += c;
          }
        }
        if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
            text_[pos_] != '\r') {
          throw Error(ErrorCode::ParseError, "unexpected character after closing quote",
                      start_line);
        }
      } else {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
               text_[pos_] != '\r') {
          if (text_[pos_] == '"') {
            throw Error(ErrorCode::ParseError, "quote inside unquoted field", start_line);
          }
          ++pos_;
        }
        cell.raw = text_.substr(begin, pos_ - begin);
      }
      cells.push_back(std::move(cell));
      if (pos_ >= text_.size()) break;
      char sep = text_[pos_++];
      if (sep == ',') continue;
      if (sep == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
      ++line_;
      break;
    }
    return start_line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

[[noreturn]] void bad_cell(const ColumnDef& col, std::string_view text, std::size_t line) {
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "' as " +
                  std::string(to_string(col.type)) + " for column '" + col.name + "'",
              line);
}

void append_cell(ColumnBuilder& b, const ColumnDef& col, const Cell& cell, std::size_t line) {
  if (col.type == ValueType::Text) {
    if (!cell.quoted && cell.raw.empty()) {
      b.append_null();
    } else {
      b.append_text(cell.text());
    }
    return;
  }
  std::string_view text = trim(cell.text());
  if (text.empty()) {
    b.append_null();
    return;
  }
  switch (col.type) {
    case ValueType::Int64: {
      std::int64_t v = 0;
      if (text.front() == '+') text.remove_prefix(1);
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size()) bad_cell(col, text, line);
      b.append_int(v);
      return;
    }
    case ValueType::Float64: {
      double v = 0.0;
      if (text.front() == '+') text.remove_prefix(1);
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size()) bad_cell(col, text, line);
      b.append_float(v);
      return;
    }
    case ValueType::Bool: {
      if (iequals(text, "true") || text == "1") {
        b.append_bool(true);
      } else if (iequals(text, "false") || text == "0") {
        b.append_bool(false);
      } else {
        bad_cell(col, text, line);
      }
      return;
    }
    case ValueType::PolygonList: {
      try {
        b.append_polygons(parse_polygons(text));
      } catch (const Error&) {
        bad_cell(col, text, line);
      }
      return;
    }
    default: bad_cell(col, text, line);
  }
}

}  // namespace

RelationPtr ingest_csv(std::string_view text, const Schema& schema, std::string name) {
  RecordReader reader(text);
  std::vector<Cell> cells;
  if (reader.done()) {
    throw Error(ErrorCode::SchemaMismatch, "'" + name + "': missing header row");
  }
  reader.next(cells);
  if (cells.size() != schema.size()) {
    throw Error(ErrorCode::SchemaMismatch, "'" + name + "': header has " +
                                               std::to_string(cells.size()) + " columns, schema " +
                                               std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (trim(cells[i].text()) != schema.at(i).name) {
      throw Error(ErrorCode::SchemaMismatch, "'" + name + "': header column '" +
                                                 std::string(cells[i].text()) + "' expected '" +
                                                 schema.at(i).name + "'");
    }
  }
  std::vector<ColumnBuilder> builders;
  builders.reserve(schema.size());
  for (const auto& col : schema.columns()) builders.emplace_back(col.type);
  const auto estimate = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  for (auto& b : builders) b.reserve(estimate);

  while (!reader.done()) {
    const std::size_t line = reader.next(cells);
    // A trailing newline leaves one empty record behind; so does a blank line.
    if (cells.size() == 1 && !cells[0].quoted && cells[0].raw.empty()) continue;
    if (cells.size() != schema.size()) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line) + ": expected " + std::to_string(schema.size()) +
                      " fields, found " + std::to_string(cells.size()),
                  line);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      append_cell(builders[i], schema.at(i), cells[i], line);
    }
  }
  std::vector<Column> columns;
  columns.reserve(builders.size());
  std::optional<std::size_t> rows;
  for (auto& b : builders) {
    rows = b.size();
    columns.push_back(b.finish());
  }
  return std::make_shared<const Relation>(std::move(name), schema, std::move(columns),
                                          RelationKind::Base, rows.value_or(0));
}

RelationPtr ingest_csv(std::istream& source, const Schema& schema, std::string name) {
  std::string text((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  return ingest_csv(std::string_view(text), schema, std::move(name));
}

RelationPtr ingest_csv(Catalog& catalog, std::string_view text, const Schema& schema,
                       std::string name) {
  if (catalog.contains(name)) {
    throw Error(ErrorCode::DuplicateRelationName, "relation '" + name + "' already loaded");
  }
  auto rel = ingest_csv(text, schema, std::move(name));
  catalog.add(rel);
  return rel;
}

std::string format_csv_cell(const Value& v) {
  if (v.is_null()) return {};
  std::string text = to_text(v);
  bool quote = v.type() == ValueType::PolygonList;
  if (v.type() == ValueType::Text) {
    quote = text.empty() || text.find_first_of(",\"\r\n") != std::string::npos ||
            std::isspace(static_cast<unsigned char>(text.front())) ||
            std::isspace(static_cast<unsigned char>(text.back()));
  }
  if (!quote) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string write_csv(const Relation& rel) {
  std::ostringstream os;
  const auto& cols = rel.schema().columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) os << ',';
    os << cols[i].name;
  }
  os << '\n';
  for (std::size_t r = 0; r < rel.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      os << format_csv_cell(rel.value(static_cast<RowId>(r), c));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace provis
