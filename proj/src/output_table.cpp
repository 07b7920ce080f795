#include "squeezenh/output_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace squeezenh {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

void check_name(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(",\n\r") != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must be non-empty without commas or newlines");
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

OutputTable::OutputTable(std::string schema, int version, std::vector<Column> columns)
    : schema_(std::move(schema)), version_(version), columns_(std::move(columns)) {
  check_name(schema_, "schema name");
  if (schema_.find('/') != std::string::npos) throw std::invalid_argument("schema name must not contain '/'");
  if (version_ < 1) throw std::invalid_argument("schema version must be positive");
  if (columns_.empty()) throw std::invalid_argument("table needs at least one column");
  for (const auto& c : columns_) {
    check_name(c.name, "column name");
    check_name(c.unit, "column unit");
  }
}

void OutputTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, table has " +
                                std::to_string(columns_.size()) + " columns");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) throw std::invalid_argument("non-finite cell in column '" + columns_[i].name + "'");
  }
  rows_.push_back(std::move(row));
}

void OutputTable::set_provenance(const std::string& key, const std::string& value) {
  check_name(key, "provenance key");
  if (key == "units" || key == "schema") throw std::invalid_argument("provenance key '" + key + "' is reserved");
  if (key.find('=') != std::string::npos || value.find_first_of("\n\r") != std::string::npos) {
    throw std::invalid_argument("provenance entries must be single-line key=value pairs");
  }
  provenance_[key] = value;
}

std::size_t OutputTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  throw std::out_of_range("no column named '" + name + "' in table " + schema_);
}

std::vector<double> OutputTable::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[idx]);
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const OutputTable& table, std::ostream& out) {
  std::vector<std::string> names, units;
  for (const auto& c : table.columns()) {
    names.push_back(c.name);
    units.push_back(c.unit);
  }
  out << "# schema=" << table.schema() << '/' << table.version() << '\n';
  out << "# units=" << join(units, ',') << '\n';
  for (const auto& [key, value] : table.provenance()) out << "# " << key << '=' << value << '\n';
  out << join(names, ',') << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_number(row[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed");
}

void write_csv(const OutputTable& table, const std::string& path) {
  auto out = open_for_write(path);
  write_csv(table, out);
}

void write_json(const OutputTable& table, std::ostream& out) {
  nlohmann::ordered_json j;
  j["schema"] = table.schema();
  j["version"] = table.version();
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : table.columns()) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  j["columns"] = cols;
  j["provenance"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.provenance()) j["provenance"][key] = value;
  // Raw text keeps the same 17-digit rendering as the CSV writer.
  std::string rows = "[";
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    rows += r ? ",\n    [" : "\n    [";
    const auto& row = table.rows()[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) rows += ',';
      rows += format_number(row[i]);
    }
    rows += ']';
  }
  rows += table.rows().empty() ? "]" : "\n  ]";
  j["rows"] = nullptr;
  std::string text = j.dump(2);
  const std::string placeholder = "\"rows\": null";
  text.replace(text.rfind(placeholder), placeholder.size(), "\"rows\": " + rows);
  out << text << '\n';
  if (!out) throw std::runtime_error("write failed");
}

void write_json(const OutputTable& table, const std::string& path) {
  auto out = open_for_write(path);
  write_json(table, out);
}

OutputTable read_csv(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("CSV ended before ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next_line("the schema line");
  const std::string prefix = "# schema=";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("CSV must start with '# schema=<name>/<version>'");
  const std::string tag = line.substr(prefix.size());
  const auto slash = tag.rfind('/');
  if (slash == std::string::npos) throw std::runtime_error("schema tag lacks a version");
  const std::string name = tag.substr(0, slash);
  int version = 0;
  const std::string vtext = tag.substr(slash + 1);
  const auto [vp, vec] = std::from_chars(vtext.data(), vtext.data() + vtext.size(), version);
  if (vec != std::errc() || vp != vtext.data() + vtext.size()) throw std::runtime_error("bad schema version");

  std::vector<std::string> units;
  std::vector<std::pair<std::string, std::string>> prov;
  for (;;) {
    next_line("the header row");
    if (line.rfind("# ", 0) != 0) break;
    const std::string body = line.substr(2);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed comment line '" + line + "'");
    const std::string key = body.substr(0, eq);
    const std::string value = body.substr(eq + 1);
    if (key == "units") {
      units = split(value, ',');
    } else {
      prov.emplace_back(key, value);
    }
  }
  const auto names = split(line, ',');
  if (units.empty()) units.assign(names.size(), "1");
  if (units.size() != names.size()) throw std::runtime_error("units line and header disagree in length");
  std::vector<Column> columns;
  for (std::size_t i = 0; i < names.size(); ++i) columns.push_back({names[i], units[i]});
  OutputTable table(name, version, columns);
  for (const auto& [k, v] : prov) table.set_provenance(k, v);

  // A blank line ends the table, so several tables can share one stream.
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    const auto cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size()) throw std::runtime_error("bad number '" + cell + "'");
      row.push_back(v);
    }
    try {
      table.add_row(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(e.what());
    }
  }
  return table;
}

OutputTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace squeezenh
