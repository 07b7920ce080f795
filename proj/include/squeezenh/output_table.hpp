#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace squeezenh {

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless, "1/chi" for times, "rad" for angles

  bool operator==(const Column&) const = default;
};

// Rectangular table of finite numbers with a versioned schema. Layouts of every
// schema are documented in docs/schemas.md.
class OutputTable {
 public:
  OutputTable(std::string schema, int version, std::vector<Column> columns);

  const std::string& schema() const { return schema_; }
  int version() const { return version_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  // Ordered key/value provenance (config hash, code version). Never contains
  // wall-clock data, so identical configs produce identical files.
  const std::map<std::string, std::string>& provenance() const { return provenance_; }

  // Throws std::invalid_argument on a wrong cell count or a non-finite cell.
  void add_row(std::vector<double> row);
  void set_provenance(const std::string& key, const std::string& value);

  std::size_t column_index(const std::string& name) const;  // throws std::out_of_range
  std::vector<double> column(const std::string& name) const;

  bool operator==(const OutputTable&) const = default;

 private:
  std::string schema_;
  int version_;
  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  std::map<std::string, std::string> provenance_;
};

// printf %.17g: 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

// Line 1: "# schema=<name>/<version>"; line 2: "# units=<u1>,<u2>,..."; further
// "# <key>=<value>" provenance lines; then the header row and data rows.
void write_csv(const OutputTable& table, std::ostream& out);
void write_csv(const OutputTable& table, const std::string& path);
void write_json(const OutputTable& table, std::ostream& out);
void write_json(const OutputTable& table, const std::string& path);

// Inverse of write_csv. Reading stops at a blank line or end of input.
// Throws std::runtime_error on malformed input.
OutputTable read_csv(std::istream& in);
OutputTable read_csv(const std::string& path);

}  // namespace squeezenh
