#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

namespace lpdo::harness {

/// 17 significant digits; "nan"/"inf" spelled out.
std::string format_double(double v);

using CsvRow = std::vector<std::string>;

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  void write(const CsvRow& row);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ostream& os_;
  std::vector<std::string> header_;
};

/// Serialized sink: cells finish in any order, rows leave in cell order.
class OrderedSink {
 public:
  explicit OrderedSink(CsvWriter& writer) : writer_(writer) {}
  void submit(std::size_t cell, std::vector<CsvRow> rows);

 private:
  CsvWriter& writer_;
  std::mutex mu_;
  std::size_t next_ = 0;
  std::map<std::size_t, std::vector<CsvRow>> pending_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Throws UsageError naming the column if it is absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  /// Rows whose `column` parses to `value` exactly.
  CsvTable filtered(const std::string& column, double value) const;
};

/// Plain comma-separated values without quoting. Throws IoError.
CsvTable read_csv(const std::string& path);

}  // namespace lpdo::harness
