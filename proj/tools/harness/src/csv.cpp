#include "lpdo_harness/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lpdo_harness/config.hpp"

namespace lpdo::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), header_(std::move(header)) {
  write(header_);
}

void CsvWriter::write(const CsvRow& row) {
  if (row.size() != header_.size()) throw Error("csv: row width differs from the header");
  for (std::size_t j = 0; j < row.size(); ++j) os_ << (j ? "," : "") << row[j];
  os_ << '\n';
  if (!os_) throw IoError("csv: write failed");
}

void OrderedSink::submit(std::size_t cell, std::vector<CsvRow> rows) {
  std::lock_guard<std::mutex> lock(mu_);
  pending_[cell] = std::move(rows);
  for (auto it = pending_.find(next_); it != pending_.end(); it = pending_.find(next_)) {
    for (const auto& r : it->second) writer_.write(r);
    pending_.erase(it);
    ++next_;
  }
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return j;
  throw UsageError("csv: missing column '" + name + "'");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const std::size_t j = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(r.at(j), &used));
      if (used != r[j].size()) throw std::invalid_argument(r[j]);
    } catch (const std::exception&) {
      throw UsageError("csv: column '" + name + "' has a non-numeric value");
    }
  }
  return out;
}

CsvTable CsvTable::filtered(const std::string& column, double value) const {
  const auto values = numeric_column(column);
  CsvTable out{header, {}};
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (values[i] == value) out.rows.push_back(rows[i]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    CsvRow r;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(cell);
    if (!s.empty() && s.back() == ',') r.emplace_back();
    return r;
  };
  if (!std::getline(in, line)) throw UsageError("csv: " + path + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = split(line);
    if (r.size() != t.header.size()) throw UsageError("csv: ragged row in " + path);
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace lpdo::harness
