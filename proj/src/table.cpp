// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/table.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nesslab {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("table row width does not match the header");
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os) const {
  for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
  os << '#';
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c == 0 ? " " : "\t") << columns_[c];
  os << '\n';
  char buf[32];
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      if (c) os << '\t';
      os << buf;
    }
    os << '\n';
  }
}

void Table::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write(f);
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace nesslab
