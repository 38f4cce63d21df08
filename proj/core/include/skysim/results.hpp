// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace skysim {

using Cell_t = std::variant<double, std::int64_t, std::string>;

/// Column-ordered table serialized to CSV with a fixed numeric format:
/// 6 significant digits, '.' decimal separator, newline-terminated lines.
class Table {
  public:
    Table() = default;
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell_t> row);
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell_t>>& rows() const { return rows_; }
    std::size_t n_rows() const { return rows_.size(); }

    std::string to_csv() const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell_t>> rows_;
};

/// Locale-independent numeric formatting used in every CSV cell.
std::string format_number(double v);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_str(const std::string& s);

struct ManifestEntry {
    std::string file;
    std::uint64_t digest;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    std::string to_text() const;
};

struct NamedTable {
    std::string name;  // file name without extension
    Table table;
};

/// Write each table as <name>.csv plus a manifest.txt of content digests.
/// On any write failure the files created so far are removed before the
/// error propagates.
Manifest write_results(const std::vector<NamedTable>& tables, const std::string& out_dir);

}  // namespace skysim
