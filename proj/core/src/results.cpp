// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace skysim {

void Table::add_row(std::vector<Cell_t> row) {
    if (row.size() != columns_.size())
        throw std::invalid_argument("row width " + std::to_string(row.size()) +
                                    " does not match " + std::to_string(columns_.size()) +
                                    " columns");
    rows_.push_back(std::move(row));
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    // The format contract is locale-free; a host locale must never leak in.
    for (char* p = buf; *p; ++p)
        if (*p == ',') *p = '.';
    return buf;
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        out += columns_[c];
        out += (c + 1 == columns_.size()) ? '\n' : ',';
    }
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const Cell_t& cell = row[c];
            if (std::holds_alternative<double>(cell))
                out += format_number(std::get<double>(cell));
            else if (std::holds_alternative<std::int64_t>(cell))
                out += std::to_string(std::get<std::int64_t>(cell));
            else
                out += std::get<std::string>(cell);
            out += (c + 1 == row.size()) ? '\n' : ',';
        }
    }
    return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_str(const std::string& s) { return fnv1a64(s.data(), s.size()); }

namespace {
std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}
}  // namespace

std::string Manifest::to_text() const {
    std::string out;
    for (const auto& e : entries) {
        out += e.file;
        out += ' ';
        out += hex16(e.digest);
        out += '\n';
    }
    return out;
}

Manifest write_results(const std::vector<NamedTable>& tables, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    Manifest manifest;
    std::vector<fs::path> written;
    try {
        for (const NamedTable& nt : tables) {
            const fs::path path = fs::path(out_dir) / (nt.name + ".csv");
            const std::string csv = nt.table.to_csv();
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
            out << csv;
            out.close();
            if (!out) throw std::runtime_error("write failed: " + path.string());
            written.push_back(path);
            manifest.entries.push_back({nt.name + ".csv", fnv1a64_str(csv)});
        }
        const fs::path mpath = fs::path(out_dir) / "manifest.txt";
        std::ofstream mout(mpath, std::ios::binary);
        if (!mout) throw std::runtime_error("cannot open " + mpath.string() + " for writing");
        mout << manifest.to_text();
        mout.close();
        if (!mout) throw std::runtime_error("write failed: " + mpath.string());
    } catch (...) {
        for (const fs::path& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
    return manifest;
}

}  // namespace skysim
