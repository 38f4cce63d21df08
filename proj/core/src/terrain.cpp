// SPDX-License-Identifier: Apache-2.0
//
// skysim - system-level simulator of cellular service to low-altitude aerial users
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "skysim/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skysim/rng.hpp"

namespace skysim {

namespace {

float quantize(double v, double q) {
    return static_cast<float>(std::round(v / q) * q);
}

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

constexpr char kBinaryMagic[4] = {'S', 'K', 'H', 'M'};

Heightmap load_ascii(const std::string& path, double quantization_m) {
    std::ifstream in(path);
    if (!in) parse_fail(path, "cannot open file");

    Heightmap map;
    map.quantization_m = quantization_m;
    double nodata = -9999.0;
    int line_no = 0;

    // Six header lines: ncols nrows xllcorner yllcorner cellsize nodata_value.
    for (int k = 0; k < 6; ++k) {
        std::string line;
        if (!std::getline(in, line)) parse_fail(path, "truncated header at line " + std::to_string(line_no + 1));
        ++line_no;
        std::istringstream ls(line);
        std::string key;
        double value;
        if (!(ls >> key >> value))
            parse_fail(path, "malformed header line " + std::to_string(line_no) + ": '" + line + "'");
        std::transform(key.begin(), key.end(), key.begin(), ::tolower);
        if (key == "ncols") map.ncols = static_cast<int>(value);
        else if (key == "nrows") map.nrows = static_cast<int>(value);
        else if (key == "xllcorner") map.origin.x = value;
        else if (key == "yllcorner") map.origin.y = value;
        else if (key == "cellsize") map.cell_size_m = value;
        else if (key == "nodata_value" || key == "nodata") nodata = value;
        else parse_fail(path, "unknown header key '" + key + "' at line " + std::to_string(line_no));
    }
    if (map.ncols <= 0 || map.nrows <= 0)
        parse_fail(path, "grid dimensions must be positive");
    if (map.cell_size_m <= 0.0) parse_fail(path, "cellsize must be positive");

    map.z.resize(static_cast<std::size_t>(map.ncols) * static_cast<std::size_t>(map.nrows));
    // ASCII rows run north to south; storage row 0 is the southernmost.
    for (int r = 0; r < map.nrows; ++r) {
        const int row = map.nrows - 1 - r;
        for (int c = 0; c < map.ncols; ++c) {
            double v;
            if (!(in >> v))
                parse_fail(path, "payload too short at cell (row " + std::to_string(r) +
                                     ", col " + std::to_string(c) + ")");
            if (!std::isfinite(v))
                parse_fail(path, "non-finite elevation at cell (row " + std::to_string(r) +
                                     ", col " + std::to_string(c) + ")");
            if (v == nodata)
                parse_fail(path, "nodata cell at (row " + std::to_string(r) + ", col " +
                                     std::to_string(c) + ") is not supported");
            map.z[static_cast<std::size_t>(row) * static_cast<std::size_t>(map.ncols) +
                  static_cast<std::size_t>(c)] = quantize(v, quantization_m);
        }
    }
    double extra;
    if (in >> extra) parse_fail(path, "payload longer than ncols*nrows");
    return map;
}

Heightmap load_binary(const std::string& path, double quantization_m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail(path, "cannot open file");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0)
        parse_fail(path, "bad magic at offset 0");

    Heightmap map;
    std::uint32_t ncols = 0, nrows = 0;
    double vals[4];
    in.read(reinterpret_cast<char*>(&ncols), 4);
    in.read(reinterpret_cast<char*>(&nrows), 4);
    in.read(reinterpret_cast<char*>(vals), sizeof(vals));
    if (!in) parse_fail(path, "truncated header");
    if (ncols == 0 || nrows == 0) parse_fail(path, "grid dimensions must be positive");
    map.ncols = static_cast<int>(ncols);
    map.nrows = static_cast<int>(nrows);
    map.origin = {vals[0], vals[1]};
    map.cell_size_m = vals[2];
    map.quantization_m = vals[3] > 0.0 ? vals[3] : quantization_m;
    if (map.cell_size_m <= 0.0) parse_fail(path, "cellsize must be positive");

    map.z.resize(static_cast<std::size_t>(map.ncols) * static_cast<std::size_t>(map.nrows));
    in.read(reinterpret_cast<char*>(map.z.data()),
            static_cast<std::streamsize>(map.z.size() * sizeof(float)));
    if (!in)
        parse_fail(path, "payload too short at offset " +
                             std::to_string(36 + in.gcount()));
    for (std::size_t i = 0; i < map.z.size(); ++i) {
        if (!std::isfinite(map.z[i]))
            parse_fail(path, "non-finite elevation at cell index " + std::to_string(i));
        map.z[i] = quantize(map.z[i], map.quantization_m);
    }
    return map;
}

}  // namespace

bool Heightmap::in_bounds(Vec2 p) const {
    return p.x >= origin.x && p.y >= origin.y && p.x <= origin.x + cell_size_m * ncols &&
           p.y <= origin.y + cell_size_m * nrows;
}

double Heightmap::elevation_at(Vec2 p) const {
    // Values sit at cell centers; clamp the interpolation stencil at borders.
    const double gx = (p.x - origin.x) / cell_size_m - 0.5;
    const double gy = (p.y - origin.y) / cell_size_m - 0.5;
    const int c0 = std::clamp(static_cast<int>(std::floor(gx)), 0, ncols - 1);
    const int r0 = std::clamp(static_cast<int>(std::floor(gy)), 0, nrows - 1);
    const int c1 = std::min(c0 + 1, ncols - 1);
    const int r1 = std::min(r0 + 1, nrows - 1);
    const double wx = std::clamp(gx - c0, 0.0, 1.0);
    const double wy = std::clamp(gy - r0, 0.0, 1.0);
    return at(c0, r0) * (1 - wx) * (1 - wy) + at(c1, r0) * wx * (1 - wy) +
           at(c0, r1) * (1 - wx) * wy + at(c1, r1) * wx * wy;
}

Heightmap load_heightmap(const std::string& path, HeightmapFormat format, double quantization_m) {
    if (quantization_m <= 0.0) throw ConfigError("quantization must be positive");
    return format == HeightmapFormat::ascii_grid ? load_ascii(path, quantization_m)
                                                 : load_binary(path, quantization_m);
}

void save_heightmap(const Heightmap& map, const std::string& path, HeightmapFormat format) {
    if (format == HeightmapFormat::ascii_grid) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error(path + ": cannot open for writing");
        out << "ncols " << map.ncols << "\n"
            << "nrows " << map.nrows << "\n"
            << "xllcorner " << map.origin.x << "\n"
            << "yllcorner " << map.origin.y << "\n"
            << "cellsize " << map.cell_size_m << "\n"
            << "nodata_value -9999\n";
        char buf[32];
        for (int r = map.nrows - 1; r >= 0; --r) {
            for (int c = 0; c < map.ncols; ++c) {
                std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(map.at(c, r)));
                out << buf << (c + 1 == map.ncols ? '\n' : ' ');
            }
        }
        if (!out) throw std::runtime_error(path + ": write failed");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(kBinaryMagic, 4);
    const std::uint32_t ncols = static_cast<std::uint32_t>(map.ncols);
    const std::uint32_t nrows = static_cast<std::uint32_t>(map.nrows);
    const double vals[4] = {map.origin.x, map.origin.y, map.cell_size_m, map.quantization_m};
    out.write(reinterpret_cast<const char*>(&ncols), 4);
    out.write(reinterpret_cast<const char*>(&nrows), 4);
    out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
    out.write(reinterpret_cast<const char*>(map.z.data()),
              static_cast<std::streamsize>(map.z.size() * sizeof(float)));
    if (!out) throw std::runtime_error(path + ": write failed");
}

bool trace_los(Vec2 a_xy, double a_z, Vec2 b_xy, double b_z, const Heightmap& map) {
    if (!map.in_bounds(a_xy) || !map.in_bounds(b_xy))
        throw ModelDomainError("trace_los endpoint outside the heightmap");
    const double d2d = distance2d(a_xy, b_xy);
    const double step = map.cell_size_m / 2.0;
    // Interior samples at i*step, staying at least one step from either end.
    const int n_samples = static_cast<int>(std::floor(d2d / step)) - 1;
    for (int i = 1; i <= n_samples; ++i) {
        const double frac = (static_cast<double>(i) * step) / d2d;
        const Vec2 p = a_xy + (b_xy - a_xy) * frac;
        const double seg_z = a_z + (b_z - a_z) * frac;
        if (seg_z <= map.elevation_at(p)) return false;
    }
    return true;
}

std::vector<double> default_los_bin_edges() {
    std::vector<double> edges;
    const double lo = 10.0, hi = 35000.0;
    const int n = 46;
    for (int k = 0; k <= n; ++k)
        edges.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / n));
    return edges;
}

namespace {

// Median elevation of the (2w+1)^2 neighborhood, clamped at map borders.
double local_median(const Heightmap& map, int col, int row, int w = 10) {
    std::vector<float> vals;
    vals.reserve(static_cast<std::size_t>((2 * w + 1) * (2 * w + 1)));
    for (int r = std::max(0, row - w); r <= std::min(map.nrows - 1, row + w); ++r)
        for (int c = std::max(0, col - w); c <= std::min(map.ncols - 1, col + w); ++c)
            vals.push_back(map.at(c, r));
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(vals.size() / 2),
                     vals.end());
    return vals[vals.size() / 2];
}

}  // namespace

LosCurveEstimate estimate_los_curve(const Heightmap& map, const LosCurveParams& params) {
    if (params.n_bs_drops < 1) throw ConfigError("n_bs_drops must be >= 1");
    if (params.ue_heights_m.empty()) throw ConfigError("ue_heights_m must not be empty");

    std::vector<double> edges =
        params.bin_edges_m.empty() ? default_los_bin_edges() : params.bin_edges_m;
    if (edges.size() < 2) throw ConfigError("need at least one distance bin");

    const std::size_t n_bins = edges.size() - 1;
    const std::size_t n_heights = params.ue_heights_m.size();

    LosCurveEstimate est;
    est.table.heights_m = params.ue_heights_m;
    std::sort(est.table.heights_m.begin(), est.table.heights_m.end());
    for (std::size_t b = 0; b < n_bins; ++b)
        est.table.bin_centers_m.push_back(std::sqrt(edges[b] * edges[b + 1]));
    est.table.p.assign(n_heights, std::vector<double>(n_bins, 0.0));
    est.n.assign(n_heights, std::vector<std::int64_t>(n_bins, 0));
    std::vector<std::vector<std::int64_t>> los_count(n_heights,
                                                     std::vector<std::int64_t>(n_bins, 0));

    const Vec2 lo = map.min_corner();
    const Vec2 hi = map.max_corner();
    const double max_d = std::min(edges.back(), std::hypot(hi.x - lo.x, hi.y - lo.y));
    const double log_lo = std::log(edges.front());
    const double log_hi = std::log(max_d);

    for (int drop = 0; drop < params.n_bs_drops; ++drop) {
        auto bs_rng = keyed_stream({params.seed, rngtag::kBsDrop, static_cast<std::uint64_t>(drop)});
        Vec2 bs_xy;
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            bs_xy = {bs_rng.uniform(lo.x, hi.x), bs_rng.uniform(lo.y, hi.y)};
            const int col = std::clamp(static_cast<int>((bs_xy.x - lo.x) / map.cell_size_m), 0,
                                       map.ncols - 1);
            const int row = std::clamp(static_cast<int>((bs_xy.y - lo.y) / map.cell_size_m), 0,
                                       map.nrows - 1);
            placed = map.at(col, row) <=
                     local_median(map, col, row) + params.building_reject_threshold_m;
        }
        if (!placed) throw std::runtime_error("could not place a BS outside buildings");
        const double bs_z = map.elevation_at(bs_xy) + params.bs_height_agl_m;

        for (std::size_t hidx = 0; hidx < n_heights; ++hidx) {
            const double h_ue = est.table.heights_m[hidx];
            auto ue_rng = keyed_stream({params.seed, rngtag::kUePick,
                                        static_cast<std::uint64_t>(drop), hidx});
            for (int s = 0; s < params.ue_samples_per_drop; ++s) {
                const double d = std::exp(ue_rng.uniform(log_lo, log_hi));
                const double ang = ue_rng.uniform(0.0, 2.0 * std::numbers::pi);
                const Vec2 ue_xy = bs_xy + Vec2{d * std::cos(ang), d * std::sin(ang)};
                if (!map.in_bounds(ue_xy)) continue;
                const auto bin_it = std::upper_bound(edges.begin(), edges.end(), d);
                if (bin_it == edges.begin() || bin_it == edges.end()) continue;
                const std::size_t bin = static_cast<std::size_t>(bin_it - edges.begin()) - 1;
                const double ue_z = map.elevation_at(ue_xy) + h_ue;
                est.n[hidx][bin] += 1;
                if (trace_los(bs_xy, bs_z, ue_xy, ue_z, map)) los_count[hidx][bin] += 1;
            }
        }
    }

    for (std::size_t hidx = 0; hidx < n_heights; ++hidx)
        for (std::size_t b = 0; b < n_bins; ++b)
            est.table.p[hidx][b] =
                est.n[hidx][b] == 0
                    ? std::nan("")
                    : static_cast<double>(los_count[hidx][b]) / static_cast<double>(est.n[hidx][b]);
    return est;
}

LosCurveTable load_los_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");

    struct Row {
        double h, d, p;
    };
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 3)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 4 fields");
        try {
            Row r;
            r.h = std::stod(fields[0]);
            r.d = std::stod(fields[1]);
            r.p = fields[2].empty() ? std::nan("") : std::stod(fields[2]);
            rows.push_back(r);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad numeric field");
        }
    }
    if (rows.empty()) throw ParseError(path + ": no curve rows");

    LosCurveTable table;
    for (const Row& r : rows) {
        if (table.heights_m.empty() || table.heights_m.back() != r.h) {
            if (std::find(table.heights_m.begin(), table.heights_m.end(), r.h) !=
                table.heights_m.end())
                throw ParseError(path + ": rows for one height must be contiguous");
            table.heights_m.push_back(r.h);
            table.p.emplace_back();
        }
        table.p.back().push_back(r.p);
        if (table.heights_m.size() == 1) table.bin_centers_m.push_back(r.d);
    }
    for (const auto& row : table.p)
        if (row.size() != table.bin_centers_m.size())
            throw ParseError(path + ": inconsistent bin count across heights");
    return table;
}

}  // namespace skysim
