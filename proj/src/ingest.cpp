/*
 * Copyright 2026 The opdelta authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "opdelta/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace opdelta {

namespace {

std::vector<double> parse_row(const std::string& line, int line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
                ++used;
            }
            if (used != cell.size()) throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            std::ostringstream msg;
            msg << "line " << line_no << ": cannot parse '" << cell << "' as a number";
            throw Error(ErrorKind::Io, "io.bad_number", msg.str());
        }
    }
    return out;
}

}  // namespace

GriddedDataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "io.not_found", "cannot open '" + path + "'");
    }
    std::string line;
    int line_no = 0;
    GriddedDataset out;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row = parse_row(line, line_no);
        if (line_no == 1) {
            out.grid = std::move(row);
            for (std::size_t i = 1; i < out.grid.size(); ++i) {
                if (out.grid[i] <= out.grid[i - 1]) {
                    std::ostringstream msg;
                    msg << "line 1: grid is not strictly increasing at column " << i + 1;
                    throw Error(ErrorKind::Io, "io.grid_not_increasing", msg.str());
                }
            }
        } else {
            if (row.size() != out.grid.size()) {
                std::ostringstream msg;
                msg << "line " << line_no << ": row has " << row.size() << " cells, expected "
                    << out.grid.size();
                throw Error(ErrorKind::Io, "io.ragged_row", msg.str());
            }
            rows.push_back(std::move(row));
        }
    }
    if (out.grid.size() < 2 || rows.empty()) {
        throw Error(ErrorKind::Io, "io.empty",
                    "'" + path + "': need a grid header and at least one observation row");
    }
    out.rows.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.grid.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            out.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<double>& grid, const Matrix& rows) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "io.write_failed", "cannot write '" + path + "'");
    }
    char buf[40];
    const auto put = [&](double v, bool last) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << (last ? "\n" : ",");
    };
    for (std::size_t k = 0; k < grid.size(); ++k) put(grid[k], k + 1 == grid.size());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index k = 0; k < rows.cols(); ++k) put(rows(i, k), k + 1 == rows.cols());
    }
}

double split_basis_fn(double t, double lo, double hi, int m) {
    if (t < lo || t > hi) return 0.0;
    const double len = hi - lo;
    return std::sqrt(2.0 / len) * std::sin((m - 0.5) * M_PI * (t - lo) / len);
}

ProjectedSample project_onto_split_basis(const GriddedDataset& data, int basis_size) {
    if (basis_size < 4 || basis_size > 512 || basis_size % 2 != 0) {
        throw Error(ErrorKind::Config, "config.basis_size",
                    "basis size must be even and within [4, 512]");
    }
    const auto g = static_cast<Eigen::Index>(data.grid.size());
    if (g < 3) {
        throw Error(ErrorKind::Io, "io.empty", "grid has fewer than 3 points");
    }
    const double lo = data.grid.front();
    const double hi = data.grid.back();
    if (!(data.split_point > lo && data.split_point < hi)) {
        std::ostringstream msg;
        msg << "split point " << data.split_point << " must lie strictly inside (" << lo << ", "
            << hi << ")";
        throw Error(ErrorKind::Config, "config.split_range", msg.str());
    }
    const int mh = basis_size / 2;

    // Snap the split to the nearest interior grid point so each side is an
    // exact union of trapezoid segments; otherwise the segment straddling
    // the split would leak mass between the sides.
    Eigen::Index split_idx = 1;
    double best = std::abs(data.grid[1] - data.split_point);
    for (Eigen::Index k = 2; k + 1 < g; ++k) {
        const double dist = std::abs(data.grid[static_cast<std::size_t>(k)] - data.split_point);
        if (dist < best) {
            best = dist;
            split_idx = k;
        }
    }
    const double split = data.grid[static_cast<std::size_t>(split_idx)];

    // Basis values at the grid points; each function lives entirely on one
    // side of the split.
    Matrix basis(g, basis_size);
    for (Eigen::Index k = 0; k < g; ++k) {
        const double t = data.grid[static_cast<std::size_t>(k)];
        for (int m = 1; m <= mh; ++m) {
            basis(k, m - 1) = t <= split ? split_basis_fn(t, lo, split, m) : 0.0;
            basis(k, mh + m - 1) = t >= split ? split_basis_fn(t, split, hi, m) : 0.0;
        }
    }

    // Per-side trapezoid weights: a segment contributes only to the side it
    // belongs to, so the split point carries its left-half weight in the
    // left quadrature and its right-half weight in the right one.
    Vector w_left = Vector::Zero(g);
    Vector w_right = Vector::Zero(g);
    for (Eigen::Index k = 0; k + 1 < g; ++k) {
        const double h =
            data.grid[static_cast<std::size_t>(k) + 1] - data.grid[static_cast<std::size_t>(k)];
        Vector& w = (k < split_idx) ? w_left : w_right;
        w(k) += 0.5 * h;
        w(k + 1) += 0.5 * h;
    }

    Matrix weighted(g, basis_size);
    weighted.leftCols(mh) = w_left.asDiagonal() * basis.leftCols(mh);
    weighted.rightCols(mh) = w_right.asDiagonal() * basis.rightCols(mh);
    ProjectedSample out{FunctionalSample{data.rows * weighted},
                        BlockStructure(mh, basis_size)};
    return out;
}

Matrix synthesize_curves(const Matrix& coeffs, const std::vector<double>& grid,
                         double split_point) {
    const auto m = static_cast<int>(coeffs.cols());
    if (m < 2 || m % 2 != 0) {
        throw Error(ErrorKind::Config, "config.basis_size",
                    "synthesize_curves: coefficient count must be even");
    }
    const auto g = static_cast<Eigen::Index>(grid.size());
    const double lo = grid.front();
    const double hi = grid.back();
    const int mh = m / 2;
    Matrix basis(g, m);
    for (Eigen::Index k = 0; k < g; ++k) {
        const double t = grid[static_cast<std::size_t>(k)];
        for (int fn = 1; fn <= mh; ++fn) {
            basis(k, fn - 1) = t <= split_point ? split_basis_fn(t, lo, split_point, fn) : 0.0;
            basis(k, mh + fn - 1) = t >= split_point ? split_basis_fn(t, split_point, hi, fn) : 0.0;
        }
    }
    return coeffs * basis.transpose();
}

}  // namespace opdelta
