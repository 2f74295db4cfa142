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

#ifndef OPDELTA_INGEST_HPP
#define OPDELTA_INGEST_HPP

#include <string>
#include <vector>

#include "opdelta/fcca.hpp"

namespace opdelta {

/// Curves sampled on a common grid: header row = grid, one observation per
/// subsequent row. split_point separates the domains of the two halves.
struct GriddedDataset {
    std::vector<double> grid;
    Matrix rows;  // n x G
    double split_point = 0.0;
};

/// Reads the CSV format above (without setting split_point). Errors carry
/// 1-based line numbers: "io.not_found", "io.ragged_row", "io.bad_number",
/// "io.grid_not_increasing", "io.empty".
GriddedDataset read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<double>& grid, const Matrix& rows);

/// Orthonormal basis adapted to the split: function m on the left interval
/// [t0, s] is sqrt(2/L) sin((m - 1/2) pi (t - t0)/L), L = s - t0, and
/// mirrored on the right. Each basis function is supported entirely on one
/// side, so the induced block structure is exact.
double split_basis_fn(double t, double lo, double hi, int m);

struct ProjectedSample {
    FunctionalSample sample;
    BlockStructure structure;
};

/// Projects every curve onto the first basis_size/2 split-basis functions of
/// each side via trapezoid quadrature. Throws Error("config.split_range") if
/// split_point is not strictly inside the grid, "config.basis_size" for
/// basis_size outside [4, 512] or odd.
ProjectedSample project_onto_split_basis(const GriddedDataset& data, int basis_size);

/// Inverse of the projection for synthetic data: evaluates coefficient rows
/// as curves on the grid. Used by tests and by the simulation-to-CSV path.
Matrix synthesize_curves(const Matrix& coeffs, const std::vector<double>& grid,
                         double split_point);

}  // namespace opdelta

#endif  // OPDELTA_INGEST_HPP
