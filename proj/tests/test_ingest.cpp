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

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "opdelta/brownian.hpp"
#include "opdelta/ingest.hpp"
#include "support/test_util.hpp"

using namespace opdelta;
namespace tu = opdelta::testutil;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return out;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/opdelta_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("read_csv reports precise errors") {
    SUBCASE("missing file") {
        CHECK_THROWS_WITH_AS(read_csv("/tmp/opdelta_does_not_exist.csv"),
                             doctest::Contains("cannot open"), Error);
        try {
            read_csv("/tmp/opdelta_does_not_exist.csv");
        } catch (const Error& e) {
            CHECK(e.code() == "io.not_found");
            CHECK(e.exit_code() == 2);
        }
    }
    SUBCASE("ragged row names the line") {
        TempFile f("ragged.csv");
        std::ofstream(f.path) << "0,1,2\n1,2,3\n4,5\n";
        CHECK_THROWS_WITH_AS(read_csv(f.path), doctest::Contains("line 3"), Error);
    }
    SUBCASE("non-monotone grid") {
        TempFile f("grid.csv");
        std::ofstream(f.path) << "0,2,1\n1,2,3\n";
        try {
            read_csv(f.path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == "io.grid_not_increasing");
        }
    }
    SUBCASE("bad number names the line") {
        TempFile f("nan.csv");
        std::ofstream(f.path) << "0,1\n1,abc\n";
        CHECK_THROWS_WITH_AS(read_csv(f.path), doctest::Contains("line 2"), Error);
    }
    SUBCASE("empty file") {
        TempFile f("empty.csv");
        std::ofstream(f.path) << "";
        CHECK_THROWS_AS(read_csv(f.path), Error);
    }
}

TEST_CASE("synthesis and ingestion round trip") {
    const int basis_size = 8;
    const auto grid = linspace(0.0, 2.0, 201);
    const Matrix coeffs = tu::gaussian(5, basis_size, 130);
    const Matrix curves = synthesize_curves(coeffs, grid, 1.0);

    TempFile f("roundtrip.csv");
    write_csv(f.path, grid, curves);
    GriddedDataset read_back = read_csv(f.path);
    read_back.split_point = 1.0;
    REQUIRE(read_back.grid.size() == grid.size());
    const ProjectedSample projected = project_onto_split_basis(read_back, basis_size);

    CHECK(projected.structure.split == basis_size / 2);
    CHECK((projected.sample.data - coeffs).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("ingestion route matches the exact-coefficient route") {
    const BrownianModel model = BrownianModel::single_pair(0.81, 0.1, 50);
    const int n = 300;
    const int basis_per_half = 4;
    const auto grid = linspace(0.0, 2.0, 201);

    const FunctionalSample exact = simulate(model, n, basis_per_half, 131);
    const Matrix paths = simulate_paths(model, n, grid, 131);

    TempFile f("dualroute.csv");
    write_csv(f.path, grid, paths);
    GriddedDataset dataset = read_csv(f.path);
    dataset.split_point = 1.0;
    const ProjectedSample projected = project_onto_split_basis(dataset, 2 * basis_per_half);

    // the projected coefficients recover the exact ones up to quadrature
    CHECK((projected.sample.data - exact.data).cwiseAbs().maxCoeff() < 2e-3);

    const double rho_exact =
        fit(exact, simulated_block_structure(basis_per_half), model.alpha).rho2;
    const double rho_ingested = fit(projected.sample, projected.structure, model.alpha).rho2;
    CHECK(rho_ingested == doctest::Approx(rho_exact).epsilon(0.02));
}

TEST_CASE("projection validates the split and basis size") {
    GriddedDataset d;
    d.grid = linspace(0.0, 2.0, 21);
    d.rows = Matrix::Zero(3, 21);
    d.split_point = 2.5;
    CHECK_THROWS_AS(project_onto_split_basis(d, 8), Error);
    d.split_point = 1.0;
    CHECK_THROWS_AS(project_onto_split_basis(d, 7), Error);   // odd
    CHECK_THROWS_AS(project_onto_split_basis(d, 2), Error);   // too small
    CHECK_THROWS_AS(project_onto_split_basis(d, 600), Error); // too large
}

TEST_CASE("constant curves ingest but the fit flags degeneracy") {
    const auto grid = linspace(0.0, 2.0, 51);
    Matrix rows = Matrix::Ones(2, 51);
    GriddedDataset d{grid, rows, 1.0};
    const ProjectedSample projected = project_onto_split_basis(d, 6);
    CHECK((projected.sample.data.row(0) - projected.sample.data.row(1)).norm() == 0.0);
    CHECK_THROWS_WITH_AS(fit(projected.sample, projected.structure, 0.1),
                         doctest::Contains("degenerate"), Error);
}

TEST_CASE("split basis functions are orthonormal under the grid quadrature") {
    const auto grid = linspace(0.0, 2.0, 201);
    // trapezoid gram of the left-side functions over their own side; the
    // left functions do not vanish at the split, so the quadrature must not
    // cross it
    for (int m1 = 1; m1 <= 4; ++m1) {
        for (int m2 = m1; m2 <= 4; ++m2) {
            double acc = 0.0;
            for (std::size_t k = 0; k + 1 < grid.size() && grid[k + 1] <= 1.0; ++k) {
                const double h = grid[k + 1] - grid[k];
                const double f1 = split_basis_fn(grid[k], 0.0, 1.0, m1) *
                                  split_basis_fn(grid[k], 0.0, 1.0, m2);
                const double f2 = split_basis_fn(grid[k + 1], 0.0, 1.0, m1) *
                                  split_basis_fn(grid[k + 1], 0.0, 1.0, m2);
                acc += 0.5 * h * (f1 + f2);
            }
            CHECK(acc == doctest::Approx(m1 == m2 ? 1.0 : 0.0).epsilon(1e-4));
        }
    }
}
