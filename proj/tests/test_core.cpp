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

#include "opdelta/core.hpp"
#include "support/test_util.hpp"

using namespace opdelta;
namespace tu = opdelta::testutil;

TEST_CASE("hermitian operator symmetrizes exactly on construction") {
    const Matrix raw = tu::gaussian(5, 5, 1);
    const HermitianOperator t(raw);
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 5; ++j) {
            CHECK(t(i, j) == t(j, i));  // bitwise, not approximate
        }
    }
    CHECK_THROWS_AS(HermitianOperator(Matrix::Zero(3, 4)), Error);
}

TEST_CASE("hs_inner basics") {
    const HermitianOperator id3 = HermitianOperator::Identity(3);
    CHECK(hs_inner(id3, id3) == doctest::Approx(3.0));

    Matrix p1 = Matrix::Zero(3, 3), p2 = Matrix::Zero(3, 3);
    p1(0, 0) = 1.0;
    p2(1, 1) = 1.0;
    CHECK(hs_inner(p1, p2) == doctest::Approx(0.0));

    CHECK_THROWS_AS(hs_inner(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), Error);
}

TEST_CASE("hs_inner matches the entrywise double loop") {
    const HermitianOperator u = tu::random_symmetric(4, 2);
    const HermitianOperator v = tu::random_symmetric(4, 3);
    double want = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) want += u(i, j) * v(i, j);
    }
    CHECK(hs_inner(u, v) == doctest::Approx(want).epsilon(1e-13));
    CHECK(hs_inner(u, v) == doctest::Approx(hs_inner(v, u)));
}

TEST_CASE("hs_inner induces the HS norm and detects zero") {
    const HermitianOperator u = tu::random_symmetric(4, 4);
    CHECK(hs_inner(u, u) == doctest::Approx(u.hs_norm() * u.hs_norm()));
    CHECK(hs_inner(u, u) > 0.0);
    const HermitianOperator z = HermitianOperator::Zero(4);
    CHECK(hs_inner(z, z) == 0.0);
}

TEST_CASE("hs_inner is invariant under simultaneous orthogonal conjugation") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const HermitianOperator u = tu::random_symmetric(5, 100 + seed);
        const HermitianOperator v = tu::random_symmetric(5, 200 + seed);
        const Matrix q = tu::random_orthogonal(5, 300 + seed);
        const double base = hs_inner(u, v);
        const double conj = hs_inner(Matrix(q.transpose() * u.mat() * q),
                                     Matrix(q.transpose() * v.mat() * q));
        CHECK(tu::rel_err(conj, base) < 1e-12);
    }
}

TEST_CASE("operator norm is dominated by the HS norm") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const HermitianOperator t = tu::random_symmetric(6, 400 + seed);
        const SpectralDecomposition sd = spectral(t);
        const double op_norm = sd.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(op_norm <= t.hs_norm() * (1.0 + 1e-12));
    }
}

TEST_CASE("tensor product") {
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    const Matrix m = tensor(e1, e1);
    CHECK(m(0, 0) == 1.0);
    CHECK(m.norm() == doctest::Approx(1.0));

    const Vector f = tu::gaussian_vector(4, 7);
    const Vector applied = tensor(f, f) * f;  // (f(x)f)f = |f|^2 f
    CHECK((applied - f.squaredNorm() * f).norm() < 1e-12 * f.norm());

    Vector a(2), b(2);
    a << 1, 2;
    b << 3, 4;
    Matrix want(2, 2);
    want << 3, 4, 6, 8;
    CHECK((tensor(a, b) - want).norm() == 0.0);

    CHECK_THROWS_AS(tensor(Vector::Zero(2), Vector::Zero(3)), Error);
}

TEST_CASE("block extraction") {
    const BlockStructure s(2, 4);
    const Matrix id = Matrix::Identity(4, 4);
    CHECK(block(id, s, 1, 2).norm() == 0.0);
    CHECK((block(id, s, 1, 1) - s.projector(1)).norm() == 0.0);

    const HermitianOperator sigma = tu::random_symmetric(4, 11);
    const Matrix sum = block(sigma.mat(), s, 1, 1) + block(sigma.mat(), s, 1, 2) +
                       block(sigma.mat(), s, 2, 1) + block(sigma.mat(), s, 2, 2);
    CHECK((sum - sigma.mat()).norm() == 0.0);

    // adjoint symmetry is exact
    const Matrix b12 = block(sigma.mat(), s, 1, 2);
    const Matrix b21 = block(sigma.mat(), s, 2, 1);
    CHECK((b12.transpose() - b21).norm() == 0.0);
}

TEST_CASE("block structure validation") {
    CHECK_THROWS_AS(BlockStructure(0, 4), Error);
    CHECK_THROWS_AS(BlockStructure(4, 4), Error);
}

TEST_CASE("spectral groups exact multiplicities") {
    Vector d(3);
    d << 2, 1, 1;
    const HermitianOperator t(Matrix(d.asDiagonal()));
    const SpectralDecomposition sd = spectral(t, 1e-10);
    REQUIRE(sd.group_count() == 2);
    CHECK(sd.group(0).value == doctest::Approx(2.0));
    CHECK(sd.group(0).size == 1);
    CHECK(sd.group(1).value == doctest::Approx(1.0));
    CHECK(sd.group(1).size == 2);
}

TEST_CASE("spectral on simple spectrum reconstructs exactly") {
    Vector d(3);
    d << 3, 2, 1;
    const HermitianOperator t(Matrix(d.asDiagonal()));
    const SpectralDecomposition sd = spectral(t);
    REQUIRE(sd.group_count() == 3);
    for (std::size_t g = 0; g < 3; ++g) CHECK(sd.group(g).size == 1);
    CHECK((sd.reconstruct() - t.mat()).norm() < 1e-14);
}

TEST_CASE("spectral reconstruction and projection algebra on random operators") {
    const HermitianOperator t = tu::random_symmetric(6, 21);
    const SpectralDecomposition sd = spectral(t);
    CHECK((sd.reconstruct() - t.mat()).norm() <= 1e-12 * t.hs_norm());

    Eigen::Index total = 0;
    for (std::size_t g = 0; g < sd.group_count(); ++g) {
        const Matrix p = sd.projection(g);
        total += sd.group(g).size;
        CHECK((p * p - p).norm() <= 1e-12 * std::max(1.0, p.norm()));
        CHECK((p - p.transpose()).norm() <= 1e-14);
        for (std::size_t h = g + 1; h < sd.group_count(); ++h) {
            CHECK((p * sd.projection(h)).norm() <= 1e-12);
        }
    }
    CHECK(total == t.dim());  // identity resolution including any zero group
}

TEST_CASE("spectral grouping merges close eigenvalues") {
    Vector d(4);
    d << 1.0, 1.0 + 1e-12, 0.5, -0.25;
    const HermitianOperator t = tu::with_spectrum(d, 5);
    const SpectralDecomposition sd = spectral(t, 1e-8);
    REQUIRE(sd.group_count() == 3);
    CHECK(sd.group(0).size == 2);
}
