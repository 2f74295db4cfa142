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

#ifndef OPDELTA_TEST_UTIL_HPP
#define OPDELTA_TEST_UTIL_HPP

#include <Eigen/QR>
#include <cstdint>

#include "opdelta/core.hpp"
#include "opdelta/rng.hpp"

namespace opdelta::testutil {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    NormalSampler draw(derive_stream_seed(seed, 17));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = draw();
    }
    return m;
}

inline Vector gaussian_vector(Eigen::Index n, std::uint64_t seed) {
    NormalSampler draw(derive_stream_seed(seed, 23));
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = draw();
    return v;
}

inline HermitianOperator random_symmetric(Eigen::Index m, std::uint64_t seed) {
    return HermitianOperator(gaussian(m, m, seed));
}

/// Random SPD operator with eigenvalues bounded away from zero.
inline HermitianOperator random_spd(Eigen::Index m, std::uint64_t seed, double ridge = 0.1) {
    const Matrix g = gaussian(m, m, seed);
    return HermitianOperator(g * g.transpose() / static_cast<double>(m) +
                             ridge * Matrix::Identity(m, m));
}

inline Matrix random_orthogonal(Eigen::Index m, std::uint64_t seed) {
    const Eigen::HouseholderQR<Matrix> qr(gaussian(m, m, seed));
    return qr.householderQ();
}

/// Symmetric operator with prescribed descending eigenvalues.
inline HermitianOperator with_spectrum(const Vector& eigenvalues, std::uint64_t seed) {
    const Matrix q = random_orthogonal(eigenvalues.size(), seed);
    return HermitianOperator(q * eigenvalues.asDiagonal() * q.transpose());
}

inline double rel_err(const Matrix& got, const Matrix& want) {
    const double scale = std::max(1e-300, want.norm());
    return (got - want).norm() / scale;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace opdelta::testutil

#endif  // OPDELTA_TEST_UTIL_HPP
