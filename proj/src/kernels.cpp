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

#include "opdelta/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opdelta::kernels {

int max_threads() {
    static const int cached = [] {
#ifdef _OPENMP
        int hw = omp_get_max_threads();
#else
        int hw = 1;
#endif
        if (const char* env = std::getenv("OPDELTA_THREADS")) {
            try {
                const int requested = std::stoi(env);
                if (requested >= 1) hw = std::min(hw, requested);
            } catch (...) {
                // unreadable value: keep the hardware default
            }
        }
        return std::max(1, hw);
    }();
    return cached;
}

int resolve_threads(int requested) {
    return requested > 0 ? requested : max_threads();
}

Matrix sample_covariance_serial(const Matrix& data, const Vector& mean) {
    const Eigen::Index n = data.rows();
    const Eigen::Index m = data.cols();
    Matrix cov = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector centered = data.row(i).transpose() - mean;
        cov += centered * centered.transpose();
    }
    return cov / static_cast<double>(n);
}

Matrix sample_covariance(const Matrix& data, const Vector& mean, int threads) {
    const Eigen::Index n = data.rows();
    const Eigen::Index m = data.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix centered = data.rowwise() - mean.transpose();
    Matrix cov(m, m);
    const int nt = resolve_threads(threads);
    // Entry-parallel over the upper triangle: each entry is one serial dot
    // product over observations, so the result does not depend on nt.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = k; l < m; ++l) {
            const double v = centered.col(k).dot(centered.col(l)) * inv_n;
            cov(k, l) = v;
            cov(l, k) = v;
        }
    }
    (void)nt;
    return cov;
}

Vector centered_quadform_terms_serial(const Matrix& data, const Vector& mean, const Matrix& cov,
                                      const Matrix& k) {
    const Eigen::Index n = data.rows();
    const double base = cov.cwiseProduct(k).sum();  // hs_inner(cov, K)
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector centered = data.row(i).transpose() - mean;
        out(i) = centered.dot(k * centered) - base;
    }
    return out;
}

Vector centered_quadform_terms(const Matrix& data, const Vector& mean, const Matrix& cov,
                               const Matrix& k, int threads) {
    const Eigen::Index n = data.rows();
    const double base = cov.cwiseProduct(k).sum();
    Vector out(n);
    const int nt = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector centered = data.row(i).transpose() - mean;
        out(i) = centered.dot(k * centered) - base;
    }
    (void)nt;
    return out;
}

}  // namespace opdelta::kernels
