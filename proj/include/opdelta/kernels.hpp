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

#ifndef OPDELTA_KERNELS_HPP
#define OPDELTA_KERNELS_HPP

#include "opdelta/core.hpp"

namespace opdelta::kernels {

/// Worker cap: min(OPDELTA_THREADS, hardware). Parsed once.
int max_threads();

/// Resolves a user-supplied thread count: 0 -> max_threads().
int resolve_threads(int requested);

// Data-parallel kernels used by the statistical layer. Each OpenMP kernel
// parallelizes over independent output elements with fixed per-element
// summation order, so results are identical for every thread count. The
// _serial versions are straightforward reference implementations kept for
// testing and benchmarked against the parallel ones.

/// Sample covariance (1/n) sum (x_i - mean)(x_i - mean)^t, entry-parallel.
Matrix sample_covariance(const Matrix& data, const Vector& mean, int threads = 0);
/// Reference: rank-1 accumulation over observations.
Matrix sample_covariance_serial(const Matrix& data, const Vector& mean);

/// Per-observation centered HS contractions
///   v_i = (x_i - mean)^t K (x_i - mean) - hs_inner(cov, K),
/// i.e. hs_inner(Z_i, K) without materializing Z_i. Observation-parallel.
Vector centered_quadform_terms(const Matrix& data, const Vector& mean, const Matrix& cov,
                               const Matrix& k, int threads = 0);
Vector centered_quadform_terms_serial(const Matrix& data, const Vector& mean, const Matrix& cov,
                                      const Matrix& k);

}  // namespace opdelta::kernels

#endif  // OPDELTA_KERNELS_HPP
