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

#ifndef OPDELTA_ASYMPTOTICS_HPP
#define OPDELTA_ASYMPTOTICS_HPP

#include <array>
#include <vector>

#include "opdelta/fcca.hpp"

namespace opdelta {

/// The five summands of the limit operator of block j, evaluated at a
/// perturbation direction G. Each term substitutes either a block of G or a
/// Frechet derivative phi'_{p,jj} G_jj into one factor position of the R_j
/// product; their sum is the directional derivative of Sigma -> R_j(Sigma)
/// in direction G.
std::array<Matrix, 5> limit_map_terms(const RegularizedBlocks& blocks, int j, const Matrix& g);

/// Sum of the five terms, symmetrized. Linear in G.
Matrix limit_map(const RegularizedBlocks& blocks, int j, const Matrix& g);

/// Kernel K_j representing G -> <limit_map(G) fstar, fstar> through the HS
/// inner product: hs_inner(G, K_j) equals that contraction for every
/// symmetric G.
struct InfluenceKernel {
    Matrix kernel;
};

/// Builds K_j column-by-column from the orthonormal symmetric basis
/// E_ab = (e_a(x)e_b + e_b(x)e_a)/sqrt(2) (a<b) and E_aa = e_a(x)e_a:
/// M(M+1)/2 limit_map evaluations. fstar must be the unit top eigenvector
/// of R_j. `threads` caps the parallel sweep; 0 means the OPDELTA_THREADS
/// default.
InfluenceKernel influence_kernel(const RegularizedBlocks& blocks, int j, const Vector& fstar,
                                 int threads = 0);

/// Serial reference implementation, kept for testing the parallel sweep.
InfluenceKernel influence_kernel_serial(const RegularizedBlocks& blocks, int j,
                                        const Vector& fstar);

/// Plug-in quadratic form <K, Sigma_HS K>_HS evaluated without materializing
/// the M^2 x M^2 covariance of the empirical HS fluctuations:
///   (1/n) sum_i hs_inner(Z_i, K)^2,  Z_i = (X_i - mean)(x)(X_i - mean) - cov.
double empirical_hs_quadform(const FunctionalSample& s, const InfluenceKernel& k,
                             int threads = 0);
double empirical_hs_quadform_serial(const FunctionalSample& s, const InfluenceKernel& k);

/// Delta-method report for the fitted RSPCC.
struct AsymptoticReport {
    double sigma2;            // plug-in asymptotic variance of sqrt(n)(rho2_hat - rho2)
    double ci_lo, ci_hi;      // confidence interval for rho2 at `level`
    Vector vector_cov_diag;   // per-coordinate variances of the weight-function limit
    Eigen::Index n;
    double level;
    int clamped;              // 1 if a round-off negative sigma2 was clamped to 0
};

/// Full covariance matrix of the limit of sqrt(n)(f_hat - fstar) for block j,
/// via the coordinate influence kernels of <e_a, A_j limit_map(.) fstar>.
/// The diagonal feeds AsymptoticReport::vector_cov_diag.
Matrix vector_limit_covariance(const FunctionalSample& s, const RegularizedBlocks& blocks,
                               int j, const Vector& fstar, int threads = 0);

/// Plug-in report: kernel from the sample blocks and eigenvector, variance
/// from the empirical HS quadratic form, normal-quantile interval
/// rho2 -+ z (1+level)/2 sqrt(sigma2/n). Everything is estimated from the
/// one sample that produced `fit` (no splitting).
AsymptoticReport asymptotic_report(const FunctionalSample& s, const RfccaFit& fit, double level,
                                   int j = 1, int threads = 0);

/// Standard normal quantile. Acklam's rational approximation (|rel err| <
/// 1.2e-9) polished with one Halley step on erfc, giving ~1e-15 accuracy.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace opdelta

#endif  // OPDELTA_ASYMPTOTICS_HPP
