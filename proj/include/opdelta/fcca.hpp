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

#ifndef OPDELTA_FCCA_HPP
#define OPDELTA_FCCA_HPP

#include <cstdint>
#include <utility>

#include "opdelta/calculus.hpp"
#include "opdelta/core.hpp"

namespace opdelta {

/// n functional observations as rows of basis coefficients.
struct FunctionalSample {
    Matrix data;  // n x M

    Eigen::Index n() const { return data.rows(); }
    Eigen::Index dim() const { return data.cols(); }
};

/// Sample mean and covariance operator
///   mean = (1/n) sum X_i,  cov = (1/n) sum (X_i - mean)(x)(X_i - mean).
/// The covariance has rank at most min(n-1, M). Requires n >= 2.
std::pair<Vector, HermitianOperator> sample_moments(const FunctionalSample& s);

/// Blocks of the Tikhonov-shifted covariance: diagonal blocks get +alpha on
/// their block diagonal, off-diagonal blocks are untouched. The raw diagonal
/// blocks are kept alongside because the spectral calculus evaluates
/// phi_p(z) = (alpha+z)^(-p/2) at the unshifted blocks.
struct RegularizedBlocks {
    double alpha;
    BlockStructure structure;
    Matrix s11, s22;        // alpha I_j + Sigma_jj, zero-padded to the full frame
    Matrix s12, s21;        // cross blocks; s21 == s12^t
    Matrix sigma11, sigma22;  // unshifted diagonal blocks
};

/// Throws Error("config.alpha_nonpositive") unless alpha > 0.
RegularizedBlocks regularize(const HermitianOperator& cov, const BlockStructure& s, double alpha);

/// The associated operator of block j:
///   R_1 = (aI+S11)^(-1/2) S12 (aI+S22)^(-1) S21 (aI+S11)^(-1/2)
/// (indices mirrored for j = 2), built through the spectral calculus with
/// phi_1, phi_2 rather than direct inversion. Symmetric, PSD, supported on
/// block j.
HermitianOperator build_r(const RegularizedBlocks& blocks, int j);

/// Output of a regularized functional CCA fit.
struct RfccaFit {
    double rho2;        // top eigenvalue of both R_j
    Vector f1, f2;      // unit-norm canonical weights, supported on their blocks
    Vector g1, g2;      // unit top eigenvectors of R_1, R_2 (whitened frame)
    HermitianOperator r1, r2;
    double alpha;
    BlockStructure structure;
};

/// Fit from an explicit covariance operator. rho2 is the top eigenvalue of
/// R_j; g_j its unit eigenvector; the canonical weight is mapped back as
/// f_j ~ (alpha I_j + Sigma_jj)^(-1/2) g_j and renormalized to unit norm.
/// Throws Error("numeric.degenerate_top") when the top eigenvalue of R_j is
/// not simple (relative tie within 1e-10).
RfccaFit fit_covariance(const HermitianOperator& cov, const BlockStructure& s, double alpha);

/// Sample version: moments, then fit_covariance.
RfccaFit fit(const FunctionalSample& s, const BlockStructure& split, double alpha);

struct RayleighConfig {
    int restarts = 20;
    int max_iters = 200;
    double tol = 1e-10;
    std::uint64_t seed = 0x5eed;
};

/// Brute-force maximization of the regularized Rayleigh quotient
///   <f1, S12 f2>^2 / (<f1,(aI+S11)f1> <f2,(aI+S22)f2>)
/// by alternating linear solves from random restarts. Test-support oracle
/// for small dimensions; independent of the spectral-calculus route.
double rayleigh_oracle(const HermitianOperator& cov, const BlockStructure& s, double alpha,
                       const RayleighConfig& config = {});

/// Canonical variate scores u_i = <X_i, f1>, v_i = <X_i, f2>.
std::pair<Vector, Vector> variate_scores(const FunctionalSample& s, const RfccaFit& fit);

}  // namespace opdelta

#endif  // OPDELTA_FCCA_HPP
