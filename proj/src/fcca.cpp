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

#include "opdelta/fcca.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "opdelta/kernels.hpp"
#include "opdelta/rng.hpp"

namespace opdelta {

namespace {

// Relative tie threshold for declaring the top eigenvalue of R_j degenerate.
constexpr double kTopTieTol = 1e-10;

}  // namespace

std::pair<Vector, HermitianOperator> sample_moments(const FunctionalSample& s) {
    if (s.n() < 2) {
        throw Error(ErrorKind::Config, "config.sample_too_small",
                    "sample_moments: need at least 2 observations");
    }
    const Vector mean = s.data.colwise().mean();
    return {mean, HermitianOperator(kernels::sample_covariance(s.data, mean))};
}

RegularizedBlocks regularize(const HermitianOperator& cov, const BlockStructure& s,
                             double alpha) {
    if (alpha <= 0.0) {
        throw Error(ErrorKind::Config, "config.alpha_nonpositive",
                    "regularization parameter must be positive");
    }
    if (cov.dim() != s.dim) {
        throw Error(ErrorKind::Config, "config.dim_mismatch",
                    "regularize: covariance and block structure dimensions differ");
    }
    RegularizedBlocks out{alpha, s, {}, {}, {}, {}, {}, {}};
    out.sigma11 = block(cov.mat(), s, 1, 1);
    out.sigma22 = block(cov.mat(), s, 2, 2);
    out.s12 = block(cov.mat(), s, 1, 2);
    out.s21 = out.s12.transpose();
    out.s11 = out.sigma11 + alpha * s.projector(1);
    out.s22 = out.sigma22 + alpha * s.projector(2);
    return out;
}

HermitianOperator build_r(const RegularizedBlocks& blocks, int j) {
    const bool first = (j == 1);
    // phi_p is evaluated at the unshifted diagonal blocks; alpha lives inside
    // phi_p(z) = (alpha + z)^(-p/2). The complement coordinates of the
    // zero-padded blocks map to alpha^(-p/2), which the cross-block factors
    // annihilate, so the product is supported on block j.
    const Matrix& sigma_aa = first ? blocks.sigma11 : blocks.sigma22;
    const Matrix& sigma_bb = first ? blocks.sigma22 : blocks.sigma11;
    const Matrix& s_ab = first ? blocks.s12 : blocks.s21;
    const AnalyticFn phi1 = regularized_inverse_power(blocks.alpha, 1);
    const AnalyticFn phi2 = regularized_inverse_power(blocks.alpha, 2);
    const Matrix pa = apply_fn(phi1, spectral(HermitianOperator(sigma_aa)));
    const Matrix qb = apply_fn(phi2, spectral(HermitianOperator(sigma_bb)));
    const Matrix half = pa * s_ab;  // (aI+S_aa)^(-1/2) S_ab
    return HermitianOperator(half * qb * half.transpose());
}

namespace {

struct TopEigen {
    double value;
    Vector vector;
};

TopEigen top_simple_eigenpair(const HermitianOperator& r) {
    const SpectralDecomposition sd = spectral(r, 0.0);
    const Vector& ev = sd.eigenvalues();
    if (ev.size() < 2) {
        throw Error(ErrorKind::Config, "config.dim_too_small", "fit: dimension must be >= 2");
    }
    const double gap = ev(0) - ev(1);
    if (gap <= kTopTieTol * std::max(std::abs(ev(0)), std::abs(ev(1)))) {
        throw Error(ErrorKind::Numeric, "numeric.degenerate_top",
                    "degenerate top eigenspace of the associated operator; the regularized "
                    "canonical correlation requires a simple leading eigenvalue");
    }
    return {ev(0), fix_sign(sd.vectors().col(0))};
}

}  // namespace

RfccaFit fit_covariance(const HermitianOperator& cov, const BlockStructure& s, double alpha) {
    RegularizedBlocks blocks = regularize(cov, s, alpha);
    HermitianOperator r1 = build_r(blocks, 1);
    HermitianOperator r2 = build_r(blocks, 2);
    const TopEigen top1 = top_simple_eigenpair(r1);
    const TopEigen top2 = top_simple_eigenpair(r2);
    if (std::abs(top1.value - top2.value) > 1e-8 * std::max(1.0, top1.value)) {
        throw Error(ErrorKind::Numeric, "numeric.r_mismatch",
                    "fit: top eigenvalues of R_1 and R_2 disagree beyond tolerance");
    }

    const AnalyticFn phi1 = regularized_inverse_power(alpha, 1);
    const Matrix w1 = apply_fn(phi1, spectral(HermitianOperator(blocks.sigma11)));
    const Matrix w2 = apply_fn(phi1, spectral(HermitianOperator(blocks.sigma22)));
    Vector f1 = w1 * top1.vector;
    Vector f2 = w2 * top2.vector;
    const double n1 = f1.norm();
    const double n2 = f2.norm();
    if (n1 == 0.0 || n2 == 0.0) {
        throw Error(ErrorKind::Numeric, "numeric.zero_weight",
                    "fit: canonical weight collapsed to zero");
    }
    f1 = fix_sign(f1 / n1);
    f2 = fix_sign(f2 / n2);

    return RfccaFit{top1.value, std::move(f1), std::move(f2),
                    top1.vector, top2.vector, std::move(r1), std::move(r2), alpha, s};
}

RfccaFit fit(const FunctionalSample& s, const BlockStructure& split, double alpha) {
    if (s.dim() != split.dim) {
        throw Error(ErrorKind::Config, "config.dim_mismatch",
                    "fit: sample dimension and block structure differ");
    }
    auto [mean, cov] = sample_moments(s);
    (void)mean;
    return fit_covariance(cov, split, alpha);
}

double rayleigh_oracle(const HermitianOperator& cov, const BlockStructure& s, double alpha,
                       const RayleighConfig& config) {
    if (alpha <= 0.0) {
        throw Error(ErrorKind::Config, "config.alpha_nonpositive",
                    "regularization parameter must be positive");
    }
    const Eigen::Index m1 = s.size(1);
    const Eigen::Index m2 = s.size(2);
    const Matrix s1 = cov.mat().topLeftCorner(m1, m1) + alpha * Matrix::Identity(m1, m1);
    const Matrix s2 = cov.mat().bottomRightCorner(m2, m2) + alpha * Matrix::Identity(m2, m2);
    const Matrix c = cov.mat().topRightCorner(m1, m2);

    const Eigen::LDLT<Matrix> s1f(s1);
    const Eigen::LDLT<Matrix> s2f(s2);

    const auto quotient = [&](const Vector& f1, const Vector& f2) {
        const double num = f1.dot(c * f2);
        const double d1 = f1.dot(s1 * f1);
        const double d2 = f2.dot(s2 * f2);
        return (num * num) / (d1 * d2);
    };

    double best = 0.0;
    NormalSampler draw(derive_stream_seed(config.seed, 0));
    for (int restart = 0; restart < config.restarts; ++restart) {
        Vector f2(m2);
        for (Eigen::Index i = 0; i < m2; ++i) f2(i) = draw();
        if (f2.norm() == 0.0) continue;
        f2.normalize();
        double value = 0.0;
        for (int iter = 0; iter < config.max_iters; ++iter) {
            // For fixed f2 the quotient is a rank-1 generalized Rayleigh
            // quotient in f1, maximized by f1 ~ S1^(-1) C f2; then alternate.
            Vector f1 = s1f.solve(c * f2);
            const double norm1 = f1.norm();
            if (norm1 == 0.0) break;  // decoupled blocks: quotient is 0
            f1 /= norm1;
            f2 = s2f.solve(c.transpose() * f1);
            const double norm2 = f2.norm();
            if (norm2 == 0.0) break;
            f2 /= norm2;
            const double next = quotient(f1, f2);
            if (std::abs(next - value) <= config.tol * std::max(1.0, std::abs(next))) {
                value = next;
                break;
            }
            value = next;
        }
        best = std::max(best, value);
    }
    return best;
}

std::pair<Vector, Vector> variate_scores(const FunctionalSample& s, const RfccaFit& fit) {
    if (s.dim() != fit.f1.size()) {
        throw Error(ErrorKind::Config, "config.dim_mismatch",
                    "variate_scores: sample and fit dimensions differ");
    }
    return {s.data * fit.f1, s.data * fit.f2};
}

}  // namespace opdelta
