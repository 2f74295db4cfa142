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

#include "opdelta/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "opdelta/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opdelta {

namespace {

// Shared factors of the five-term limit operator for one block index j.
// All members are immutable after construction; safe to share across
// threads during the influence-kernel sweep.
struct LimitWorkspace {
    int j;
    BlockStructure structure;
    AnalyticFn phi1, phi2;
    SpectralDecomposition sd_aa, sd_bb;  // of the unshifted diagonal blocks
    Matrix pa;   // phi_1(S_aa)
    Matrix qb;   // phi_2(S_bb)
    Matrix s_ab, s_ba;
    Matrix qsp;  // qb * s_ba * pa
    Matrix wpa;  // s_ab * qb * s_ba * pa

    LimitWorkspace(const RegularizedBlocks& blocks, int block_index)
        : j(block_index),
          structure(blocks.structure),
          phi1(regularized_inverse_power(blocks.alpha, 1)),
          phi2(regularized_inverse_power(blocks.alpha, 2)),
          sd_aa(spectral(HermitianOperator(block_index == 1 ? blocks.sigma11 : blocks.sigma22))),
          sd_bb(spectral(HermitianOperator(block_index == 1 ? blocks.sigma22 : blocks.sigma11))),
          pa(apply_fn(phi1, sd_aa)),
          qb(apply_fn(phi2, sd_bb)),
          s_ab(block_index == 1 ? blocks.s12 : blocks.s21),
          s_ba(block_index == 1 ? blocks.s21 : blocks.s12) {
        qsp = qb * s_ba * pa;
        wpa = s_ab * qsp;
    }

    int a() const { return j == 1 ? 1 : 2; }
    int b() const { return j == 1 ? 2 : 1; }

    std::array<Matrix, 5> terms(const Matrix& g) const {
        const Matrix g_aa = block(g, structure, a(), a());
        const Matrix g_ab = block(g, structure, a(), b());
        const Matrix g_ba = block(g, structure, b(), a());
        const Matrix g_bb = block(g, structure, b(), b());
        const Matrix d_pa = frechet_derivative(phi1, sd_aa, g_aa);
        const Matrix d_qb = frechet_derivative(phi2, sd_bb, g_bb);
        return {
            d_pa * wpa,                            // phi_1-derivative in the left factor
            pa * g_ab * qsp,                       // cross-block increment, left
            pa * s_ab * d_qb * s_ba * pa,          // phi_2-derivative in the middle
            (pa * s_ab * qb) * g_ba * pa,          // cross-block increment, right
            wpa.transpose() * d_pa,                // phi_1-derivative in the right factor
        };
    }

    Matrix sum(const Matrix& g) const {
        const auto t = terms(g);
        Matrix total = t[0] + t[1] + t[2] + t[3] + t[4];
        return 0.5 * (total + total.transpose());
    }
};

void check_block_index(int j) {
    if (j != 1 && j != 2) {
        throw Error(ErrorKind::Config, "config.block_index", "block index j must be 1 or 2");
    }
}

// Symmetric-basis sweep shared by the scalar and coordinate kernels.
// For each orthonormal element E_rc the visitor receives (r, c, weight,
// limit_map(E_rc) fstar), where weight is the entry value of E_rc at (r,c):
// 1 on the diagonal, 1/sqrt(2) off it.
template <typename Visitor>
void sweep_basis(const LimitWorkspace& ws, const Vector& fstar, int threads, Visitor&& visit) {
    const Eigen::Index m = ws.structure.dim;
    const Eigen::Index n_elems = m * (m + 1) / 2;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const int nt = kernels::resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
#endif
    for (Eigen::Index idx = 0; idx < n_elems; ++idx) {
        // unrank idx -> (r, c) with r <= c, row-major over the upper triangle
        Eigen::Index r = 0;
        Eigen::Index rem = idx;
        while (rem >= m - r) {
            rem -= m - r;
            ++r;
        }
        const Eigen::Index c = r + rem;
        const double w = (r == c) ? 1.0 : inv_sqrt2;
        Matrix e = Matrix::Zero(m, m);
        e(r, c) += w;
        e(c, r) = e(r, c);
        const Vector lf = ws.sum(e) * fstar;
        visit(r, c, w, lf);
    }
    (void)nt;
}

Vector centered_terms(const FunctionalSample& s, const Matrix& k, int threads) {
    const Vector mean = s.data.colwise().mean();
    const Matrix cov = kernels::sample_covariance(s.data, mean, threads);
    return kernels::centered_quadform_terms(s.data, mean, cov, k, threads);
}

}  // namespace

std::array<Matrix, 5> limit_map_terms(const RegularizedBlocks& blocks, int j, const Matrix& g) {
    check_block_index(j);
    return LimitWorkspace(blocks, j).terms(g);
}

Matrix limit_map(const RegularizedBlocks& blocks, int j, const Matrix& g) {
    check_block_index(j);
    return LimitWorkspace(blocks, j).sum(g);
}

InfluenceKernel influence_kernel(const RegularizedBlocks& blocks, int j, const Vector& fstar,
                                 int threads) {
    check_block_index(j);
    const LimitWorkspace ws(blocks, j);
    const Eigen::Index m = blocks.structure.dim;
    Matrix kernel = Matrix::Zero(m, m);
    sweep_basis(ws, fstar, threads,
                [&](Eigen::Index r, Eigen::Index c, double w, const Vector& lf) {
                    const double coeff = fstar.dot(lf);  // <limit_map(E) f*, f*>
                    kernel(r, c) = coeff * w;
                    kernel(c, r) = kernel(r, c);
                });
    return InfluenceKernel{std::move(kernel)};
}

InfluenceKernel influence_kernel_serial(const RegularizedBlocks& blocks, int j,
                                        const Vector& fstar) {
    check_block_index(j);
    const Eigen::Index m = blocks.structure.dim;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix kernel = Matrix::Zero(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = r; c < m; ++c) {
            const double w = (r == c) ? 1.0 : inv_sqrt2;
            Matrix e = Matrix::Zero(m, m);
            e(r, c) += w;
            e(c, r) = e(r, c);
            const double coeff = fstar.dot(limit_map(blocks, j, e) * fstar);
            kernel(r, c) = coeff * w;
            kernel(c, r) = kernel(r, c);
        }
    }
    return InfluenceKernel{std::move(kernel)};
}

double empirical_hs_quadform(const FunctionalSample& s, const InfluenceKernel& k, int threads) {
    const Vector terms = centered_terms(s, k.kernel, threads);
    // squared terms summed in index order: thread-count invariant
    double acc = 0.0;
    for (Eigen::Index i = 0; i < terms.size(); ++i) acc += terms(i) * terms(i);
    return acc / static_cast<double>(terms.size());
}

double empirical_hs_quadform_serial(const FunctionalSample& s, const InfluenceKernel& k) {
    const Vector mean = s.data.colwise().mean();
    const Matrix cov = kernels::sample_covariance_serial(s.data, mean);
    const Vector terms = kernels::centered_quadform_terms_serial(s.data, mean, cov, k.kernel);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < terms.size(); ++i) acc += terms(i) * terms(i);
    return acc / static_cast<double>(terms.size());
}

Matrix vector_limit_covariance(const FunctionalSample& s, const RegularizedBlocks& blocks,
                               int j, const Vector& fstar, int threads) {
    check_block_index(j);
    const LimitWorkspace ws(blocks, j);
    const Eigen::Index m = blocks.structure.dim;
    const Eigen::Index n = s.n();
    const Eigen::Index n_elems = m * (m + 1) / 2;

    // Reduced resolvent of R_j at its leading eigenvalue.
    const HermitianOperator r_j = build_r(blocks, j);
    const Matrix a_j = reduced_resolvent(spectral(r_j));

    // Coordinate kernels stacked as rows: row(e) = A_j limit_map(E_e) fstar,
    // one per symmetric basis element.
    Matrix w(n_elems, m);
    sweep_basis(ws, fstar, threads,
                [&](Eigen::Index r, Eigen::Index c, double weight, const Vector& lf) {
                    (void)weight;
                    const Eigen::Index e = (2 * m - r + 1) * r / 2 + (c - r);
                    w.row(e) = (a_j * lf).transpose();
                });

    // z(i, e) = hs_inner(Z_i, E_e) for Z_i = centered_i (x) centered_i - cov.
    const Vector mean = s.data.colwise().mean();
    const Matrix cov = kernels::sample_covariance(s.data, mean, threads);
    const double sqrt2 = std::sqrt(2.0);
    Matrix z(n, n_elems);
    const int nt = kernels::resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector centered = s.data.row(i).transpose() - mean;
        Eigen::Index e = 0;
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = r; c < m; ++c, ++e) {
                const double zi = centered(r) * centered(c) - cov(r, c);
                z(i, e) = (r == c) ? zi : sqrt2 * zi;
            }
        }
    }
    (void)nt;

    const Matrix v = z * w;  // n x m: per-observation coordinate contractions
    return (v.transpose() * v) / static_cast<double>(n);
}

AsymptoticReport asymptotic_report(const FunctionalSample& s, const RfccaFit& fit, double level,
                                   int j, int threads) {
    check_block_index(j);
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorKind::Config, "config.confidence_level",
                    "confidence level must lie strictly between 0 and 1");
    }
    auto [mean, cov] = sample_moments(s);
    (void)mean;
    const RegularizedBlocks blocks = regularize(cov, fit.structure, fit.alpha);
    const Vector& fstar = (j == 1) ? fit.g1 : fit.g2;

    const InfluenceKernel kernel = influence_kernel(blocks, j, fstar, threads);
    double sigma2 = empirical_hs_quadform(s, kernel, threads);
    int clamped = 0;
    if (sigma2 < 0.0) {  // not reachable from the mean-of-squares form; kept as a guard
        sigma2 = 0.0;
        clamped = 1;
    }

    const double z = normal_quantile(0.5 * (1.0 + level));
    const double half_width = z * std::sqrt(sigma2 / static_cast<double>(s.n()));

    AsymptoticReport out;
    out.sigma2 = sigma2;
    out.ci_lo = fit.rho2 - half_width;
    out.ci_hi = fit.rho2 + half_width;
    out.vector_cov_diag = vector_limit_covariance(s, blocks, j, fstar, threads).diagonal();
    out.n = s.n();
    out.level = level;
    out.clamped = clamped;
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorKind::Config, "config.quantile_range",
                    "normal_quantile: p must lie strictly between 0 and 1");
    }
    // Acklam's rational approximation, then one Halley step on erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double err = normal_cdf(x) - p;
    const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace opdelta
