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

#include "opdelta/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opdelta/asymptotics.hpp"
#include "opdelta/kernels.hpp"
#include "opdelta/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opdelta {

BrownianModel BrownianModel::single_pair(double a1sq, double alpha, int kl_terms) {
    if (a1sq < 0.0 || a1sq > 1.0) {
        throw Error(ErrorKind::Config, "config.dependence",
                    "a1 squared must lie in [0, 1]");
    }
    BrownianModel model;
    model.a = {std::sqrt(a1sq)};
    model.kl_terms = kl_terms;
    model.alpha = alpha;
    model.validate();
    return model;
}

double BrownianModel::a_coeff(int m) const {
    const auto idx = static_cast<std::size_t>(m - 1);
    return idx < a.size() ? a[idx] : 0.0;
}

void BrownianModel::validate() const {
    if (alpha <= 0.0) {
        throw Error(ErrorKind::Config, "config.alpha_nonpositive",
                    "regularization parameter must be positive");
    }
    if (kl_terms < 1) {
        throw Error(ErrorKind::Config, "config.kl_terms", "kl_terms must be >= 1");
    }
    double prev = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double asq = a[i] * a[i];
        if (asq > 1.0 + 1e-15) {
            throw Error(ErrorKind::Config, "config.dependence",
                        "dependence coefficients need a_m^2 <= 1");
        }
        if (asq > prev + 1e-15) {
            throw Error(ErrorKind::Config, "config.dependence_order",
                        "dependence coefficients must satisfy a_1^2 >= a_2^2 >= ...");
        }
        prev = asq;
    }
}

double kl_eigenvalue(int m) {
    const double f = (static_cast<double>(m) - 0.5) * M_PI;
    return 1.0 / (f * f);
}

double true_rho2(const BrownianModel& model) {
    model.validate();
    const double l1 = kl_eigenvalue(1);
    const double a1 = model.a_coeff(1);
    const double ratio = l1 / (model.alpha + l1);
    return a1 * a1 * ratio * ratio;
}

Vector true_rho2_diagonal(const BrownianModel& model) {
    model.validate();
    Vector diag(model.kl_terms);
    for (int k = 1; k <= model.kl_terms; ++k) {
        const double lk = kl_eigenvalue(k);
        const double ak = model.a_coeff(k);
        const double ratio = lk / (model.alpha + lk);
        diag(k - 1) = ak * ak * ratio * ratio;
    }
    return diag;
}

namespace {

// KL coefficients (U_1m | U_2m) for n paths: U_1m = sqrt(l_m) xi_1m and
// U_2m = sqrt(l_m)(a_m xi_1m + b_m xi_2m). Row i of the two halves comes
// from the same draws whichever route (coefficients or grid) consumes them.
Matrix draw_u_coeffs(const BrownianModel& model, int n, std::uint64_t seed) {
    const int mt = model.kl_terms;
    Matrix u(n, 2 * mt);
    NormalSampler draw(derive_stream_seed(seed, 0));
    for (int i = 0; i < n; ++i) {
        for (int m = 1; m <= mt; ++m) {
            const double xi1 = draw();
            const double xi2 = draw();
            const double am = model.a_coeff(m);
            const double bm = std::sqrt(std::max(0.0, 1.0 - am * am));
            const double root = std::sqrt(kl_eigenvalue(m));
            u(i, m - 1) = root * xi1;
            u(i, mt + m - 1) = root * (am * xi1 + bm * xi2);
        }
    }
    return u;
}

}  // namespace

BlockStructure simulated_block_structure(int basis_per_half) {
    return BlockStructure(basis_per_half, 2 * basis_per_half);
}

FunctionalSample simulate(const BrownianModel& model, int n, int basis_per_half,
                          std::uint64_t seed) {
    model.validate();
    if (n < 2) {
        throw Error(ErrorKind::Config, "config.sample_too_small", "simulate: need n >= 2");
    }
    if (basis_per_half < 1) {
        throw Error(ErrorKind::Config, "config.basis_size", "simulate: basis_per_half must be >= 1");
    }
    const Matrix u = draw_u_coeffs(model, n, seed);
    const int mt = model.kl_terms;
    const int keep = std::min(basis_per_half, mt);
    Matrix data = Matrix::Zero(n, 2 * basis_per_half);
    data.leftCols(keep) = u.leftCols(keep);
    data.middleCols(basis_per_half, keep) = u.middleCols(mt, keep);
    return FunctionalSample{std::move(data)};
}

Matrix simulate_paths(const BrownianModel& model, int n, const std::vector<double>& grid,
                      std::uint64_t seed) {
    model.validate();
    if (n < 2) {
        throw Error(ErrorKind::Config, "config.sample_too_small", "simulate_paths: need n >= 2");
    }
    const bool increasing =
        std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<double>()) == grid.end();
    if (grid.size() < 2 || grid.front() > 1e-12 || grid.back() < 2.0 - 1e-12 || !increasing) {
        throw Error(ErrorKind::Config, "config.grid",
                    "simulate_paths: grid must be strictly increasing and cover [0, 2]");
    }
    const Matrix u = draw_u_coeffs(model, n, seed);
    const int mt = model.kl_terms;
    const auto g = static_cast<Eigen::Index>(grid.size());

    // Basis values per grid point: e_m(t) on [0,1], e_m(t-1) on (1,2].
    Matrix basis1 = Matrix::Zero(g, mt);
    Matrix basis2 = Matrix::Zero(g, mt);
    for (Eigen::Index k = 0; k < g; ++k) {
        const double t = grid[static_cast<std::size_t>(k)];
        for (int m = 1; m <= mt; ++m) {
            const double freq = (m - 0.5) * M_PI;
            if (t >= 0.0 && t <= 1.0) basis1(k, m - 1) = std::sqrt(2.0) * std::sin(freq * t);
            if (t >= 1.0 && t <= 2.0) basis2(k, m - 1) = std::sqrt(2.0) * std::sin(freq * (t - 1.0));
        }
    }
    return u.leftCols(mt) * basis1.transpose() + u.rightCols(mt) * basis2.transpose();
}

double ks_statistic(std::vector<double> values, double sigma2) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double sigma = sigma2 > 0.0 ? std::sqrt(sigma2) : 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i];
        const double cdf = sigma > 0.0 ? normal_cdf(x / sigma) : (x < 0.0 ? 0.0 : 1.0);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

McStudyResult mc_study(const BrownianModel& model, int n, int replications, std::uint64_t seed,
                       const McStudyConfig& config) {
    model.validate();
    if (replications < 1) {
        throw Error(ErrorKind::Config, "config.replications", "mc_study: need at least 1 replication");
    }
    if (n < 2) {
        throw Error(ErrorKind::Config, "config.sample_too_small", "mc_study: need n >= 2");
    }
    if (config.basis_per_half < 1) {
        throw Error(ErrorKind::Config, "config.basis_size", "mc_study: basis_per_half must be >= 1");
    }

    const double rho2 = true_rho2(model);
    const BlockStructure structure = simulated_block_structure(config.basis_per_half);
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    struct RepResult {
        bool ok = false;
        double standardized = 0.0;
        double sigma2 = 0.0;
        std::string reason;
    };
    std::vector<RepResult> reps(static_cast<std::size_t>(replications));

    const int nt = kernels::resolve_threads(config.threads);
    // Replications are independent streams; inner kernels run single-threaded
    // so the outer loop owns the parallelism. Results land in their slot, so
    // aggregation below is identical for every nt.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (int r = 0; r < replications; ++r) {
        auto& slot = reps[static_cast<std::size_t>(r)];
        try {
            const FunctionalSample sample =
                simulate(model, n, config.basis_per_half, derive_stream_seed(seed, r));
            const RfccaFit f = fit(sample, structure, model.alpha);
            auto [mean, cov] = sample_moments(sample);
            (void)mean;
            const RegularizedBlocks blocks = regularize(cov, structure, model.alpha);
            const InfluenceKernel kernel = influence_kernel(blocks, 1, f.g1, 1);
            slot.sigma2 = empirical_hs_quadform(sample, kernel, 1);
            slot.standardized = sqrt_n * (f.rho2 - rho2);
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.reason = e.what();
        }
    }
    (void)nt;

    McStudyResult out;
    out.rho2_true = rho2;
    out.n = n;
    out.replications = replications;
    out.seed = seed;
    for (const auto& rep : reps) {
        if (rep.ok) {
            out.standardized.push_back(rep.standardized);
            out.sigma2.push_back(rep.sigma2);
        } else {
            ++out.skipped;
            out.skip_reasons.push_back(rep.reason);
        }
    }

    if (!out.standardized.empty()) {
        const auto k = static_cast<double>(out.standardized.size());
        const double mean =
            std::accumulate(out.standardized.begin(), out.standardized.end(), 0.0) / k;
        double ss = 0.0;
        for (double v : out.standardized) ss += (v - mean) * (v - mean);
        out.summary.mean = mean;
        out.summary.variance = k > 1.0 ? ss / (k - 1.0) : 0.0;

        std::vector<double> sig(out.sigma2);
        std::nth_element(sig.begin(), sig.begin() + sig.size() / 2, sig.end());
        double median = sig[sig.size() / 2];
        if (sig.size() % 2 == 0) {
            std::nth_element(sig.begin(), sig.begin() + sig.size() / 2 - 1, sig.end());
            median = 0.5 * (median + sig[sig.size() / 2 - 1]);
        }
        out.summary.sigma2_median = median;
        out.summary.ks_stat = ks_statistic(out.standardized, median);

        int bins = config.histogram_bins;
        if (bins <= 0) {
            bins = std::clamp(static_cast<int>(std::ceil(std::sqrt(k))), 8, 60);
        }
        double lo = *std::min_element(out.standardized.begin(), out.standardized.end());
        double hi = *std::max_element(out.standardized.begin(), out.standardized.end());
        if (hi <= lo) hi = lo + 1.0;
        out.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
        out.bin_counts.assign(static_cast<std::size_t>(bins), 0);
        const double width = (hi - lo) / bins;
        for (int e = 0; e <= bins; ++e) out.bin_edges[static_cast<std::size_t>(e)] = lo + e * width;
        for (double v : out.standardized) {
            auto bin = static_cast<std::size_t>(std::min<double>(bins - 1.0, (v - lo) / width));
            ++out.bin_counts[bin];
        }
    }
    return out;
}

}  // namespace opdelta
