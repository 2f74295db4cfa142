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

#ifndef OPDELTA_BROWNIAN_HPP
#define OPDELTA_BROWNIAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "opdelta/fcca.hpp"

namespace opdelta {

/// Two dependent standard Brownian motions on [0,1] and [1,2], coupled
/// coordinate-wise through their Karhunen-Loeve coefficients:
///   U_1m = sqrt(l_m) xi_1m,  U_2m = sqrt(l_m)(a_m xi_1m + b_m xi_2m),
/// with b_m^2 = 1 - a_m^2 and l_m = ((m - 1/2) pi)^(-2).
struct BrownianModel {
    std::vector<double> a;  // dependence coefficients, |a_m| <= 1, a_m^2 non-increasing
    int kl_terms = 50;      // series truncation length per half
    double alpha = 0.1;

    /// Model with the first coordinate pair coupled at a_1^2 = a1sq and the
    /// rest independent.
    static BrownianModel single_pair(double a1sq, double alpha, int kl_terms = 50);

    double a_coeff(int m) const;  // a_m, zero beyond the stored prefix (1-based m)
    void validate() const;        // throws Error("config.*") on invariant violations
};

/// KL eigenvalue l_m = ((m - 1/2) pi)^(-2), 1-based.
double kl_eigenvalue(int m);

/// Analytic ground truth rho^2 = a_1^2 l_1^2 / (alpha + l_1)^2.
double true_rho2(const BrownianModel& model);

/// Full diagnostic diagonal a_k^2 l_k^2 / (alpha + l_k)^2, k = 1..kl_terms.
Vector true_rho2_diagonal(const BrownianModel& model);

/// Draws n paths as exact KL coefficients on the working basis
/// {e_1m} u {e_2m}, m = 1..basis_per_half (block 1 then block 2), so the
/// sample carries no quadrature error. Deterministic per seed.
FunctionalSample simulate(const BrownianModel& model, int n, int basis_per_half,
                          std::uint64_t seed);

BlockStructure simulated_block_structure(int basis_per_half);

/// Grid route for exercising CSV ingestion: the same draws evaluated as path
/// values X(t) on a grid covering [0,2]. Row i matches row i of simulate()
/// for the same seed. Throws Error("config.grid") for grids not covering
/// [0,2] or with fewer than two points.
Matrix simulate_paths(const BrownianModel& model, int n, const std::vector<double>& grid,
                      std::uint64_t seed);

struct McStudyConfig {
    int basis_per_half = 12;  // estimation basis size per half
    int threads = 0;          // 0 = OPDELTA_THREADS default
    int histogram_bins = 0;   // 0 = ceil(sqrt(N)) clamped to [8, 60]
};

struct McSummary {
    double mean = 0.0;
    double variance = 0.0;   // empirical variance of the standardized values
    double ks_stat = 0.0;    // KS distance to N(0, sigma2_median)
    double sigma2_median = 0.0;  // median plug-in variance across replications
};

struct McStudyResult {
    std::vector<double> standardized;  // sqrt(n)(rho2_hat - rho2), replication order
    std::vector<double> sigma2;        // per-replication plug-in variances
    double rho2_true = 0.0;
    std::vector<double> bin_edges;
    std::vector<std::int64_t> bin_counts;
    McSummary summary;
    int skipped = 0;                   // replications whose fit errored
    std::vector<std::string> skip_reasons;
    int n = 0;
    int replications = 0;
    std::uint64_t seed = 0;
};

/// The simulation study: N replications of simulate -> fit -> standardize,
/// each on its own seed-derived stream, aggregated in replication order so
/// the result is identical for any thread count. Failed fits are recorded
/// and skipped.
McStudyResult mc_study(const BrownianModel& model, int n, int replications, std::uint64_t seed,
                       const McStudyConfig& config = {});

/// Kolmogorov-Smirnov distance between the sample and N(0, sigma2).
double ks_statistic(std::vector<double> values, double sigma2);

}  // namespace opdelta

#endif  // OPDELTA_BROWNIAN_HPP
