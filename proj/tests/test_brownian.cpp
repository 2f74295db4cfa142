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

#include <algorithm>
#include <cmath>
#include <vector>

#include "opdelta/brownian.hpp"
#include "support/test_util.hpp"

using namespace opdelta;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return out;
}

}  // namespace

TEST_CASE("true rho2 ground truth") {
    SUBCASE("independent halves") {
        CHECK(true_rho2(BrownianModel::single_pair(0.0, 0.1)) == 0.0);
    }
    SUBCASE("full coupling at alpha=0.1") {
        const double l1 = 4.0 / (M_PI * M_PI);  // independent arithmetic
        const double want = (l1 / (0.1 + l1)) * (l1 / (0.1 + l1));
        CHECK(true_rho2(BrownianModel::single_pair(1.0, 0.1)) ==
              doctest::Approx(want).epsilon(1e-14));
    }
    SUBCASE("partial coupling at alpha=0.05") {
        const double l1 = 4.0 / (M_PI * M_PI);
        const double want = 0.81 * l1 * l1 / ((0.05 + l1) * (0.05 + l1));
        CHECK(true_rho2(BrownianModel::single_pair(0.81, 0.05)) ==
              doctest::Approx(want).epsilon(1e-14));
        CHECK(want == doctest::Approx(0.64187).epsilon(1e-4));
    }
}

TEST_CASE("true rho2 diagonal is the coupled-coordinate profile") {
    BrownianModel model;
    model.a = {1.0, 0.8, 0.5};
    model.kl_terms = 5;
    model.alpha = 0.1;
    const Vector diag = true_rho2_diagonal(model);
    REQUIRE(diag.size() == 5);
    for (int k = 1; k <= 5; ++k) {
        const double lk = kl_eigenvalue(k);
        const double ak = model.a_coeff(k);
        CHECK(diag(k - 1) == doctest::Approx(ak * ak * lk * lk / ((0.1 + lk) * (0.1 + lk))));
    }
    // the leading entry dominates under the ordering assumption
    CHECK(diag(0) == doctest::Approx(diag.maxCoeff()));
    CHECK(true_rho2(model) == doctest::Approx(diag(0)));
}

TEST_CASE("dependence knob is monotone") {
    double prev = -1.0;
    for (double a1sq : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double rho2 = true_rho2(BrownianModel::single_pair(a1sq, 0.1));
        CHECK(rho2 >= prev);
        prev = rho2;
    }
    prev = 2.0;
    for (double alpha : {0.01, 0.05, 0.2, 1.0}) {
        const double rho2 = true_rho2(BrownianModel::single_pair(0.9, alpha));
        CHECK(rho2 <= prev);
        prev = rho2;
    }
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(BrownianModel::single_pair(1.5, 0.1), Error);
    CHECK_THROWS_AS(BrownianModel::single_pair(0.5, 0.0), Error);
    BrownianModel increasing;
    increasing.a = {0.2, 0.9};
    CHECK_THROWS_AS(increasing.validate(), Error);
}

TEST_CASE("simulated coefficients have the KL variances") {
    const int n = 2000;
    const BrownianModel model = BrownianModel::single_pair(0.5, 0.1, 10);
    const FunctionalSample s = simulate(model, n, 6, 104);
    REQUIRE(s.dim() == 12);
    for (int m = 1; m <= 6; ++m) {
        const double lm = kl_eigenvalue(m);
        for (int half = 0; half < 2; ++half) {
            const Vector col = s.data.col(half * 6 + m - 1);
            const double var = (col.array() - col.mean()).square().sum() / (n - 1);
            CHECK(std::abs(var - lm) <= 4.0 * lm / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST_CASE("independent halves decorrelate as n grows") {
    const int n = 3000;
    const BrownianModel model = BrownianModel::single_pair(0.0, 0.1, 8);
    const FunctionalSample s = simulate(model, n, 4, 105);
    const Vector u1 = s.data.col(0);
    const Vector u2 = s.data.col(4);
    const double gamma11 = ((u1.array() - u1.mean()) * (u2.array() - u2.mean())).sum() / n /
                           kl_eigenvalue(1);  // normalized cross-covariance
    CHECK(std::abs(gamma11) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("full coupling mirrors the two halves") {
    BrownianModel model;
    model.a = std::vector<double>(8, 1.0);
    model.kl_terms = 8;
    model.alpha = 0.1;
    const FunctionalSample s = simulate(model, 20, 8, 106);
    CHECK((s.data.leftCols(8) - s.data.rightCols(8)).norm() == 0.0);
}

TEST_CASE("paths reproduce the Brownian marginal variance") {
    const int n = 5000;
    const BrownianModel model = BrownianModel::single_pair(0.3, 0.1, 50);
    const auto grid = linspace(0.0, 2.0, 201);
    const Matrix paths = simulate_paths(model, n, grid, 107);
    for (double t : {0.25, 0.5, 0.75}) {
        const auto idx = static_cast<Eigen::Index>(std::lround(t / 2.0 * 200.0));
        const Vector col = paths.col(idx);
        const double var = (col.array() - col.mean()).square().sum() / (n - 1);
        CHECK(var == doctest::Approx(t).epsilon(0.10));
    }
}

TEST_CASE("paths and coefficients share the draws") {
    const BrownianModel model = BrownianModel::single_pair(0.7, 0.1, 5);
    const auto grid = linspace(0.0, 2.0, 41);
    const FunctionalSample coeffs = simulate(model, 4, 5, 108);
    const Matrix paths = simulate_paths(model, 4, grid, 108);
    // reconstruct a path value from the coefficients at one grid point
    const double t = grid[7];
    for (int i = 0; i < 4; ++i) {
        double want = 0.0;
        for (int m = 1; m <= 5; ++m) {
            want += coeffs.data(i, m - 1) * std::sqrt(2.0) * std::sin((m - 0.5) * M_PI * t);
        }
        CHECK(paths(i, 7) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("grid validation") {
    const BrownianModel model = BrownianModel::single_pair(0.5, 0.1, 5);
    CHECK_THROWS_AS(simulate_paths(model, 4, {0.0, 0.5, 1.0}, 1), Error);    // does not cover [0,2]
    CHECK_THROWS_AS(simulate_paths(model, 4, {0.0, 1.0, 1.0, 2.0}, 1), Error);  // not increasing
}

TEST_CASE("estimates converge to the ground truth") {
    const BrownianModel model = BrownianModel::single_pair(0.81, 0.1, 30);
    const double truth = true_rho2(model);
    double prev_median = 1e9;
    for (int n : {100, 400, 1600}) {
        std::vector<double> errs;
        for (std::uint64_t seed = 0; seed < 11; ++seed) {
            const FunctionalSample s = simulate(model, n, 8, 2000 + seed);
            const RfccaFit f = fit(s, simulated_block_structure(8), model.alpha);
            errs.push_back(std::abs(f.rho2 - truth));
        }
        std::nth_element(errs.begin(), errs.begin() + 5, errs.end());
        const double median = errs[5];
        CHECK(median < prev_median);
        prev_median = median;
    }
}

TEST_CASE("mc study smoke run") {
    const BrownianModel model = BrownianModel::single_pair(0.64, 0.1, 12);
    McStudyConfig config;
    config.basis_per_half = 4;
    const McStudyResult result = mc_study(model, 50, 1, 109, config);
    REQUIRE(result.standardized.size() == 1);
    CHECK(std::isfinite(result.standardized[0]));
    CHECK(result.skipped == 0);
    CHECK(result.replications == 1);
}

TEST_CASE("mc study is deterministic and thread-count invariant") {
    const BrownianModel model = BrownianModel::single_pair(0.49, 0.1, 12);
    McStudyConfig serial;
    serial.basis_per_half = 4;
    serial.threads = 1;
    McStudyConfig parallel = serial;
    parallel.threads = 4;

    const McStudyResult a = mc_study(model, 60, 12, 110, serial);
    const McStudyResult b = mc_study(model, 60, 12, 110, serial);
    const McStudyResult c = mc_study(model, 60, 12, 110, parallel);

    REQUIRE(a.standardized.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(a.standardized[i] == b.standardized[i]);  // bitwise
        CHECK(a.standardized[i] == c.standardized[i]);
        CHECK(a.sigma2[i] == c.sigma2[i]);
    }
    CHECK(a.summary.ks_stat == c.summary.ks_stat);
    CHECK(a.bin_counts == c.bin_counts);
}

TEST_CASE("mc study histogram accounts for every replication") {
    const BrownianModel model = BrownianModel::single_pair(0.36, 0.2, 10);
    McStudyConfig config;
    config.basis_per_half = 3;
    const McStudyResult r = mc_study(model, 40, 25, 111, config);
    std::int64_t total = 0;
    for (const auto c : r.bin_counts) total += c;
    CHECK(total == 25 - r.skipped);
    CHECK(std::is_sorted(r.bin_edges.begin(), r.bin_edges.end()));
    REQUIRE(r.bin_edges.size() == r.bin_counts.size() + 1);
}

TEST_CASE("ks statistic separates matching from mismatched scales") {
    NormalSampler draw(42);
    std::vector<double> sample(400);
    for (auto& v : sample) v = 2.0 * draw();  // N(0, 4)
    const double matched = ks_statistic(sample, 4.0);
    const double mismatched = ks_statistic(sample, 0.25);
    CHECK(matched < 0.08);
    CHECK(mismatched > 0.3);
}
