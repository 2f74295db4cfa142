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

// Compares the OpenMP kernels with their serial reference implementations.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "opdelta/asymptotics.hpp"
#include "opdelta/brownian.hpp"
#include "opdelta/kernels.hpp"
#include "opdelta/rng.hpp"

namespace {

using namespace opdelta;
using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int repeats) {
    fn();  // warm-up
    const auto start = Clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

Matrix gaussian_matrix(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
    NormalSampler draw(seed);
    Matrix data(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) data(i, k) = draw();
    }
    return data;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const int threads = kernels::max_threads();
    std::printf("worker threads: %d (cap with OPDELTA_THREADS)\n\n", threads);

    {
        const Eigen::Index n = quick ? 800 : 4000;
        const Eigen::Index m = quick ? 32 : 64;
        const Matrix data = gaussian_matrix(n, m, 7);
        const Vector mean = data.colwise().mean();
        report("sample covariance",
               time_ms([&] { kernels::sample_covariance_serial(data, mean); }, 5),
               time_ms([&] { kernels::sample_covariance(data, mean, threads); }, 5));
    }

    {
        const Eigen::Index n = quick ? 800 : 4000;
        const Eigen::Index m = quick ? 32 : 64;
        const Matrix data = gaussian_matrix(n, m, 8);
        const Vector mean = data.colwise().mean();
        const Matrix cov = kernels::sample_covariance(data, mean, threads);
        const Matrix k = gaussian_matrix(m, m, 9);
        report("centered HS quadform terms",
               time_ms([&] { kernels::centered_quadform_terms_serial(data, mean, cov, k); }, 5),
               time_ms([&] { kernels::centered_quadform_terms(data, mean, cov, k, threads); }, 5));
    }

    {
        const int mh = quick ? 8 : 16;
        const BrownianModel model = BrownianModel::single_pair(0.81, 0.1, 50);
        const FunctionalSample sample = simulate(model, 400, mh, 11);
        const BlockStructure structure = simulated_block_structure(mh);
        const RfccaFit f = fit(sample, structure, model.alpha);
        auto [mean, cov] = sample_moments(sample);
        (void)mean;
        const RegularizedBlocks blocks = regularize(cov, structure, model.alpha);
        report("influence kernel sweep",
               time_ms([&] { influence_kernel_serial(blocks, 1, f.g1); }, 3),
               time_ms([&] { influence_kernel(blocks, 1, f.g1, threads); }, 3));
    }

    {
        const BrownianModel model = BrownianModel::single_pair(0.81, 0.1, 50);
        McStudyConfig config;
        config.basis_per_half = quick ? 6 : 10;
        const int reps = quick ? 16 : 48;
        const int n = quick ? 100 : 200;
        McStudyConfig serial_cfg = config;
        serial_cfg.threads = 1;
        McStudyConfig parallel_cfg = config;
        parallel_cfg.threads = threads;
        report("mc study replications",
               time_ms([&] { mc_study(model, n, reps, 13, serial_cfg); }, 1),
               time_ms([&] { mc_study(model, n, reps, 13, parallel_cfg); }, 1));
    }

    return 0;
}
