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

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "opdelta/asymptotics.hpp"
#include "opdelta/brownian.hpp"
#include "opdelta/ingest.hpp"
#include "opdelta/json_io.hpp"
#include "opdelta/rng.hpp"

namespace {

using namespace opdelta;

struct FitArgs {
    std::string data_path;
    double split = 0.0;
    double alpha = 0.0;
    int basis_size = 24;
    double confidence = 0.95;
    std::string out_path;
};

struct McArgs {
    double a1sq = 0.0;
    double alpha = 0.0;
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    int basis_size = 24;
    int kl_terms = 50;
    int bins = 0;
    std::string out_path;
};

struct OracleArgs {
    int dim = 6;
    std::uint64_t seed = 0;
    int instances = 25;
};

void check_config(bool ok, const std::string& code, const std::string& message) {
    if (!ok) throw Error(ErrorKind::Config, code, message);
}

int run_fit(const FitArgs& args) {
    check_config(args.alpha > 0.0, "config.alpha_nonpositive",
                 "regularization parameter must be positive");
    check_config(args.basis_size >= 4 && args.basis_size <= 512 && args.basis_size % 2 == 0,
                 "config.basis_size", "basis size must be even and within [4, 512]");
    check_config(args.confidence > 0.0 && args.confidence < 1.0, "config.confidence_level",
                 "confidence level must lie strictly between 0 and 1");

    GriddedDataset dataset = read_csv(args.data_path);
    dataset.split_point = args.split;
    const ProjectedSample projected = project_onto_split_basis(dataset, args.basis_size);

    const RfccaFit model = fit(projected.sample, projected.structure, args.alpha);
    const AsymptoticReport report =
        asymptotic_report(projected.sample, model, args.confidence);

    const nlohmann::json doc = fit_report_json(model, report);
    write_json(args.out_path, doc);
    std::cout << "rho2=" << model.rho2 << " ci=[" << report.ci_lo << "," << report.ci_hi
              << "] sigma2=" << report.sigma2 << " n=" << report.n << " -> " << args.out_path
              << "\n";
    return 0;
}

int run_mc(const McArgs& args) {
    check_config(args.alpha > 0.0, "config.alpha_nonpositive",
                 "regularization parameter must be positive");
    check_config(args.a1sq >= 0.0 && args.a1sq <= 1.0, "config.dependence",
                 "--a1sq must lie in [0, 1]");
    check_config(args.n >= 2, "config.sample_too_small", "--n must be at least 2");
    check_config(args.reps >= 1, "config.replications", "--reps must be at least 1");
    check_config(args.basis_size >= 4 && args.basis_size <= 512 && args.basis_size % 2 == 0,
                 "config.basis_size", "basis size must be even and within [4, 512]");
    check_config(args.kl_terms >= args.basis_size / 2, "config.kl_terms",
                 "--kl-terms must cover the estimation basis");

    const BrownianModel model = BrownianModel::single_pair(args.a1sq, args.alpha, args.kl_terms);
    McStudyConfig config;
    config.basis_per_half = args.basis_size / 2;
    config.histogram_bins = args.bins;
    const McStudyResult result = mc_study(model, args.n, args.reps, args.seed, config);

    write_json(args.out_path, mc_study_json(result, model));
    std::cout << "rho2_true=" << result.rho2_true << " mean=" << result.summary.mean
              << " var=" << result.summary.variance << " ks=" << result.summary.ks_stat
              << " skipped=" << result.skipped << " -> " << args.out_path << "\n";
    return 0;
}

int run_oracle(const OracleArgs& args) {
    check_config(args.dim >= 4 && args.dim <= 8, "config.oracle_dim",
                 "--dim must lie in [4, 8] for the brute-force oracle");
    const Eigen::Index m = args.dim;
    const BlockStructure structure(m / 2, m);
    const double alphas[] = {0.05, 0.2, 1.0};
    double worst = 0.0;
    int failures = 0;
    for (int k = 0; k < args.instances; ++k) {
        NormalSampler draw(derive_stream_seed(args.seed, static_cast<std::uint64_t>(k)));
        Matrix root(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) root(i, j) = draw();
        }
        const HermitianOperator cov(root * root.transpose() / static_cast<double>(m));
        const double alpha = alphas[k % 3];
        RayleighConfig rc;
        rc.seed = derive_stream_seed(args.seed, 1000 + static_cast<std::uint64_t>(k));
        const double direct = fit_covariance(cov, structure, alpha).rho2;
        const double oracle = rayleigh_oracle(cov, structure, alpha, rc);
        const double diff = std::abs(direct - oracle);
        worst = std::max(worst, diff);
        const bool ok = diff <= 1e-6;
        failures += ok ? 0 : 1;
        std::cout << "instance " << k << ": alpha=" << alpha << " eigen=" << direct
                  << " oracle=" << oracle << " |diff|=" << diff << (ok ? "" : "  MISMATCH")
                  << "\n";
    }
    std::cout << "oracle cross-check: " << args.instances - failures << "/" << args.instances
              << " within 1e-6 (worst |diff|=" << worst << ")\n";
    if (failures > 0) {
        throw Error(ErrorKind::Numeric, "numeric.oracle_mismatch",
                    "eigen route disagrees with the Rayleigh oracle");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regularized functional CCA: fitting, asymptotics and simulation study"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "fit a CSV of gridded curves and report rho2 with CIs");
    fit_cmd->add_option("--data", fit_args.data_path, "CSV: header row = grid, then one curve per row")
        ->required();
    fit_cmd->add_option("--split", fit_args.split, "domain point separating the two halves")->required();
    fit_cmd->add_option("--alpha", fit_args.alpha, "regularization parameter (> 0)")->required();
    fit_cmd->add_option("--basis-size", fit_args.basis_size, "total basis size (even, 4..512)");
    fit_cmd->add_option("--confidence", fit_args.confidence, "confidence level in (0,1)");
    fit_cmd->add_option("--out", fit_args.out_path, "output JSON path")->required();

    McArgs mc_args;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo study on the coupled Brownian model");
    mc_cmd->add_option("--a1sq", mc_args.a1sq, "squared dependence of the first coordinate pair")
        ->required();
    mc_cmd->add_option("--alpha", mc_args.alpha, "regularization parameter (> 0)")->required();
    mc_cmd->add_option("--n", mc_args.n, "sample size per replication")->required();
    mc_cmd->add_option("--reps", mc_args.reps, "number of replications")->required();
    mc_cmd->add_option("--seed", mc_args.seed, "master seed")->required();
    mc_cmd->add_option("--basis-size", mc_args.basis_size, "total estimation basis size (even)");
    mc_cmd->add_option("--kl-terms", mc_args.kl_terms, "series truncation length per half");
    mc_cmd->add_option("--bins", mc_args.bins, "histogram bin count (0 = automatic)");
    mc_cmd->add_option("--out", mc_args.out_path, "output JSON path")->required();

    OracleArgs oracle_args;
    auto* oracle_cmd =
        app.add_subcommand("oracle", "cross-check the eigen route against the Rayleigh oracle");
    oracle_cmd->add_option("--dim", oracle_args.dim, "ambient dimension (4..8)");
    oracle_cmd->add_option("--seed", oracle_args.seed, "seed for the random instances");
    oracle_cmd->add_option("--instances", oracle_args.instances, "number of random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const opdelta::Error err(opdelta::ErrorKind::Config, "config.cli_parse", e.what());
        std::cout << opdelta::error_json(err).dump(2) << "\n";
        return err.exit_code();
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (mc_cmd->parsed()) return run_mc(mc_args);
        return run_oracle(oracle_args);
    } catch (const opdelta::Error& err) {
        std::cout << opdelta::error_json(err).dump(2) << "\n";
        return err.exit_code();
    } catch (const std::exception& e) {
        const opdelta::Error err(opdelta::ErrorKind::Numeric, "numeric.unexpected", e.what());
        std::cout << opdelta::error_json(err).dump(2) << "\n";
        return err.exit_code();
    }
}
