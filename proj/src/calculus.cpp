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

#include "opdelta/calculus.hpp"

#include <cmath>
#include <sstream>

namespace opdelta {

namespace {

void check_domain(const AnalyticFn& phi, const SpectralDecomposition& sd) {
    for (const auto& g : sd.groups()) {
        if (g.value < -phi.domain_margin) {
            std::ostringstream msg;
            msg << "eigenvalue " << g.value << " below the domain margin -" << phi.domain_margin;
            throw Error(ErrorKind::Numeric, "numeric.domain", msg.str());
        }
    }
}

// Group index of each eigenvector column.
std::vector<std::size_t> column_groups(const SpectralDecomposition& sd) {
    std::vector<std::size_t> out(static_cast<std::size_t>(sd.dim()));
    for (std::size_t g = 0; g < sd.group_count(); ++g) {
        const auto& grp = sd.group(g);
        for (Eigen::Index c = grp.offset; c < grp.offset + grp.size; ++c) {
            out[static_cast<std::size_t>(c)] = g;
        }
    }
    return out;
}

}  // namespace

AnalyticFn regularized_inverse_power(double alpha, int p) {
    if (alpha <= 0.0) {
        throw Error(ErrorKind::Config, "config.alpha_nonpositive",
                    "regularization parameter must be positive");
    }
    if (p < 1) {
        throw Error(ErrorKind::Config, "config.power", "inverse power p must be >= 1");
    }
    const double half_p = 0.5 * p;
    return AnalyticFn{
        [alpha, half_p](double z) { return std::pow(alpha + z, -half_p); },
        [alpha, half_p](double z) { return -half_p * std::pow(alpha + z, -half_p - 1.0); },
        alpha / 3.0,
    };
}

Matrix apply_fn(const AnalyticFn& phi, const SpectralDecomposition& sd) {
    check_domain(phi, sd);
    Vector fvals(sd.dim());
    for (const auto& g : sd.groups()) {
        const double v = phi.value(g.value);
        fvals.segment(g.offset, g.size).setConstant(v);
    }
    return sd.vectors() * fvals.asDiagonal() * sd.vectors().transpose();
}

HermitianOperator apply_fn(const AnalyticFn& phi, const HermitianOperator& t) {
    return HermitianOperator(apply_fn(phi, spectral(t)));
}

Matrix frechet_derivative(const AnalyticFn& phi, const SpectralDecomposition& sd,
                          const Matrix& direction, FrechetDiagnostics* diag) {
    check_domain(phi, sd);
    const Eigen::Index m = sd.dim();
    if (direction.rows() != m || direction.cols() != m) {
        throw Error(ErrorKind::Config, "config.dim_mismatch",
                    "frechet_derivative: direction dimension mismatch");
    }

    const std::size_t n_groups = sd.group_count();
    const double op_norm = n_groups > 0 ? std::max(std::abs(sd.group(0).value),
                                                   std::abs(sd.group(n_groups - 1).value))
                                        : 0.0;
    const double delta_dd = 1e-7 * std::max(1.0, op_norm);

    // Pairwise coefficients over distinct groups: phi' on the diagonal,
    // divided differences off it, with the midpoint-derivative limit when a
    // gap falls under delta_dd.
    Matrix coeff(n_groups, n_groups);
    std::vector<double> phival(n_groups), phider(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        phival[g] = phi.value(sd.group(g).value);
        phider[g] = phi.derivative(sd.group(g).value);
        coeff(g, g) = phider[g];
    }
    int stabilized = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t h = g + 1; h < n_groups; ++h) {
            const double lg = sd.group(g).value;
            const double lh = sd.group(h).value;
            double c;
            if (std::abs(lh - lg) < delta_dd) {
                c = phi.derivative(0.5 * (lg + lh));
                ++stabilized;
            } else {
                c = (phival[h] - phival[g]) / (lh - lg);
            }
            coeff(g, h) = c;
            coeff(h, g) = c;
        }
    }
    if (diag != nullptr) diag->stabilized_pairs = stabilized;

    const auto groups_of = column_groups(sd);
    Matrix w = sd.vectors().transpose() * direction * sd.vectors();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            w(i, j) *= coeff(groups_of[static_cast<std::size_t>(i)],
                             groups_of[static_cast<std::size_t>(j)]);
        }
    }
    return sd.vectors() * w * sd.vectors().transpose();
}

HermitianOperator frechet_derivative(const AnalyticFn& phi, const HermitianOperator& t,
                                     const HermitianOperator& p, FrechetDiagnostics* diag) {
    return HermitianOperator(frechet_derivative(phi, spectral(t), p.mat(), diag));
}

Matrix reduced_resolvent(const SpectralDecomposition& sd) {
    const Eigen::Index m = sd.dim();
    Matrix a = Matrix::Zero(m, m);
    if (sd.group_count() < 2) return a;
    const double top = sd.group(0).value;
    for (std::size_t g = 1; g < sd.group_count(); ++g) {
        a += (1.0 / (top - sd.group(g).value)) * sd.projection(g);
    }
    return a;
}

Vector fix_sign(Vector v) {
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            lead = i;
        }
    }
    if (v.size() > 0 && v(lead) < 0.0) v = -v;
    return v;
}

PerturbationExpansion perturb_eigen(const HermitianOperator& t, const HermitianOperator& p) {
    if (t.dim() != p.dim()) {
        throw Error(ErrorKind::Config, "config.dim_mismatch",
                    "perturb_eigen: operator dimensions differ");
    }
    const SpectralDecomposition sd = spectral(t);
    if (sd.group(0).size != 1) {
        throw Error(ErrorKind::Numeric, "numeric.degenerate_top", "degenerate leading eigenspace");
    }
    const Vector p1 = fix_sign(sd.vectors().col(0));
    PerturbationExpansion out;
    out.eigenvalue_shift = p1.dot(p.mat() * p1);
    out.eigenvector_shift = reduced_resolvent(sd) * (p.mat() * p1);
    return out;
}

}  // namespace opdelta
