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

#ifndef OPDELTA_CALCULUS_HPP
#define OPDELTA_CALCULUS_HPP

#include <functional>

#include "opdelta/core.hpp"

namespace opdelta {

/// Scalar function and its derivative, evaluated on the real spectrum of the
/// operators it is applied to. Analyticity on a complex neighbourhood is the
/// caller's responsibility; the calculus only ever sees real eigenvalues.
/// The spectrum must lie in [-domain_margin, +inf).
struct AnalyticFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double domain_margin = 0.0;
};

/// phi_p(z) = (alpha + z)^(-p/2) for p = 1, 2: the inverse square root and
/// inverse of a Tikhonov-shifted operator. The domain margin is alpha/3,
/// which keeps (alpha + z)^(-p/2) real and bounded on admissible spectra.
AnalyticFn regularized_inverse_power(double alpha, int p);

/// Spectral functional calculus phi(T) = sum_g phi(lambda_g) P_g.
/// Throws Error("numeric.domain") naming the offending eigenvalue if the
/// spectrum leaves the domain interval.
HermitianOperator apply_fn(const AnalyticFn& phi, const HermitianOperator& t);
Matrix apply_fn(const AnalyticFn& phi, const SpectralDecomposition& sd);

struct FrechetDiagnostics {
    /// Number of distinct-group pairs whose divided difference was replaced
    /// by the midpoint derivative because the gap fell below delta_dd.
    int stabilized_pairs = 0;
};

/// Frechet derivative of the spectral calculus at T in direction P:
///   phi'_T P = sum_g phi'(l_g) P_g P P_g
///            + sum_{g != h} [phi(l_h) - phi(l_g)] / (l_h - l_g) P_g P P_h.
/// The double sum does not commute away for general P. Divided differences
/// over gaps below delta_dd = 1e-7 * max(1, max|l|) are replaced by the
/// midpoint derivative phi'((l_g + l_h)/2), which is their limit.
HermitianOperator frechet_derivative(const AnalyticFn& phi, const HermitianOperator& t,
                                     const HermitianOperator& p,
                                     FrechetDiagnostics* diag = nullptr);

/// Same, reusing a precomputed decomposition of T; accepts any (not
/// necessarily symmetric) direction matrix.
Matrix frechet_derivative(const AnalyticFn& phi, const SpectralDecomposition& sd,
                          const Matrix& direction, FrechetDiagnostics* diag = nullptr);

/// First-order perturbation data for the leading eigenpair of T under T + P.
struct PerturbationExpansion {
    double eigenvalue_shift;   // <P p1, p1>
    Vector eigenvector_shift;  // A P p1, orthogonal to p1
    int remainder_bound_order = 2;
};

/// Reduced resolvent at the leading eigenvalue:
///   A = sum_{g >= 2} (l_1 - l_g)^(-1) P_g,
/// the classical coefficient. (Two printed variants carry extra factors
/// phi(l_1) resp. l_1 in the numerator; see README. The classical form is
/// the one consistent with the dense-eigensolver ratio tests.)
Matrix reduced_resolvent(const SpectralDecomposition& sd);

/// Eigenvalue/eigenvector first-order shifts for the leading eigenpair.
/// Requires a simple (rank-1) top group; throws Error("numeric.degenerate")
/// otherwise. The reference eigenvector sign follows fix_sign().
PerturbationExpansion perturb_eigen(const HermitianOperator& t, const HermitianOperator& p);

/// Deterministic sign convention: flips v so its largest-|coordinate| entry
/// is positive; ties broken by lowest index.
Vector fix_sign(Vector v);

}  // namespace opdelta

#endif  // OPDELTA_CALCULUS_HPP
