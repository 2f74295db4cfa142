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

#ifndef OPDELTA_CORE_HPP
#define OPDELTA_CORE_HPP

#include <Eigen/Dense>
#include <vector>

#include "opdelta/error.hpp"

namespace opdelta {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default relative tolerance for merging nearly equal eigenvalues into one
/// spectral group.
inline constexpr double kDefaultGroupTol = 1e-8;

/// Dense self-adjoint operator on the truncated M-dimensional coefficient
/// space. The entry matrix is symmetrized as (T + T^t)/2 on every
/// construction, so entries(i,j) == entries(j,i) holds exactly afterwards.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries);

    static HermitianOperator Identity(Eigen::Index dim);
    static HermitianOperator Zero(Eigen::Index dim);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& mat() const { return entries_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

    double hs_norm() const { return entries_.norm(); }

private:
    Matrix entries_;
};

/// Hilbert-Schmidt inner product <U,V>_HS = sum_ij U_ij V_ij.
double hs_inner(const Matrix& u, const Matrix& v);
inline double hs_inner(const HermitianOperator& u, const HermitianOperator& v) {
    return hs_inner(u.mat(), v.mat());
}

/// Tensor product (f (x) g)h = <g,h> f, i.e. the matrix f g^t.
Matrix tensor(const Vector& f, const Vector& g);

/// Orthogonal split of the coefficient space into block 1 = [0, split) and
/// block 2 = [split, dim).
struct BlockStructure {
    Eigen::Index split;
    Eigen::Index dim;

    BlockStructure(Eigen::Index split_index, Eigen::Index dimension);

    Eigen::Index begin(int j) const { return j == 1 ? 0 : split; }
    Eigen::Index size(int j) const { return j == 1 ? split : dim - split; }

    /// Orthogonal projection onto block j as a full-frame matrix.
    Matrix projector(int j) const;
};

/// Pi_j T Pi_k, zero-padded to the full frame so block compositions stay
/// plain matrix products.
Matrix block(const Matrix& t, const BlockStructure& s, int j, int k);

/// Spectral decomposition with eigenvalues merged into groups of numerically
/// equal values, sorted strictly decreasing across groups. Eigenvectors are
/// kept as columns so group projections P = V_g V_g^t can be formed on
/// demand.
class SpectralDecomposition {
public:
    struct Group {
        double value;
        Eigen::Index offset;  // first column of the group in vectors()
        Eigen::Index size;    // multiplicity
    };

    SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors, double group_tol);

    Eigen::Index dim() const { return eigenvalues_.size(); }
    std::size_t group_count() const { return groups_.size(); }
    const Group& group(std::size_t g) const { return groups_[g]; }
    const std::vector<Group>& groups() const { return groups_; }

    /// All eigenvalues, descending (repeats included).
    const Vector& eigenvalues() const { return eigenvalues_; }
    /// Orthonormal eigenvectors, column i pairs with eigenvalues()[i].
    const Matrix& vectors() const { return vectors_; }

    /// Eigenprojection of group g.
    Matrix projection(std::size_t g) const;
    /// Sum of value * projection over groups; reconstructs the operator.
    Matrix reconstruct() const;

private:
    Vector eigenvalues_;  // descending
    Matrix vectors_;
    std::vector<Group> groups_;
};

/// Eigendecomposition of a symmetric operator with relative-tolerance
/// eigenvalue grouping. Throws Error("numeric.eigensolver") with condition
/// diagnostics if the solver fails to converge.
SpectralDecomposition spectral(const HermitianOperator& t, double group_tol = kDefaultGroupTol);

}  // namespace opdelta

#endif  // OPDELTA_CORE_HPP
