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

#include "opdelta/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace opdelta {

namespace {

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream msg;
        msg << what << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw Error(ErrorKind::Config, "config.not_square", msg.str());
    }
}

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw Error(ErrorKind::Config, "config.dim_mismatch", msg.str());
    }
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix entries) {
    check_square(entries, "HermitianOperator");
    entries_ = 0.5 * (entries + entries.transpose()).eval();
    if (!entries_.allFinite()) {
        throw Error(ErrorKind::Numeric, "numeric.nonfinite",
                    "HermitianOperator: entries are not finite");
    }
}

HermitianOperator HermitianOperator::Identity(Eigen::Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::Zero(Eigen::Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
}

double hs_inner(const Matrix& u, const Matrix& v) {
    check_same_dim(u.rows(), v.rows(), "hs_inner");
    check_same_dim(u.cols(), v.cols(), "hs_inner");
    return u.cwiseProduct(v).sum();
}

Matrix tensor(const Vector& f, const Vector& g) {
    check_same_dim(f.size(), g.size(), "tensor");
    return f * g.transpose();
}

BlockStructure::BlockStructure(Eigen::Index split_index, Eigen::Index dimension)
    : split(split_index), dim(dimension) {
    if (dim < 2 || split < 1 || split >= dim) {
        std::ostringstream msg;
        msg << "BlockStructure: split " << split << " invalid for dimension " << dim;
        throw Error(ErrorKind::Config, "config.split_invalid", msg.str());
    }
}

Matrix BlockStructure::projector(int j) const {
    Matrix p = Matrix::Zero(dim, dim);
    p.block(begin(j), begin(j), size(j), size(j)) = Matrix::Identity(size(j), size(j));
    return p;
}

Matrix block(const Matrix& t, const BlockStructure& s, int j, int k) {
    check_same_dim(t.rows(), s.dim, "block");
    check_square(t, "block");
    Matrix out = Matrix::Zero(s.dim, s.dim);
    out.block(s.begin(j), s.begin(k), s.size(j), s.size(k)) =
        t.block(s.begin(j), s.begin(k), s.size(j), s.size(k));
    return out;
}

SpectralDecomposition::SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors,
                                             double group_tol)
    : eigenvalues_(std::move(eigenvalues)), vectors_(std::move(eigenvectors)) {
    const Eigen::Index m = eigenvalues_.size();
    // Scale-relative grouping: adjacent eigenvalues closer than
    // group_tol * max|lambda| belong to one group.
    const double scale = m > 0 ? eigenvalues_.cwiseAbs().maxCoeff() : 0.0;
    const double merge_gap = group_tol * scale;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= m; ++i) {
        if (i == m || eigenvalues_(i - 1) - eigenvalues_(i) > merge_gap) {
            const Eigen::Index size = i - start;
            const double value = eigenvalues_.segment(start, size).mean();
            groups_.push_back({value, start, size});
            start = i;
        }
    }
}

Matrix SpectralDecomposition::projection(std::size_t g) const {
    const Group& grp = groups_[g];
    const auto cols = vectors_.middleCols(grp.offset, grp.size);
    return cols * cols.transpose();
}

Matrix SpectralDecomposition::reconstruct() const {
    Matrix out = Matrix::Zero(dim(), dim());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        out += groups_[g].value * projection(g);
    }
    return out;
}

SpectralDecomposition spectral(const HermitianOperator& t, double group_tol) {
    if (group_tol < 0.0) {
        throw Error(ErrorKind::Config, "config.group_tol", "spectral: group_tol must be >= 0");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(t.mat());
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "spectral: eigensolver did not converge on a " << t.dim() << "x" << t.dim()
            << " operator (hs_norm=" << t.hs_norm()
            << ", max_entry=" << t.mat().cwiseAbs().maxCoeff() << ")";
        throw Error(ErrorKind::Numeric, "numeric.eigensolver", msg.str());
    }
    // Eigen returns ascending order; flip to descending.
    const Eigen::Index m = t.dim();
    Vector values(m);
    Matrix vectors(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        values(i) = solver.eigenvalues()(m - 1 - i);
        vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
    }
    return SpectralDecomposition(std::move(values), std::move(vectors), group_tol);
}

}  // namespace opdelta
