// Copyright 2026 The nlwe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <array>
#include <random>

#include "nlwe/linalg.hpp"

namespace nlwe {
namespace {

Matrix random_matrix(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

Ket random_ket(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Ket v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {g(rng), g(rng)};
    return v;
}

TEST(Tensor, LeftFactorIsSlowIndex) {
    const Ket v = tensor(basis_ket(2, 1), basis_ket(3, 2));
    EXPECT_EQ(v.size(), 6);
    EXPECT_EQ(v(5), Complex(1.0));
    EXPECT_DOUBLE_EQ(v.norm(), 1.0);
}

TEST(Tensor, MatrixEntriesByIndexLoop) {
    std::mt19937_64 rng(1);
    const Matrix a = random_matrix(2, rng);
    const Matrix b = random_matrix(3, rng);
    const Matrix k = tensor(a, b);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 3; ++q)
                    EXPECT_EQ(k(i * 3 + j, p * 3 + q), a(i, p) * b(j, q));
}

TEST(Tensor, MixedProductRule) {
    std::mt19937_64 rng(2);
    const Matrix a = random_matrix(2, rng), b = random_matrix(3, rng);
    const Ket u = random_ket(2, rng), v = random_ket(3, rng);
    EXPECT_LT((tensor(a, b) * tensor(u, v) - tensor(Ket(a * u), Ket(b * v))).norm(), 1e-12);
}

TEST(Inner, ConjugatesLeftAndRejectsMismatch) {
    Ket u(1), v(1);
    u << Complex(0, 1);
    v << Complex(1, 0);
    EXPECT_EQ(inner(u, v), Complex(0, -1));
    EXPECT_THROW(inner(Ket::Zero(2), Ket::Zero(3)), UsageError);
}

TEST(HermitianEig, DescendingWithReconstruction) {
    std::mt19937_64 rng(3);
    const Matrix g = random_matrix(4, rng);
    const Matrix h = g + g.adjoint();
    const auto es = hermitian_eig(h);
    ASSERT_EQ(es.values.size(), 4u);
    for (std::size_t i = 1; i < es.values.size(); ++i) EXPECT_GE(es.values[i - 1], es.values[i]);
    Matrix rebuilt = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        rebuilt += es.values[i] * es.vectors.col(static_cast<Eigen::Index>(i)) *
                   es.vectors.col(static_cast<Eigen::Index>(i)).adjoint();
    }
    EXPECT_LT((rebuilt - h).norm(), 1e-12);
}

TEST(HermitianEig, NonHermitianReportsAsymmetry) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    try {
        hermitian_eig(m);
        FAIL() << "expected DomainError";
    } catch (const DomainError &e) {
        EXPECT_NE(std::string(e.what()).find("asymmetry 1"), std::string::npos);
    }
}

TEST(Regularize, ZeroEigenvaluesMapToPlusOne) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 0.4;
    m(1, 1) = -2.0;
    const Matrix u = regularize_to_unitary(m);
    EXPECT_NEAR(u(0, 0).real(), 1.0, 1e-14);
    EXPECT_NEAR(u(1, 1).real(), -1.0, 1e-14);
    EXPECT_NEAR(u(2, 2).real(), 1.0, 1e-14);
    EXPECT_LT((u * u - identity(3)).norm(), 1e-14);
}

TEST(Regularize, SupportProjectorOfRankDeficient) {
    const Ket v = (basis_ket(3, 0) + basis_ket(3, 2)) / std::sqrt(2.0);
    const Matrix p = support_projector(5.0 * projector(v));
    EXPECT_LT((p - projector(v)).norm(), 1e-12);
}

TEST(Psd, InverseSqrtIsPseudoInverse) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 4.0;
    const Matrix s = inverse_sqrt_psd(m);
    EXPECT_NEAR(s(0, 0).real(), 0.5, 1e-14);
    EXPECT_EQ(s(1, 1), Complex(0.0));
    EXPECT_NEAR(sqrt_psd(m)(0, 0).real(), 2.0, 1e-14);
}

TEST(Permute, MatchesIndexLoop) {
    std::mt19937_64 rng(4);
    const std::array<std::size_t, 3> dims = {2, 3, 4};
    const std::array<std::size_t, 3> perm = {2, 0, 1};
    const Ket v = random_ket(24, rng);
    const Ket w = permute(v, dims, perm);
    // new layout (d2, d0, d1): w[k][i][j] = v[i][j][k]
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k)
                EXPECT_EQ(w(static_cast<Eigen::Index>(k * 6 + i * 3 + j)),
                          v(static_cast<Eigen::Index>(i * 12 + j * 4 + k)));
}

TEST(Permute, SwapOfProductAndMatrixConsistency) {
    std::mt19937_64 rng(5);
    const Ket a = random_ket(2, rng), b = random_ket(3, rng);
    const std::array<std::size_t, 2> dims = {2, 3};
    const std::array<std::size_t, 2> swap = {1, 0};
    EXPECT_LT((permute(tensor(a, b), dims, swap) - tensor(b, a)).norm(), 1e-14);
    const Matrix x = random_matrix(2, rng), y = random_matrix(3, rng);
    EXPECT_LT((permute(tensor(x, y), dims, swap) - tensor(y, x)).norm(), 1e-13);
    const std::array<std::size_t, 2> bad = {0, 0};
    EXPECT_THROW(permute(tensor(a, b), dims, bad), UsageError);
}

TEST(PartialTrace, ProductStateKeepsFactor) {
    std::mt19937_64 rng(6);
    Ket a = random_ket(2, rng), b = random_ket(3, rng), c = random_ket(2, rng);
    a.normalize();
    b.normalize();
    c.normalize();
    const Matrix rho = projector(tensor(a, b, c));
    const std::array<std::size_t, 3> dims = {2, 3, 2};
    const std::array<std::size_t, 1> mid = {1};
    EXPECT_LT((partial_trace(rho, dims, mid) - projector(b)).norm(), 1e-13);
    const std::array<std::size_t, 2> outer = {0, 2};
    EXPECT_LT((partial_trace(rho, dims, outer) - projector(tensor(a, c))).norm(), 1e-13);
}

TEST(PartialTrace, MaximallyEntangledGivesMaximallyMixed) {
    Ket phi = Ket::Zero(9);
    for (int i = 0; i < 3; ++i) phi(i * 3 + i) = 1.0 / std::sqrt(3.0);
    const std::array<std::size_t, 2> dims = {3, 3};
    const std::array<std::size_t, 1> keep = {0};
    EXPECT_LT((partial_trace(projector(phi), dims, keep) - identity(3) / 3.0).norm(), 1e-14);
}

TEST(PartialTrace, RejectsBadArguments) {
    const std::array<std::size_t, 2> dims = {2, 2};
    const std::array<std::size_t, 1> keep = {0};
    EXPECT_THROW(partial_trace(identity(3), dims, keep), UsageError);
    const std::array<std::size_t, 2> twice = {1, 1};
    EXPECT_THROW(partial_trace(identity(4), dims, twice), UsageError);
    const std::array<std::size_t, 1> out_of_range = {2};
    EXPECT_THROW(partial_trace(identity(4), dims, out_of_range), UsageError);
}

TEST(ApplyOn, EqualsKroneckerEmbedding) {
    std::mt19937_64 rng(7);
    const Matrix op = random_matrix(3, rng);
    const Ket v = random_ket(2 * 3 * 4, rng);
    const Ket expected = tensor(identity(2), op, identity(4)) * v;
    EXPECT_LT((apply_on(op, v, 2, 4) - expected).norm(), 1e-12);
    EXPECT_THROW(apply_on(op, v, 3, 4), UsageError);
}

}  // namespace
}  // namespace nlwe
