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

// Dense complex linear algebra over finite tensor-product spaces.
//
// Convention (fixed globally): kets and matrices are indexed row-major and
// the LEFT factor of a tensor product is the slow index, so for a ket on
// H1 ⊗ H2 the amplitude of |i⟩|j⟩ sits at i * dim(H2) + j.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nlwe/errors.hpp"

namespace nlwe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

inline constexpr double kZeroEigenvalueThreshold = 1e-9;
inline constexpr double kHermitianTolerance = 1e-10;

inline Ket basis_ket(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw UsageError("basis_ket: index out of range");
    }
    Ket v = Ket::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

/// |v⟩⟨v|
inline Matrix projector(const Ket &v) { return v * v.adjoint(); }

inline Matrix identity(std::size_t dim) {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

/// Kronecker product, left operand slow.
inline Matrix tensor(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Ket tensor(const Ket &a, const Ket &b) {
    Ket out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

template <typename T, typename... Rest>
T tensor(const T &a, const T &b, const Rest &...rest) {
    return tensor(tensor(a, b), rest...);
}

inline Complex inner(const Ket &u, const Ket &v) {
    if (u.size() != v.size()) {
        throw UsageError("inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
    }
    return u.dot(v);  // Eigen's dot conjugates the left operand
}

/// max |m_ij - conj(m_ji)|
inline double max_asymmetry(const Matrix &m) {
    if (m.rows() != m.cols()) {
        throw UsageError("max_asymmetry: matrix is not square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

struct EigenSystem {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i pairs with values[i]
};

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// Vectors inside a degenerate cluster come back in an arbitrary orthonormal basis.
inline EigenSystem hermitian_eig(const Matrix &m, double tolerance = kHermitianTolerance) {
    if (m.rows() != m.cols()) {
        throw UsageError("hermitian_eig: matrix is not square");
    }
    if (m.size() == 0) {
        return {};
    }
    const double asym = max_asymmetry(m);
    if (asym > tolerance) {
        std::ostringstream msg;
        msg << "hermitian_eig: matrix is not Hermitian (max asymmetry " << asym << ")";
        throw DomainError(msg.str());
    }
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    const auto n = sym.rows();
    EigenSystem out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Eigen sorts ascending.
        out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

/// Applies f to the spectrum of a Hermitian matrix.
template <typename F>
Matrix spectral_map(const Matrix &m, F &&f) {
    const EigenSystem es = hermitian_eig(m);
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (std::size_t i = 0; i < es.values.size(); ++i) {
        const auto col = es.vectors.col(static_cast<Eigen::Index>(i));
        out += f(es.values[i]) * (col * col.adjoint());
    }
    return out;
}

/// Replaces every eigenvalue by its sign; eigenvalues with |λ| < threshold become +1.
/// The result is a Hermitian unitary.
inline Matrix regularize_to_unitary(const Matrix &m,
                                    double zero_threshold = kZeroEigenvalueThreshold) {
    return spectral_map(m, [zero_threshold](double lambda) -> Complex {
        if (std::abs(lambda) < zero_threshold) {
            return 1.0;
        }
        return lambda > 0 ? 1.0 : -1.0;
    });
}

/// Projector onto the span of eigenvectors with |λ| ≥ threshold.
inline Matrix support_projector(const Matrix &m, double threshold = kZeroEigenvalueThreshold) {
    return spectral_map(m, [threshold](double lambda) -> Complex {
        return std::abs(lambda) >= threshold ? 1.0 : 0.0;
    });
}

/// Moore-Penrose inverse square root of a PSD matrix (zero on its kernel).
inline Matrix inverse_sqrt_psd(const Matrix &m, double threshold = 1e-12) {
    return spectral_map(m, [threshold](double lambda) -> Complex {
        return lambda > threshold ? 1.0 / std::sqrt(lambda) : 0.0;
    });
}

inline Matrix sqrt_psd(const Matrix &m) {
    return spectral_map(m, [](double lambda) -> Complex { return std::sqrt(std::max(lambda, 0.0)); });
}

inline std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace detail {

inline std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    return strides;
}

inline void check_permutation(std::span<const std::size_t> perm, std::size_t n) {
    if (perm.size() != n) {
        throw UsageError("permute: permutation length does not match factor count");
    }
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) {
            throw UsageError("permute: not a permutation");
        }
        seen[p] = true;
    }
}

// Maps each new flat index to the old flat index for a factor permutation.
inline std::vector<std::size_t> permutation_map(std::span<const std::size_t> dims,
                                                std::span<const std::size_t> perm) {
    check_permutation(perm, dims.size());
    std::vector<std::size_t> new_dims(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        new_dims[i] = dims[perm[i]];
    }
    const auto old_strides = strides_of(dims);
    const std::size_t total = product(dims);
    std::vector<std::size_t> map(total);
    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t old_flat = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            old_flat += digits[i] * old_strides[perm[i]];
        }
        map[flat] = old_flat;
        for (std::size_t i = dims.size(); i-- > 0;) {
            if (++digits[i] < new_dims[i]) {
                break;
            }
            digits[i] = 0;
        }
    }
    return map;
}

}  // namespace detail

/// Reorders tensor factors: new factor i is old factor perm[i].
inline Ket permute(const Ket &v, std::span<const std::size_t> dims,
                   std::span<const std::size_t> perm) {
    if (product(dims) != static_cast<std::size_t>(v.size())) {
        throw UsageError("permute: dims do not match ket dimension");
    }
    const auto map = detail::permutation_map(dims, perm);
    Ket out(v.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(map[i]));
    }
    return out;
}

inline Matrix permute(const Matrix &m, std::span<const std::size_t> dims,
                      std::span<const std::size_t> perm) {
    if (m.rows() != m.cols() || product(dims) != static_cast<std::size_t>(m.rows())) {
        throw UsageError("permute: dims do not match matrix dimension");
    }
    const auto map = detail::permutation_map(dims, perm);
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (std::size_t j = 0; j < map.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j]));
        }
    }
    return out;
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their original order.
inline Matrix partial_trace(const Matrix &m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    const std::size_t total = product(dims);
    if (m.rows() != m.cols() || total != static_cast<std::size_t>(m.rows())) {
        throw UsageError("partial_trace: product of dims (" + std::to_string(total) +
                         ") does not match matrix dimension " + std::to_string(m.rows()));
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw UsageError("partial_trace: invalid keep index set");
        }
        kept[k] = true;
    }
    std::vector<std::size_t> keep_dims;
    std::vector<std::size_t> keep_idx;
    std::vector<std::size_t> trace_idx;
    std::vector<std::size_t> trace_dims;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (kept[i]) {
            keep_idx.push_back(i);
            keep_dims.push_back(dims[i]);
        } else {
            trace_idx.push_back(i);
            trace_dims.push_back(dims[i]);
        }
    }
    const auto strides = detail::strides_of(dims);
    const std::size_t nk = product(keep_dims);
    const std::size_t nt = product(trace_dims);

    // Offset into the full space contributed by each kept / traced multi-index.
    auto offsets = [&](const std::vector<std::size_t> &which, const std::vector<std::size_t> &sub,
                       std::size_t count) {
        std::vector<std::size_t> out(count);
        const auto sub_strides = detail::strides_of(sub);
        for (std::size_t flat = 0; flat < count; ++flat) {
            std::size_t off = 0;
            for (std::size_t f = 0; f < which.size(); ++f) {
                off += ((flat / sub_strides[f]) % sub[f]) * strides[which[f]];
            }
            out[flat] = off;
        }
        return out;
    };
    const auto koff = offsets(keep_idx, keep_dims, nk);
    const auto toff = offsets(trace_idx, trace_dims, nt);

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
    for (std::size_t r = 0; r < nk; ++r) {
        for (std::size_t c = 0; c < nk; ++c) {
            Complex acc = 0.0;
            for (std::size_t t = 0; t < nt; ++t) {
                acc += m(static_cast<Eigen::Index>(koff[r] + toff[t]),
                         static_cast<Eigen::Index>(koff[c] + toff[t]));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    }
    return out;
}

/// Applies `op` to the middle factor of a ket on (left) ⊗ (op.rows()) ⊗ (right).
inline Ket apply_on(const Matrix &op, const Ket &v, std::size_t left, std::size_t right) {
    const auto mid = static_cast<std::size_t>(op.cols());
    if (op.rows() != op.cols() || left * mid * right != static_cast<std::size_t>(v.size())) {
        throw UsageError("apply_on: operator of dim " + std::to_string(mid) +
                         " does not fit ket of dim " + std::to_string(v.size()));
    }
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Ket out(v.size());
    const auto m = static_cast<Eigen::Index>(mid);
    const auto r = static_cast<Eigen::Index>(right);
    for (std::size_t l = 0; l < left; ++l) {
        const auto offset = static_cast<Eigen::Index>(l * mid * right);
        Eigen::Map<const RowMajor> in_block(v.data() + offset, m, r);
        Eigen::Map<RowMajor> out_block(out.data() + offset, m, r);
        out_block.noalias() = op * in_block;
    }
    return out;
}

}  // namespace nlwe
