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

// Physical realizations of the bilocality network and their correlations.
//
// Global subsystem order is A ⊗ B1 ⊗ B2 ⊗ C. The two sources are kets on
// A ⊗ B1 and B2 ⊗ C; the network state is their tensor product, so the
// model cannot represent correlated sources.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlwe/linalg.hpp"
#include "nlwe/reference.hpp"

namespace nlwe {

inline constexpr double kStateNormTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-10;
inline constexpr double kCompletenessTolerance = 1e-9;

struct SiteDims {
    std::size_t a = kQutrit;
    std::size_t b1 = kQutrit;
    std::size_t b2 = kQutrit;
    std::size_t c = kQutrit;

    std::size_t bob() const { return b1 * b2; }
    std::size_t total() const { return a * b1 * b2 * c; }
    bool operator==(const SiteDims &) const = default;
};

/// Measurement elements of one setting, indexed by outcome.
using Family = std::vector<Matrix>;

struct Realization {
    SiteDims dims;
    Ket state_ab1;
    Ket state_b2c;
    std::vector<Family> alice;    // 3 settings x 3 outcomes, on A
    std::vector<Family> bob;      // 5 settings x 9 outcomes (3*b1 + b2), on B1 ⊗ B2
    std::vector<Family> charlie;  // 3 settings x 3 outcomes, on C

    /// |ψ⟩^{AB1} ⊗ |ψ⟩^{B2C}
    Ket network_state() const { return tensor(state_ab1, state_b2c); }

    /// Throws UsageError on shape problems, ValidationError on the first failed physical check.
    void validate() const;
};

/// Bob's coarse-grained element Σ_{b2} M_{b1,b2|y}.
inline Matrix bob_marginal_b1(const Realization &r, std::size_t y, std::size_t b1) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(r.dims.bob()),
                            static_cast<Eigen::Index>(r.dims.bob()));
    for (std::size_t b2 = 0; b2 < kOutcomes; ++b2) {
        m += r.bob.at(y).at(3 * b1 + b2);
    }
    return m;
}

/// Bob's coarse-grained element Σ_{b1} M_{b1,b2|y}.
inline Matrix bob_marginal_b2(const Realization &r, std::size_t y, std::size_t b2) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(r.dims.bob()),
                            static_cast<Eigen::Index>(r.dims.bob()));
    for (std::size_t b1 = 0; b1 < kOutcomes; ++b1) {
        m += r.bob.at(y).at(3 * b1 + b2);
    }
    return m;
}

namespace detail {

inline void check_family_shape(const std::vector<Family> &families, std::size_t settings,
                               std::size_t outcomes, std::size_t dim, const char *party) {
    if (families.size() != settings) {
        throw UsageError(std::string(party) + ": expected " + std::to_string(settings) +
                         " settings, got " + std::to_string(families.size()));
    }
    for (std::size_t s = 0; s < settings; ++s) {
        if (families[s].size() != outcomes) {
            throw UsageError(std::string(party) + "[" + std::to_string(s) + "]: expected " +
                             std::to_string(outcomes) + " outcomes, got " +
                             std::to_string(families[s].size()));
        }
        for (std::size_t o = 0; o < outcomes; ++o) {
            const Matrix &m = families[s][o];
            if (m.rows() != static_cast<Eigen::Index>(dim) ||
                m.cols() != static_cast<Eigen::Index>(dim)) {
                throw UsageError(std::string(party) + "[" + std::to_string(s) + "][" +
                                 std::to_string(o) + "]: expected " + std::to_string(dim) + "x" +
                                 std::to_string(dim) + " matrix");
            }
        }
    }
}

inline void validate_families(const std::vector<Family> &families, const char *party) {
    for (std::size_t s = 0; s < families.size(); ++s) {
        const std::string tag = std::string(party) + "[" + std::to_string(s) + "]";
        Matrix sum = Matrix::Zero(families[s][0].rows(), families[s][0].cols());
        for (std::size_t o = 0; o < families[s].size(); ++o) {
            const Matrix &m = families[s][o];
            const std::string etag = tag + "[" + std::to_string(o) + "]";
            if (!m.allFinite()) {
                throw ValidationError(etag, "non-finite entry", INFINITY);
            }
            const double asym = max_asymmetry(m);
            if (asym > kHermitianTolerance) {
                std::ostringstream msg;
                msg << "element is not Hermitian, asymmetry residual " << asym;
                throw ValidationError(etag, msg.str(), asym);
            }
            const double lmin = hermitian_eig(m).values.back();
            if (lmin < -kPositivityTolerance) {
                std::ostringstream msg;
                msg << "positivity violated, min eigenvalue " << lmin;
                throw ValidationError(etag, msg.str(), -lmin);
            }
            sum += m;
        }
        const double residual = (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
        if (residual > kCompletenessTolerance) {
            std::ostringstream msg;
            msg << "completeness residual " << residual << " exceeds " << kCompletenessTolerance;
            throw ValidationError(tag, msg.str(), residual);
        }
    }
}

inline void validate_state(const Ket &v, const char *name) {
    if (!v.allFinite()) {
        throw ValidationError(name, "non-finite amplitude", INFINITY);
    }
    const double residual = std::abs(v.norm() - 1.0);
    if (residual > kStateNormTolerance) {
        std::ostringstream msg;
        msg << "state not normalized, norm residual " << residual;
        throw ValidationError(name, msg.str(), residual);
    }
}

}  // namespace detail

inline void Realization::validate() const {
    if (dims.a == 0 || dims.b1 == 0 || dims.b2 == 0 || dims.c == 0) {
        throw UsageError("dims: every site dimension must be positive");
    }
    if (static_cast<std::size_t>(state_ab1.size()) != dims.a * dims.b1) {
        throw UsageError("state_ab1: dimension does not match dA*dB1");
    }
    if (static_cast<std::size_t>(state_b2c.size()) != dims.b2 * dims.c) {
        throw UsageError("state_b2c: dimension does not match dB2*dC");
    }
    detail::check_family_shape(alice, kSideSettings, kOutcomes, dims.a, "alice");
    detail::check_family_shape(bob, kBobSettings, kBobOutcomes, dims.bob(), "bob");
    detail::check_family_shape(charlie, kSideSettings, kOutcomes, dims.c, "charlie");
    detail::validate_state(state_ab1, "state_ab1");
    detail::validate_state(state_b2c, "state_b2c");
    detail::validate_families(alice, "alice");
    detail::validate_families(bob, "bob");
    detail::validate_families(charlie, "charlie");
}

inline Realization to_realization(const ReferenceExperiment &ref) {
    Realization r;
    r.state_ab1 = ref.state_ab1;
    r.state_b2c = ref.state_b2c;
    for (const auto &m : ref.alice) r.alice.push_back(m.elements);
    for (const auto &m : ref.charlie) r.charlie.push_back(m.elements);
    for (const auto &m : ref.bob_product) r.bob.push_back(m.elements);
    Family domino;
    for (const auto &e : ref.bob_domino.elements) domino.push_back(e.projector);
    r.bob.push_back(std::move(domino));
    return r;
}

inline Realization reference_realization() { return to_realization(assemble_reference()); }

/// p(a,b1,b2,c|x,y,z) stored flat in [x][y][z][a][b1][b2][c] order.
class CorrelationTensor {
  public:
    static constexpr std::array<std::size_t, 7> kShape = {3, 5, 3, 3, 3, 3, 3};
    static constexpr std::size_t kSize = 3 * 5 * 3 * 81;
    static constexpr std::size_t kSettingTriples = 45;
    static constexpr std::size_t kOutcomeTuples = 81;

    CorrelationTensor() : values_(kSize, 0.0) {}

    static std::size_t index(std::size_t x, std::size_t y, std::size_t z, std::size_t a,
                             std::size_t b1, std::size_t b2, std::size_t c) {
        return ((((((x * 5 + y) * 3 + z) * 3 + a) * 3 + b1) * 3 + b2) * 3) + c;
    }

    double &at(std::size_t x, std::size_t y, std::size_t z, std::size_t a, std::size_t b1,
               std::size_t b2, std::size_t c) {
        return values_[index(x, y, z, a, b1, b2, c)];
    }
    double at(std::size_t x, std::size_t y, std::size_t z, std::size_t a, std::size_t b1,
              std::size_t b2, std::size_t c) const {
        return values_[index(x, y, z, a, b1, b2, c)];
    }

    const std::vector<double> &values() const { return values_; }
    std::vector<double> &values() { return values_; }

    /// max over setting triples of |Σ_outcomes p − 1|
    double normalization_residual() const {
        double worst = 0.0;
        for (std::size_t s = 0; s < kSettingTriples; ++s) {
            double sum = 0.0;
            for (std::size_t o = 0; o < kOutcomeTuples; ++o) {
                sum += values_[s * kOutcomeTuples + o];
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        return worst;
    }

  private:
    std::vector<double> values_;
};

namespace detail {

// Tr_A[(M ⊗ 1)|ψ⟩⟨ψ|] for ψ on A ⊗ B.
inline Matrix conditional_right(const Matrix &m, const Ket &psi, std::size_t da, std::size_t db) {
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> amp(psi.data(), static_cast<Eigen::Index>(da),
                                   static_cast<Eigen::Index>(db));
    const Matrix applied = m * amp;
    return applied.transpose() * amp.conjugate();
}

// Tr_B[(1 ⊗ M)|ψ⟩⟨ψ|] for ψ on A ⊗ B.
inline Matrix conditional_left(const Matrix &m, const Ket &psi, std::size_t da, std::size_t db) {
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> amp(psi.data(), static_cast<Eigen::Index>(da),
                                   static_cast<Eigen::Index>(db));
    const Matrix applied = amp * m.transpose();
    return applied * amp.adjoint();
}

// Tr[m k]
inline Complex trace_product(const Matrix &m, const Matrix &k) {
    return m.transpose().cwiseProduct(k).sum();
}

}  // namespace detail

/// Full correlation tensor ⟨ψ|⊗⟨ψ| M_{a|x} ⊗ M_{b1,b2|y} ⊗ M_{c|z} |ψ⟩⊗|ψ⟩.
inline CorrelationTensor correlations(const Realization &r) {
    const auto &d = r.dims;
    if (static_cast<std::size_t>(r.state_ab1.size()) != d.a * d.b1 ||
        static_cast<std::size_t>(r.state_b2c.size()) != d.b2 * d.c) {
        throw UsageError("correlations: state dimensions do not match site dims");
    }
    detail::check_family_shape(r.alice, kSideSettings, kOutcomes, d.a, "alice");
    detail::check_family_shape(r.bob, kBobSettings, kBobOutcomes, d.bob(), "bob");
    detail::check_family_shape(r.charlie, kSideSettings, kOutcomes, d.c, "charlie");

    // Bob-side conditional operators: B1 part from Alice's outcome, B2 part from Charlie's.
    std::array<std::array<Matrix, kOutcomes>, kSideSettings> left;
    std::array<std::array<Matrix, kOutcomes>, kSideSettings> right;
    for (std::size_t s = 0; s < kSideSettings; ++s) {
        for (std::size_t o = 0; o < kOutcomes; ++o) {
            left[s][o] = detail::conditional_right(r.alice[s][o], r.state_ab1, d.a, d.b1);
            right[s][o] = detail::conditional_left(r.charlie[s][o], r.state_b2c, d.b2, d.c);
        }
    }
    CorrelationTensor t;
    for (std::size_t x = 0; x < kSideSettings; ++x) {
        for (std::size_t a = 0; a < kOutcomes; ++a) {
            for (std::size_t z = 0; z < kSideSettings; ++z) {
                for (std::size_t c = 0; c < kOutcomes; ++c) {
                    const Matrix joint = tensor(left[x][a], right[z][c]);
                    for (std::size_t y = 0; y < kBobSettings; ++y) {
                        for (std::size_t b = 0; b < kBobOutcomes; ++b) {
                            t.at(x, y, z, a, b / 3, b % 3, c) =
                                detail::trace_product(r.bob[y][b], joint).real();
                        }
                    }
                }
            }
        }
    }
    return t;
}

/// Maximum absolute entrywise difference.
inline double tensor_distance(const CorrelationTensor &t1, const CorrelationTensor &t2) {
    if (t1.values().size() != t2.values().size()) {
        throw UsageError("tensor_distance: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < t1.values().size(); ++i) {
        worst = std::max(worst, std::abs(t1.values()[i] - t2.values()[i]));
    }
    return worst;
}

enum class Party { A = 0, B1 = 1, B2 = 2, C = 3 };

/// p(kept outcomes | x, y, z); dropped outcome indices are summed.
class MarginalTable {
  public:
    MarginalTable(std::vector<Party> kept, std::vector<double> values)
        : kept_(std::move(kept)), values_(std::move(values)) {}

    const std::vector<Party> &kept() const { return kept_; }

    double at(std::size_t x, std::size_t y, std::size_t z,
              std::span<const std::size_t> outcomes) const {
        if (outcomes.size() != kept_.size()) {
            throw UsageError("MarginalTable::at: wrong number of outcomes");
        }
        std::size_t idx = (x * 5 + y) * 3 + z;
        for (std::size_t o : outcomes) {
            if (o >= kOutcomes) throw UsageError("MarginalTable::at: outcome out of range");
            idx = idx * 3 + o;
        }
        return values_.at(idx);
    }
    double at(std::size_t x, std::size_t y, std::size_t z,
              std::initializer_list<std::size_t> outcomes) const {
        return at(x, y, z, std::span<const std::size_t>(outcomes.begin(), outcomes.size()));
    }

  private:
    std::vector<Party> kept_;
    std::vector<double> values_;
};

inline MarginalTable marginalize(const CorrelationTensor &t, std::vector<Party> kept) {
    std::array<bool, 4> seen{};
    for (Party p : kept) {
        const auto i = static_cast<std::size_t>(p);
        if (i > 3 || seen[i]) {
            throw UsageError("marginalize: invalid or repeated outcome variable");
        }
        seen[i] = true;
    }
    std::size_t per_setting = 1;
    for (std::size_t i = 0; i < kept.size(); ++i) per_setting *= 3;
    std::vector<double> values(CorrelationTensor::kSettingTriples * per_setting, 0.0);
    for (std::size_t s = 0; s < CorrelationTensor::kSettingTriples; ++s) {
        for (std::size_t o = 0; o < CorrelationTensor::kOutcomeTuples; ++o) {
            const std::array<std::size_t, 4> out = {o / 27, (o / 9) % 3, (o / 3) % 3, o % 3};
            std::size_t idx = 0;
            for (Party p : kept) idx = idx * 3 + out[static_cast<std::size_t>(p)];
            values[s * per_setting + idx] += t.values()[s * CorrelationTensor::kOutcomeTuples + o];
        }
    }
    return MarginalTable(std::move(kept), std::move(values));
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the R diagonal phase-fixed.
template <typename Rng>
Matrix haar_unitary(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = rmat(i, i);
        const double mag = std::abs(d);
        q.col(i) *= mag > 0 ? d / mag : Complex(1.0);
    }
    return q;
}

template <typename Rng>
Ket haar_state(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Ket v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return v / v.norm();
}

struct EquivalenceOptions {
    std::uint64_t seed = 0;
    /// Junk dimension per site (A, B1, B2, C); 1 means no junk.
    std::array<std::size_t, 4> junk = {1, 1, 1, 1};
    /// Apply Haar-random local unitaries after embedding.
    bool rotate = true;
};

namespace detail {

// Embeds a ket on X ⊗ Y with a junk ket on jX ⊗ jY into (X jX) ⊗ (Y jY).
inline Ket embed_source(const Ket &core, std::size_t dx, std::size_t dy, const Ket &junk,
                        std::size_t jx, std::size_t jy) {
    const std::array<std::size_t, 4> dims = {dx, dy, jx, jy};
    const std::array<std::size_t, 4> perm = {0, 2, 1, 3};
    return permute(tensor(core, junk), dims, perm);
}

inline Family embed_local(const Family &f, std::size_t junk) {
    Family out;
    for (const Matrix &m : f) out.push_back(tensor(m, identity(junk)));
    return out;
}

inline Family embed_bob(const Family &f, std::size_t db1, std::size_t db2, std::size_t j1,
                        std::size_t j2) {
    const std::array<std::size_t, 4> dims = {db1, db2, j1, j2};
    const std::array<std::size_t, 4> perm = {0, 2, 1, 3};
    Family out;
    for (const Matrix &m : f) out.push_back(permute(tensor(m, identity(j1 * j2)), dims, perm));
    return out;
}

inline Family conjugate_family(const Family &f, const Matrix &u) {
    Family out;
    for (const Matrix &m : f) out.push_back(u * m * u.adjoint());
    return out;
}

}  // namespace detail

/// A realization locally equivalent to `base`: each site is optionally enlarged
/// by a junk factor (sources carry a fixed random junk pure state) and then
/// rotated by an independent Haar-random unitary. Correlations are unchanged.
inline Realization randomized_equivalent(const Realization &base, const EquivalenceOptions &opt) {
    for (std::size_t j : opt.junk) {
        if (j == 0) throw UsageError("randomized_equivalent: junk dimension must be >= 1");
    }
    std::mt19937_64 rng(opt.seed);
    const auto [ja, jb1, jb2, jc] = opt.junk;
    const SiteDims &d = base.dims;

    Realization r;
    r.dims = {d.a * ja, d.b1 * jb1, d.b2 * jb2, d.c * jc};

    Ket junk_ab1 = Ket::Ones(1);
    Ket junk_b2c = Ket::Ones(1);
    if (ja * jb1 > 1) junk_ab1 = haar_state(ja * jb1, rng);
    if (jb2 * jc > 1) junk_b2c = haar_state(jb2 * jc, rng);
    r.state_ab1 = detail::embed_source(base.state_ab1, d.a, d.b1, junk_ab1, ja, jb1);
    r.state_b2c = detail::embed_source(base.state_b2c, d.b2, d.c, junk_b2c, jb2, jc);
    for (const auto &f : base.alice) r.alice.push_back(detail::embed_local(f, ja));
    for (const auto &f : base.charlie) r.charlie.push_back(detail::embed_local(f, jc));
    for (const auto &f : base.bob) r.bob.push_back(detail::embed_bob(f, d.b1, d.b2, jb1, jb2));

    if (opt.rotate) {
        const Matrix ua = haar_unitary(r.dims.a, rng);
        const Matrix ub1 = haar_unitary(r.dims.b1, rng);
        const Matrix ub2 = haar_unitary(r.dims.b2, rng);
        const Matrix uc = haar_unitary(r.dims.c, rng);
        const Matrix ub = tensor(ub1, ub2);
        r.state_ab1 = tensor(ua, ub1) * r.state_ab1;
        r.state_b2c = tensor(ub2, uc) * r.state_b2c;
        for (auto &f : r.alice) f = detail::conjugate_family(f, ua);
        for (auto &f : r.bob) f = detail::conjugate_family(f, ub);
        for (auto &f : r.charlie) f = detail::conjugate_family(f, uc);
    }

    const double drift = tensor_distance(correlations(r), correlations(base));
    if (drift > 1e-10) {
        throw std::logic_error("randomized_equivalent: correlations drifted by " +
                               std::to_string(drift));
    }
    return r;
}

}  // namespace nlwe
