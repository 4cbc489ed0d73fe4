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

// Self-testing isometry built from black-box measurement operators.
//
// Round 1 pairs Alice with Bob's b1-marginals and swaps the A/B1 qutrits into
// ancillas A'B1'. Round 2 mirrors it with Charlie and Bob's b2-marginals and
// produces ancillas B2'C'. Composite images are ordered
// A ⊗ B1 ⊗ B2 ⊗ C ⊗ A' ⊗ B1' ⊗ B2' ⊗ C'.

#pragma once

#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlwe/realization.hpp"

namespace nlwe {

enum class Round { First, Second };

struct Tolerances {
    double stats = 1e-10;       // correlation-tensor match
    double residual = 1e-9;     // operator-level checks
    double extraction = 1e-8;   // isometry images
};

/// Operators of one round. "side" is Alice (round 1) or Charlie (round 2) and
/// acts on A or C; every Bob operator acts on B1 ⊗ B2.
struct BlockOperators {
    Round round = Round::First;

    std::array<Family, kSideSettings> side;  // M_{j|x}
    std::array<Family, 4> bob;               // coarse-grained M^B_{b|y}, y = 0..3

    Matrix side_z01, side_z12, side_x01, side_x12;
    Matrix side_id01_z, side_id12_z, side_id01_x, side_id12_x;

    Matrix bob_d01, bob_d12, bob_e01, bob_e12;
    Matrix bob_id01_d, bob_id12_d, bob_id01_e, bob_id12_e;
    Matrix bob_z01_hat, bob_x01_hat, bob_z12_hat, bob_x12_hat;
    // Regularized Hermitian unitaries on the whole of B1 ⊗ B2.
    Matrix bob_z01_unitary, bob_x01_unitary, bob_z12_unitary, bob_x12_unitary;
    // The same restricted to the block ranges: Z² = 1_{ij}.
    Matrix bob_z01, bob_x01, bob_z12, bob_x12;
    Matrix bob_id01, bob_id12;  // projectors onto range(D_ij) + range(E_ij)
    std::array<Matrix, 3> bob_p;
};

struct SwapOperators {
    Round round = Round::First;
    Matrix side_z, bob_z;  // order-3 unitaries
    Matrix side_x1, side_x2, bob_x1, bob_x2;
    Matrix fourier;  // on a qutrit ancilla
    // X^(j) M_{j|0} and X^(k) P_k: the branch operators of the isometry.
    std::array<Matrix, 3> side_branch, bob_branch;
};

inline Complex omega() { return std::polar(1.0, 2.0 * std::numbers::pi / 3.0); }

inline BlockOperators build_block_operators(const Realization &r, Round round) {
    const auto &d = r.dims;
    const auto &side_families = round == Round::First ? r.alice : r.charlie;
    const std::size_t side_dim = round == Round::First ? d.a : d.c;
    detail::check_family_shape(side_families, kSideSettings, kOutcomes, side_dim,
                               round == Round::First ? "alice" : "charlie");
    detail::check_family_shape(r.bob, kBobSettings, kBobOutcomes, d.bob(), "bob");

    BlockOperators b;
    b.round = round;
    for (std::size_t x = 0; x < kSideSettings; ++x) b.side[x] = side_families[x];
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t o = 0; o < kOutcomes; ++o) {
            b.bob[y].push_back(round == Round::First ? bob_marginal_b1(r, y, o)
                                                     : bob_marginal_b2(r, y, o));
        }
    }
    const auto &m = b.side;
    b.side_z01 = m[0][0] - m[0][1];
    b.side_z12 = m[0][1] - m[0][2];
    b.side_x01 = m[1][0] - m[1][1];
    b.side_x12 = m[2][1] - m[2][2];
    b.side_id01_z = m[0][0] + m[0][1];
    b.side_id12_z = m[0][1] + m[0][2];
    b.side_id01_x = m[1][0] + m[1][1];
    b.side_id12_x = m[2][1] + m[2][2];

    const auto &n = b.bob;
    b.bob_d01 = n[0][0] - n[0][1];
    b.bob_d12 = n[2][1] - n[2][2];
    b.bob_e01 = n[1][0] - n[1][1];
    b.bob_e12 = n[3][1] - n[3][2];
    b.bob_id01_d = n[0][0] + n[0][1];
    b.bob_id12_d = n[2][1] + n[2][2];
    b.bob_id01_e = n[1][0] + n[1][1];
    b.bob_id12_e = n[3][1] + n[3][2];

    const double r2 = std::sqrt(2.0);
    b.bob_z01_hat = (b.bob_d01 + b.bob_e01) / r2;
    b.bob_x01_hat = (b.bob_d01 - b.bob_e01) / r2;
    b.bob_z12_hat = (b.bob_d12 + b.bob_e12) / r2;
    b.bob_x12_hat = (b.bob_d12 - b.bob_e12) / r2;

    b.bob_z01_unitary = regularize_to_unitary(b.bob_z01_hat);
    b.bob_x01_unitary = regularize_to_unitary(b.bob_x01_hat);
    b.bob_z12_unitary = regularize_to_unitary(b.bob_z12_hat);
    b.bob_x12_unitary = regularize_to_unitary(b.bob_x12_hat);

    b.bob_id01 = support_projector(b.bob_d01 * b.bob_d01 + b.bob_e01 * b.bob_e01);
    b.bob_id12 = support_projector(b.bob_d12 * b.bob_d12 + b.bob_e12 * b.bob_e12);

    // The hatted operators preserve their block range, so the regularized
    // unitary commutes with the range projector and the product is Hermitian.
    auto restrict = [](const Matrix &proj, const Matrix &u) {
        const Matrix p = proj * u;
        return Matrix(0.5 * (p + p.adjoint()));
    };
    b.bob_z01 = restrict(b.bob_id01, b.bob_z01_unitary);
    b.bob_x01 = restrict(b.bob_id01, b.bob_x01_unitary);
    b.bob_z12 = restrict(b.bob_id12, b.bob_z12_unitary);
    b.bob_x12 = restrict(b.bob_id12, b.bob_x12_unitary);

    b.bob_p[0] = 0.5 * (b.bob_id01 + b.bob_z01);
    b.bob_p[1] = 0.5 * (b.bob_id01 - b.bob_z01);
    b.bob_p[2] = 0.5 * (b.bob_id12 - b.bob_z12);
    return b;
}

inline Matrix qutrit_fourier() {
    Matrix f(3, 3);
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 3; ++j) f(k, j) = std::pow(omega(), j * k) / std::sqrt(3.0);
    }
    return f;
}

inline SwapOperators build_swap_operators(const BlockOperators &b) {
    SwapOperators s;
    s.round = b.round;
    const auto side_dim = b.side[0][0].rows();
    const auto bob_dim = b.bob[0][0].rows();
    const Matrix side_one = Matrix::Identity(side_dim, side_dim);
    const Matrix bob_one = Matrix::Identity(bob_dim, bob_dim);

    s.side_z = Matrix::Zero(side_dim, side_dim);
    s.bob_z = Matrix::Zero(bob_dim, bob_dim);
    for (int j = 0; j < 3; ++j) {
        s.side_z += std::pow(omega(), j) * b.side[0][static_cast<std::size_t>(j)];
        s.bob_z += std::pow(omega(), j) * b.bob_p[static_cast<std::size_t>(j)];
    }
    s.side_x1 = b.side_x01 + side_one - b.side_id01_x;
    s.side_x2 = s.side_x1 * (side_one - b.side_id12_x + b.side_x12);
    s.bob_x1 = b.bob_x01 + bob_one - b.bob_id01;
    s.bob_x2 = s.bob_x1 * (bob_one - b.bob_id12 + b.bob_x12);
    s.fourier = qutrit_fourier();

    s.side_branch = {b.side[0][0], s.side_x1 * b.side[0][1], s.side_x2 * b.side[0][2]};
    s.bob_branch = {b.bob_p[0], s.bob_x1 * b.bob_p[1], s.bob_x2 * b.bob_p[2]};
    return s;
}

namespace detail {

inline void require_round(const SwapOperators &s, Round round, const char *who) {
    if (s.round != round) {
        throw UsageError(std::string(who) + ": swap operators were built for the other round");
    }
}

inline void require_dim(const Ket &v, std::size_t expected, const char *who) {
    if (static_cast<std::size_t>(v.size()) != expected) {
        throw UsageError(std::string(who) + ": input dimension " + std::to_string(v.size()) +
                         " does not match expected " + std::to_string(expected));
    }
}

}  // namespace detail

/// v ↦ Σ_{j,k} (X^(j) M_{j|0} ⊗ X^(k) P_k ⊗ 1) v ⊗ |j⟩_{A'} |k⟩_{B1'}.
/// `trailing` is the dimension of any ancillas already appended after C.
inline Ket apply_isometry_round1(const SwapOperators &s, const Ket &input, const SiteDims &d,
                                 std::size_t trailing = 1) {
    detail::require_round(s, Round::First, "apply_isometry_round1");
    const std::size_t n = d.total() * trailing;
    detail::require_dim(input, n, "apply_isometry_round1");
    Ket out = Ket::Zero(static_cast<Eigen::Index>(n * 9));
    for (std::size_t j = 0; j < 3; ++j) {
        const Ket u = apply_on(s.side_branch[j], input, 1, d.bob() * d.c * trailing);
        for (std::size_t k = 0; k < 3; ++k) {
            const Ket w = apply_on(s.bob_branch[k], u, d.a, d.c * trailing);
            for (std::size_t i = 0; i < n; ++i) {
                out(static_cast<Eigen::Index>(i * 9 + j * 3 + k)) = w(static_cast<Eigen::Index>(i));
            }
        }
    }
    return out;
}

/// Mirror of round 1: v ↦ Σ_{k,j} (X^(k) P_k ⊗ X^(j) M_{j|0}) v ⊗ |k⟩_{B2'} |j⟩_{C'}.
inline Ket apply_isometry_round2(const SwapOperators &s, const Ket &input, const SiteDims &d,
                                 std::size_t trailing = 1) {
    detail::require_round(s, Round::Second, "apply_isometry_round2");
    const std::size_t n = d.total() * trailing;
    detail::require_dim(input, n, "apply_isometry_round2");
    Ket out = Ket::Zero(static_cast<Eigen::Index>(n * 9));
    for (std::size_t j = 0; j < 3; ++j) {
        const Ket u = apply_on(s.side_branch[j], input, d.a * d.bob(), trailing);
        for (std::size_t k = 0; k < 3; ++k) {
            const Ket w = apply_on(s.bob_branch[k], u, d.a, d.c * trailing);
            for (std::size_t i = 0; i < n; ++i) {
                out(static_cast<Eigen::Index>(i * 9 + k * 3 + j)) = w(static_cast<Eigen::Index>(i));
            }
        }
    }
    return out;
}

/// (Φ_A ⊗ Φ_B1) ∘ (Φ_B2 ⊗ Φ_C), ancillas reordered to A'B1'B2'C'.
inline Ket apply_composite_isometry(const SwapOperators &first, const SwapOperators &second,
                                    const Ket &input, const SiteDims &d) {
    const Ket after_second = apply_isometry_round2(second, input, d);
    const Ket after_first = apply_isometry_round1(first, after_second, d, 9);
    const std::array<std::size_t, 5> dims = {d.total(), 3, 3, 3, 3};
    const std::array<std::size_t, 5> perm = {0, 3, 4, 1, 2};
    return permute(after_first, dims, perm);
}

struct ExtractionResult {
    std::string id;
    double fidelity = 0.0;    // |⟨target|achieved⟩| / (‖target‖ ‖achieved‖)
    double residual = 0.0;    // ‖achieved/‖achieved‖ − e^{iθ} target/‖target‖‖, θ phase-aligned
    double norm_ratio = 1.0;  // ‖achieved‖ / ‖target‖
    bool pass = false;
    Ket junk;  // populated for state statements only
};

/// Phase-insensitive comparison of an isometry image against its target.
inline ExtractionResult compare_images(std::string id, const Ket &achieved, const Ket &target,
                                       double tolerance) {
    detail::require_dim(achieved, static_cast<std::size_t>(target.size()), "compare_images");
    ExtractionResult res;
    res.id = std::move(id);
    const double na = achieved.norm();
    const double nt = target.norm();
    if (nt == 0.0 || na == 0.0) {
        res.fidelity = (na == nt) ? 1.0 : 0.0;
        res.residual = (na == nt) ? 0.0 : std::sqrt(2.0);
        res.norm_ratio = (nt == 0.0) ? (na == 0.0 ? 1.0 : INFINITY) : 0.0;
    } else {
        const Complex ov = inner(target, achieved);
        const double mag = std::abs(ov);
        const Complex phase = mag > 0 ? ov / mag : Complex(1.0);
        res.fidelity = std::min(1.0, mag / (na * nt));
        res.residual = (achieved / na - phase * target / nt).norm();
        res.norm_ratio = na / nt;
    }
    res.pass = res.residual <= tolerance && std::abs(res.norm_ratio - 1.0) <= tolerance;
    return res;
}

/// Largest Schmidt weight of `v` across the cut (left dims) | (right dims) and
/// the norm of everything beyond it, relative to ‖v‖.
struct SchmidtSplit {
    double leading_weight = 1.0;
    double residual = 0.0;
};

inline SchmidtSplit schmidt_split(const Ket &v, std::size_t left, std::size_t right) {
    detail::require_dim(v, left * right, "schmidt_split");
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Matrix m = Eigen::Map<const RowMajor>(v.data(), static_cast<Eigen::Index>(left),
                                                static_cast<Eigen::Index>(right));
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto &sv = svd.singularValues();
    double total = 0.0;
    double tail = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        total += sv(i) * sv(i);
        if (i > 0) tail += sv(i) * sv(i);
    }
    if (total == 0.0) return {0.0, 0.0};
    return {sv(0) * sv(0) / total, std::sqrt(tail / total)};
}

/// Statistics differ from the reference: the theorem makes no claim.
struct HypothesisViolation : std::runtime_error {
    HypothesisViolation(const std::string &what, double distance)
        : std::runtime_error(what), distance(distance) {}
    double distance;
};

namespace detail {

inline Ket on_first_qutrit(const Matrix &m, const Ket &pair) { return tensor(m, identity(3)) * pair; }
inline Ket on_second_qutrit(const Matrix &m, const Ket &pair) { return tensor(identity(3), m) * pair; }

inline std::string describe_entry(std::size_t flat) {
    std::array<std::size_t, 7> idx{};
    for (std::size_t i = 7; i-- > 0;) {
        idx[i] = flat % CorrelationTensor::kShape[i];
        flat /= CorrelationTensor::kShape[i];
    }
    std::ostringstream ss;
    ss << "p(a=" << idx[3] << ",b1=" << idx[4] << ",b2=" << idx[5] << ",c=" << idx[6]
       << "|x=" << idx[0] << ",y=" << idx[1] << ",z=" << idx[2] << ")";
    return ss.str();
}

}  // namespace detail

/// Throws HypothesisViolation when `observed` is farther than `tolerance` from
/// the reference statistics, naming the worst entry and the first mismatched
/// domino pattern (if any).
inline void require_reference_statistics(const CorrelationTensor &observed, double tolerance) {
    static const CorrelationTensor reference = correlations(reference_realization());
    const double dist = tensor_distance(observed, reference);
    if (dist <= tolerance) return;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < observed.values().size(); ++i) {
        if (std::abs(observed.values()[i] - reference.values()[i]) >
            std::abs(observed.values()[worst] - reference.values()[worst])) {
            worst = i;
        }
    }
    std::ostringstream msg;
    msg << std::setprecision(12) << "statistics do not match the reference: worst entry "
        << detail::describe_entry(worst) << " = " << observed.values()[worst] << " (reference "
        << reference.values()[worst] << ", distance " << dist << ")";
    for (const auto &p : kDominoPatterns) {
        const double v = observed.at(p.x, kDominoSetting, p.z, p.a, p.b1, p.b2, p.c);
        if (std::abs(v - 1.0 / 9.0) > tolerance) {
            msg << "; Table I pattern (x,z)=(" << p.x << "," << p.z << ") -> (a,b1,b2,c)=("
                << p.a << "," << p.b1 << "," << p.b2 << "," << p.c << ") has p = " << v
                << " instead of 1/9";
            break;
        }
    }
    throw HypothesisViolation(msg.str(), dist);
}

/// Everything needed to evaluate the self-testing statements on one realization.
struct SelfTestContext {
    const Realization *realization = nullptr;
    BlockOperators block1, block2;
    SwapOperators swap1, swap2;
    Ket psi;          // |ψ⟩^{AB1} ⊗ |ψ⟩^{B2C}
    Ket junk_round1;  // √3 M^A_{0|0} |ψ⟩
    Ket junk_round2;  // √3 M^C_{0|0} |ψ⟩
    Ket junk;         // 3 M^A_{0|0} ⊗ M^C_{0|0} |ψ⟩ = |ξ1⟩ ⊗ |ξ2⟩

    explicit SelfTestContext(const Realization &r)
        : realization(&r),
          block1(build_block_operators(r, Round::First)),
          block2(build_block_operators(r, Round::Second)),
          swap1(build_swap_operators(block1)),
          swap2(build_swap_operators(block2)),
          psi(r.network_state()) {
        junk_round1 = std::sqrt(3.0) * on_alice(r.alice[0][0], psi);
        junk_round2 = std::sqrt(3.0) * on_charlie(r.charlie[0][0], psi);
        junk = std::sqrt(3.0) * on_charlie(r.charlie[0][0], junk_round1);
    }

    Ket on_alice(const Matrix &m, const Ket &v) const {
        const auto &d = realization->dims;
        return apply_on(m, v, 1, d.bob() * d.c);
    }
    Ket on_bob(const Matrix &m, const Ket &v) const {
        const auto &d = realization->dims;
        return apply_on(m, v, d.a, d.c);
    }
    Ket on_charlie(const Matrix &m, const Ket &v) const {
        const auto &d = realization->dims;
        return apply_on(m, v, d.a * d.bob(), 1);
    }
    Ket round1(const Ket &v) const { return apply_isometry_round1(swap1, v, realization->dims); }
    Ket round2(const Ket &v) const { return apply_isometry_round2(swap2, v, realization->dims); }
    Ket composite(const Ket &v) const {
        return apply_composite_isometry(swap1, swap2, v, realization->dims);
    }
};

/// Runs every self-testing statement on a realization whose statistics match
/// the reference. Results come back in a fixed order:
/// state statements, junk factorization, side-party measurements,
/// Bob's coarse-grained measurements, then the nine domino outcomes.
inline std::vector<ExtractionResult> verify_theorem1(const Realization &r,
                                                     const Tolerances &tol = {}) {
    r.validate();
    require_reference_statistics(correlations(r), tol.stats);

    const SelfTestContext ctx(r);
    const auto ref = assemble_reference();
    const Ket phi = max_entangled(3);
    const Ket phi_phi = tensor(phi, phi);
    const double t = tol.extraction;
    std::vector<ExtractionResult> out;

    {
        auto res = compare_images("state/round1", ctx.round1(ctx.psi), tensor(ctx.junk_round1, phi), t);
        res.junk = ctx.junk_round1;
        out.push_back(std::move(res));
    }
    {
        auto res = compare_images("state/round2", ctx.round2(ctx.psi), tensor(ctx.junk_round2, phi), t);
        res.junk = ctx.junk_round2;
        out.push_back(std::move(res));
    }
    const Ket image = ctx.composite(ctx.psi);
    {
        auto res = compare_images("state", image, tensor(ctx.junk, phi_phi), t);
        // Junk extracted from the image itself: contract the ancillas with ⟨φ+|⟨φ+|.
        const auto n = static_cast<Eigen::Index>(r.dims.total());
        Ket extracted(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            extracted(i) = phi_phi.dot(image.segment(i * 81, 81));
        }
        res.junk = extracted;
        out.push_back(std::move(res));

        const auto split = schmidt_split(extracted, r.dims.a * r.dims.b1, r.dims.b2 * r.dims.c);
        ExtractionResult fac;
        fac.id = "junk_factorization";
        fac.fidelity = split.leading_weight;
        fac.residual = split.residual;
        fac.norm_ratio = extracted.norm();
        fac.pass = split.residual <= t && std::abs(fac.norm_ratio - 1.0) <= t;
        out.push_back(std::move(fac));
    }

    for (std::size_t x = 0; x < kSideSettings; ++x) {
        for (std::size_t a = 0; a < kOutcomes; ++a) {
            const Ket va = ctx.on_alice(r.alice[x][a], ctx.psi);
            const Ket ta = detail::on_first_qutrit(ref.alice[x].elements[a], phi);
            for (std::size_t z = 0; z < kSideSettings; ++z) {
                for (std::size_t c = 0; c < kOutcomes; ++c) {
                    const Ket v = ctx.on_charlie(r.charlie[z][c], va);
                    const Ket tc = detail::on_second_qutrit(ref.charlie[z].elements[c], phi);
                    std::ostringstream id;
                    id << "side_measurements/a=" << a << ",x=" << x << ",c=" << c << ",z=" << z;
                    out.push_back(compare_images(id.str(), ctx.composite(v),
                                                 tensor(ctx.junk, ta, tc), t));
                }
            }
        }
    }

    for (std::size_t y = 0; y < 4; ++y) {
        const auto single = bob_single_measurement(static_cast<int>(y));
        for (std::size_t b = 0; b < kOutcomes; ++b) {
            const Ket target_anc = detail::on_second_qutrit(single.elements[b], phi);
            std::ostringstream id;
            id << "bob_marginal/round1/b1=" << b << ",y=" << y;
            out.push_back(compare_images(id.str(),
                                         ctx.round1(ctx.on_bob(ctx.block1.bob[y][b], ctx.psi)),
                                         tensor(ctx.junk_round1, target_anc), t));
        }
    }
    for (std::size_t y = 0; y < 4; ++y) {
        const auto single = bob_single_measurement(static_cast<int>(y));
        for (std::size_t b = 0; b < kOutcomes; ++b) {
            const Ket target_anc = detail::on_first_qutrit(single.elements[b], phi);
            std::ostringstream id;
            id << "bob_marginal/round2/b2=" << b << ",y=" << y;
            out.push_back(compare_images(id.str(),
                                         ctx.round2(ctx.on_bob(ctx.block2.bob[y][b], ctx.psi)),
                                         tensor(ctx.junk_round2, target_anc), t));
        }
    }

    for (std::size_t b = 0; b < kBobOutcomes; ++b) {
        const auto &e = ref.bob_domino.elements[b];
        const Ket target_anc = tensor(identity(3), e.projector, identity(3)) * phi_phi;
        std::ostringstream id;
        id << "domino/b1=" << e.b1 << ",b2=" << e.b2;
        out.push_back(compare_images(id.str(),
                                     ctx.composite(ctx.on_bob(r.bob[kDominoSetting][b], ctx.psi)),
                                     tensor(ctx.junk, target_anc), t));
    }
    return out;
}

}  // namespace nlwe
