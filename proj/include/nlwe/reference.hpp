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

// The ideal bilocality experiment: two maximally entangled qutrit pairs,
// three ternary measurements for each side party, four product
// measurements for Bob and the nine-outcome domino measurement.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "nlwe/linalg.hpp"

namespace nlwe {

inline constexpr std::size_t kQutrit = 3;
inline constexpr std::size_t kSideSettings = 3;
inline constexpr std::size_t kBobSettings = 5;  // 0..3 product, 4 = domino
inline constexpr std::size_t kDominoSetting = 4;
inline constexpr std::size_t kOutcomes = 3;
inline constexpr std::size_t kBobOutcomes = 9;  // index 3*b1 + b2

struct ProjectiveMeasurement {
    int setting = 0;
    std::vector<Matrix> elements;  // indexed by outcome
};

struct DominoElement {
    int b1 = 0;
    int b2 = 0;
    Ket first;   // factor on B1
    Ket second;  // factor on B2
    Matrix projector;
};

struct DominoMeasurement {
    std::array<DominoElement, kBobOutcomes> elements;  // index 3*b1 + b2
};

struct ReferenceExperiment {
    Ket state_ab1;
    Ket state_b2c;
    std::array<ProjectiveMeasurement, kSideSettings> alice;
    std::array<ProjectiveMeasurement, kSideSettings> charlie;
    std::array<ProjectiveMeasurement, 4> bob_product;
    DominoMeasurement bob_domino;
};

/// (|00⟩ + |11⟩ + ... + |d-1,d-1⟩)/√d
inline Ket max_entangled(std::size_t d) {
    if (d < 2) {
        throw UsageError("max_entangled: dimension must be at least 2");
    }
    Ket v = Ket::Zero(static_cast<Eigen::Index>(d * d));
    for (std::size_t i = 0; i < d; ++i) {
        v(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return v;
}

namespace qutrit {

inline Ket ket(int i) { return basis_ket(kQutrit, static_cast<std::size_t>(i)); }

/// (|j⟩ ± |k⟩)/√2
inline Ket plus(int j, int k) { return (ket(j) + ket(k)) / std::sqrt(2.0); }
inline Ket minus(int j, int k) { return (ket(j) - ket(k)) / std::sqrt(2.0); }

/// cos θ|j⟩ + sin θ|k⟩
inline Ket rotated(int j, int k, double theta) {
    return std::cos(theta) * ket(j) + std::sin(theta) * ket(k);
}

// Block Pauli operators on span{|j⟩,|k⟩}, zero on the spectator level.
inline Matrix z_block(int j, int k) { return projector(ket(j)) - projector(ket(k)); }
inline Matrix x_block(int j, int k) {
    return ket(j) * ket(k).adjoint() + ket(k) * ket(j).adjoint();
}

}  // namespace qutrit

/// Alice's (and Charlie's) three measurements: computational, |±⟩₀₁ with |2⟩, |0⟩ with |±⟩₁₂.
inline std::array<ProjectiveMeasurement, kSideSettings> alice_charlie_measurements() {
    using namespace qutrit;
    return {{
        {0, {projector(ket(0)), projector(ket(1)), projector(ket(2))}},
        {1, {projector(plus(0, 1)), projector(minus(0, 1)), projector(ket(2))}},
        {2, {projector(ket(0)), projector(plus(1, 2)), projector(minus(1, 2))}},
    }};
}

/// Single-subsystem kets of Bob's y-th product measurement, by outcome.
///
/// Outcome labels follow the operator differences D = M₀ − M₁ (y = 0, 1) and
/// D = M₁ − M₂ (y = 2, 3): the +1 block eigenvector is the first label of the
/// pair, the −1 eigenvector the second, and the spectator level takes the
/// remaining label. The 3×3 matrices themselves have a degenerate +1
/// eigenspace, so the labels cannot be read off a numerical eigensolver.
inline std::array<Ket, kOutcomes> bob_single_kets(int y) {
    using namespace qutrit;
    const double t = std::numbers::pi / 8.0;
    const double c = std::cos(t);
    const double s = std::sin(t);
    switch (y) {
        case 0:  // (Z₀₁ + X₀₁)/√2
            return {c * ket(0) + s * ket(1), s * ket(0) - c * ket(1), ket(2)};
        case 1:  // (Z₀₁ − X₀₁)/√2
            return {c * ket(0) - s * ket(1), s * ket(0) + c * ket(1), ket(2)};
        case 2:  // (Z₁₂ + X₁₂)/√2
            return {ket(0), c * ket(1) + s * ket(2), s * ket(1) - c * ket(2)};
        case 3:  // (Z₁₂ − X₁₂)/√2
            return {ket(0), c * ket(1) - s * ket(2), s * ket(1) + c * ket(2)};
        default:
            throw UsageError("bob_single_kets: product setting must be in 0..3");
    }
}

/// The operator whose block eigenvectors define product setting y.
inline Matrix bob_setting_observable(int y) {
    using namespace qutrit;
    const double r = 1.0 / std::sqrt(2.0);
    switch (y) {
        case 0: return r * (z_block(0, 1) + x_block(0, 1));
        case 1: return r * (z_block(0, 1) - x_block(0, 1));
        case 2: return r * (z_block(1, 2) + x_block(1, 2));
        case 3: return r * (z_block(1, 2) - x_block(1, 2));
        default: throw UsageError("bob_setting_observable: product setting must be in 0..3");
    }
}

inline ProjectiveMeasurement bob_single_measurement(int y) {
    ProjectiveMeasurement m{y, {}};
    for (const Ket &k : bob_single_kets(y)) {
        m.elements.push_back(projector(k));
    }
    return m;
}

/// Bob's four product measurements M_{b1,b2|y} = M_{b1|y} ⊗ M_{b2|y}, outcome index 3*b1 + b2.
inline std::array<ProjectiveMeasurement, 4> bob_product_measurements() {
    std::array<ProjectiveMeasurement, 4> out;
    for (int y = 0; y < 4; ++y) {
        const auto single = bob_single_measurement(y);
        out[static_cast<std::size_t>(y)].setting = y;
        for (std::size_t b1 = 0; b1 < kOutcomes; ++b1) {
            for (std::size_t b2 = 0; b2 < kOutcomes; ++b2) {
                out[static_cast<std::size_t>(y)].elements.push_back(
                    tensor(single.elements[b1], single.elements[b2]));
            }
        }
    }
    return out;
}

/// The nine-state domino product basis.
inline DominoMeasurement domino_measurement() {
    using namespace qutrit;
    const std::array<std::pair<Ket, Ket>, kBobOutcomes> factors = {{
        {ket(1), ket(1)},          // (0,0)
        {ket(0), plus(0, 1)},      // (0,1)
        {ket(0), minus(0, 1)},     // (0,2)
        {ket(2), plus(1, 2)},      // (1,0)
        {ket(2), minus(1, 2)},     // (1,1)
        {plus(1, 2), ket(0)},      // (1,2)
        {minus(1, 2), ket(0)},     // (2,0)
        {plus(0, 1), ket(2)},      // (2,1)
        {minus(0, 1), ket(2)},     // (2,2)
    }};
    DominoMeasurement m;
    for (std::size_t i = 0; i < kBobOutcomes; ++i) {
        auto &e = m.elements[i];
        e.b1 = static_cast<int>(i / 3);
        e.b2 = static_cast<int>(i % 3);
        e.first = factors[i].first;
        e.second = factors[i].second;
        e.projector = tensor(projector(e.first), projector(e.second));
    }
    return m;
}

/// For Bob's domino setting, input pairs (x, z) whose matching output
/// (a, b1, b2, c) occurs with probability 1/9 in the reference statistics.
struct DominoPattern {
    std::size_t x, z, a, b1, b2, c;
};

inline constexpr std::array<DominoPattern, 9> kDominoPatterns = {{
    {0, 0, 1, 0, 0, 1},
    {0, 1, 0, 0, 1, 0},
    {0, 1, 0, 0, 2, 1},
    {0, 2, 2, 1, 0, 1},
    {0, 2, 2, 1, 1, 2},
    {2, 0, 1, 1, 2, 0},
    {2, 0, 2, 2, 0, 0},
    {1, 0, 0, 2, 1, 2},
    {1, 0, 1, 2, 2, 2},
}};

inline ReferenceExperiment assemble_reference() {
    ReferenceExperiment ref;
    ref.state_ab1 = max_entangled(kQutrit);
    ref.state_b2c = max_entangled(kQutrit);
    ref.alice = alice_charlie_measurements();
    ref.charlie = alice_charlie_measurements();
    ref.bob_product = bob_product_measurements();
    ref.bob_domino = domino_measurement();
    return ref;
}

}  // namespace nlwe
