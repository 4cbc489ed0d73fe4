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


// Test-only oracles written without the library's fast paths.

#pragma once

#include <random>

#include "nlwe/locc.hpp"
#include "nlwe/realization.hpp"

namespace nlwe::testing {

/// p(a,b1,b2,c|x,y,z) = ⟨ψ|M_a ⊗ M_b ⊗ M_c|ψ⟩ by explicit index sums over
/// both copies of every site index.
inline CorrelationTensor brute_force_correlations(const Realization &r) {
    const auto [da, db1, db2, dc] = r.dims;
    const auto &s1 = r.state_ab1;
    const auto &s2 = r.state_b2c;
    CorrelationTensor t;
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 5; ++y)
            for (std::size_t z = 0; z < 3; ++z)
                for (std::size_t a = 0; a < 3; ++a)
                    for (std::size_t b = 0; b < 9; ++b)
                        for (std::size_t c = 0; c < 3; ++c) {
                            const Matrix &ma = r.alice[x][a];
                            const Matrix &mb = r.bob[y][b];
                            const Matrix &mc = r.charlie[z][c];
                            Complex acc = 0.0;
                            for (std::size_t i = 0; i < da; ++i)
                                for (std::size_t j = 0; j < db1; ++j)
                                    for (std::size_t k = 0; k < db2; ++k)
                                        for (std::size_t l = 0; l < dc; ++l) {
                                            const Complex bra = std::conj(s1(i * db1 + j) * s2(k * dc + l));
                                            if (bra == 0.0) continue;
                                            for (std::size_t i2 = 0; i2 < da; ++i2)
                                                for (std::size_t j2 = 0; j2 < db1; ++j2)
                                                    for (std::size_t k2 = 0; k2 < db2; ++k2)
                                                        for (std::size_t l2 = 0; l2 < dc; ++l2) {
                                                            acc += bra * ma(i, i2) *
                                                                   mb(j * db2 + k, j2 * db2 + k2) *
                                                                   mc(l, l2) * s1(i2 * db1 + j2) *
                                                                   s2(k2 * dc + l2);
                                                        }
                                        }
                            t.at(x, y, z, a, b / 3, b % 3, c) = acc.real();
                        }
    return t;
}

/// A valid but otherwise arbitrary realization: Haar states and random POVMs.
inline Realization random_realization(const SiteDims &d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Realization r;
    r.dims = d;
    r.state_ab1 = haar_state(d.a * d.b1, rng);
    r.state_b2c = haar_state(d.b2 * d.c, rng);
    for (int s = 0; s < 3; ++s) r.alice.push_back(random_povm(d.a, 3, rng));
    for (int s = 0; s < 5; ++s) r.bob.push_back(random_povm(d.bob(), 9, rng));
    for (int s = 0; s < 3; ++s) r.charlie.push_back(random_povm(d.c, 3, rng));
    return r;
}

/// The reference with Bob's domino setting replaced by the computational basis.
inline Realization reference_with_grid_domino() {
    Realization r = reference_realization();
    for (std::size_t b = 0; b < 9; ++b) r.bob[kDominoSetting][b] = projector(basis_ket(9, b));
    return r;
}

}  // namespace nlwe::testing
