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

#include <cmath>

#include "nlwe/realization_io.hpp"
#include "oracle.hpp"

namespace nlwe {
namespace {

TEST(Reference, ValidatesAndIsNormalized) {
    const Realization r = reference_realization();
    EXPECT_NO_THROW(r.validate());
    EXPECT_EQ(r.dims, (SiteDims{3, 3, 3, 3}));
    EXPECT_LT(correlations(r).normalization_residual(), 1e-12);
}

TEST(Reference, MatchesIndexLoopOracle) {
    const Realization r = reference_realization();
    EXPECT_LT(tensor_distance(correlations(r), testing::brute_force_correlations(r)), 1e-12);
}

TEST(Reference, RandomRealizationsMatchIndexLoopOracle) {
    for (std::uint64_t seed : {11u, 12u}) {
        const Realization r = testing::random_realization({2, 2, 3, 2}, seed);
        ASSERT_NO_THROW(r.validate());
        const auto t = correlations(r);
        EXPECT_LT(tensor_distance(t, testing::brute_force_correlations(r)), 1e-12);
        EXPECT_LT(t.normalization_residual(), 1e-12);
    }
}

TEST(Reference, FirstBobSettingJointProbability) {
    // |⟨0|⟨b|φ+⟩|² with b = cos(π/8)|0⟩ + sin(π/8)|1⟩ gives cos²(π/8)/3.
    const auto m = marginalize(correlations(reference_realization()), {Party::A, Party::B1});
    EXPECT_NEAR(m.at(0, 0, 0, {0, 0}), (2.0 + std::sqrt(2.0)) / 12.0, 1e-14);
}

TEST(Reference, TableOneEntries) {
    const auto t = correlations(reference_realization());
    EXPECT_NEAR(t.at(0, kDominoSetting, 0, 1, 0, 0, 1), 1.0 / 9.0, 1e-14);
    EXPECT_NEAR(t.at(2, kDominoSetting, 0, 1, 1, 2, 0), 1.0 / 9.0, 1e-14);
    for (const auto &p : kDominoPatterns) {
        EXPECT_NEAR(t.at(p.x, kDominoSetting, p.z, p.a, p.b1, p.b2, p.c), 1.0 / 9.0, 1e-14);
    }
}

TEST(Marginals, BobCoarseGrainingSumsToIdentity) {
    const Realization r = reference_realization();
    for (std::size_t y = 0; y < 5; ++y) {
        Matrix s1 = Matrix::Zero(9, 9), s2 = Matrix::Zero(9, 9);
        for (std::size_t b = 0; b < 3; ++b) {
            s1 += bob_marginal_b1(r, y, b);
            s2 += bob_marginal_b2(r, y, b);
        }
        EXPECT_LT((s1 - identity(9)).norm(), 1e-13);
        EXPECT_LT((s2 - identity(9)).norm(), 1e-13);
    }
    // For a product setting the b1-marginal is the single-site projector on B1.
    const auto single = bob_single_measurement(1);
    EXPECT_LT((bob_marginal_b1(r, 1, 2) - tensor(single.elements[2], identity(3))).norm(), 1e-13);
    EXPECT_LT((bob_marginal_b2(r, 1, 0) - tensor(identity(3), single.elements[0])).norm(), 1e-13);
}

TEST(Marginals, RepeatedVariableRejected) {
    const auto t = correlations(reference_realization());
    EXPECT_THROW(marginalize(t, {Party::A, Party::A}), UsageError);
    const auto m = marginalize(t, {Party::C});
    EXPECT_NEAR(m.at(1, 4, 2, {2}), 1.0 / 3.0, 1e-14);
    EXPECT_THROW(m.at(0, 0, 0, {0, 1}), UsageError);
}

TEST(Validation, CompletenessNamesTheFamily) {
    Realization r = reference_realization();
    r.alice[0][0] *= 1.0 + 1e-3;
    try {
        r.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.check, "alice[0]");
        EXPECT_NEAR(e.residual, 1e-3, 1e-12);
    }
}

TEST(Validation, PositivityAndHermiticity) {
    Realization r = reference_realization();
    r.bob[4][0] = -r.bob[4][0];
    r.bob[4][1] += 2.0 * reference_realization().bob[4][0];
    try {
        r.validate();
        FAIL();
    } catch (const ValidationError &e) {
        EXPECT_EQ(e.check, "bob[4][0]");
        EXPECT_NE(std::string(e.what()).find("positivity"), std::string::npos);
    }
    Realization h = reference_realization();
    h.charlie[1][0](0, 1) += Complex(0, 1e-3);
    EXPECT_THROW(h.validate(), ValidationError);
}

TEST(Validation, StateNormAndShape) {
    Realization r = reference_realization();
    r.state_b2c *= 1.01;
    EXPECT_THROW(r.validate(), ValidationError);
    Realization s = reference_realization();
    s.alice.pop_back();
    EXPECT_THROW(s.validate(), UsageError);
    Realization t = reference_realization();
    t.dims.a = 2;
    EXPECT_THROW(t.validate(), UsageError);
}

TEST(Equivalence, PreservesCorrelationsAndIsSeeded) {
    const Realization base = reference_realization();
    EquivalenceOptions opt;
    opt.seed = 5;
    opt.junk = {2, 1, 1, 2};
    const Realization r = randomized_equivalent(base, opt);
    EXPECT_EQ(r.dims, (SiteDims{6, 3, 3, 6}));
    EXPECT_NO_THROW(r.validate());
    EXPECT_LT(tensor_distance(correlations(r), correlations(base)), 1e-12);
    EXPECT_LT(tensor_distance(testing::brute_force_correlations(r), correlations(base)), 1e-12);
    const Realization again = randomized_equivalent(base, opt);
    EXPECT_EQ(realization_digest(r), realization_digest(again));
    opt.seed = 6;
    EXPECT_NE(realization_digest(r), realization_digest(randomized_equivalent(base, opt)));
    opt.junk = {0, 1, 1, 1};
    EXPECT_THROW(randomized_equivalent(base, opt), UsageError);
}

TEST(Io, RoundTripPreservesEverything) {
    EquivalenceOptions opt;
    opt.seed = 9;
    opt.junk = {1, 2, 1, 1};
    const Realization r = randomized_equivalent(reference_realization(), opt);
    const std::string text = serialize_realization(r).dump();
    const Realization back = parse_realization_text(text);
    EXPECT_EQ(back.dims, r.dims);
    EXPECT_EQ(serialize_realization(back).dump(), text);
    EXPECT_EQ(realization_digest(back), realization_digest(r));
    EXPECT_EQ(realization_digest(r).size(), 16u);
}

std::string parse_error_path(const std::string &text) {
    try {
        parse_realization_text(text);
    } catch (const ParseError &e) {
        return e.path;
    }
    return "<none>";
}

TEST(Io, ErrorsCarryJsonPointer) {
    auto j = serialize_realization(reference_realization());
    EXPECT_EQ(parse_error_path("{not json"), "/");

    auto missing = j;
    missing.erase("alice");
    EXPECT_EQ(parse_error_path(missing.dump()), "/alice");

    auto short_state = j;
    short_state["state_ab1"].erase(0);
    EXPECT_EQ(parse_error_path(short_state.dump()), "/state_ab1");

    auto bad_entry = j;
    bad_entry["bob"][4][3][0] = "x";
    EXPECT_EQ(parse_error_path(bad_entry.dump()), "/bob/4/3/0");

    auto bad_dims = j;
    bad_dims["dims"][2] = 0;
    EXPECT_EQ(parse_error_path(bad_dims.dump()), "/dims/2");
}

TEST(Io, ParsedRealizationIsValidated) {
    auto j = serialize_realization(reference_realization());
    j["charlie"][2][1][0] = {2.0, 0.0};
    EXPECT_THROW(parse_realization_text(j.dump()), ValidationError);
}

}  // namespace
}  // namespace nlwe
