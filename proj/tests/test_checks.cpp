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

#include "nlwe/checks.hpp"
#include "oracle.hpp"

namespace nlwe {
namespace {

const Realization &reference() {
    static const Realization r = reference_realization();
    return r;
}

double worst(const CheckResults &cs) {
    double w = 0.0;
    for (const auto &c : cs) w = std::max(w, c.residual);
    return w;
}

const CheckResult &find(const CheckResults &cs, const std::string &id) {
    for (const auto &c : cs) {
        if (c.check_id == id) return c;
    }
    throw std::out_of_range("no check " + id);
}

bool all_pass(const CheckResults &cs) {
    return std::all_of(cs.begin(), cs.end(), [](const CheckResult &c) { return c.pass; });
}

TEST(Statistics, ReferencePassesTightly) {
    const auto cs = check_statistics(correlations(reference()));
    EXPECT_EQ(cs.size(), 16u + 9u + 9u + 81u);
    EXPECT_TRUE(all_pass(cs));
    EXPECT_LT(worst(cs), 1e-12);
}

TEST(Statistics, TableOneRowValue) {
    const auto cs = check_statistics(correlations(reference()));
    const auto &c = find(cs, "statistics/table_i/x=2,z=0->1120");
    EXPECT_TRUE(c.pass);
    EXPECT_NE(c.context.find("0.111111111111"), std::string::npos);
}

TEST(Statistics, UniformNoiseOnDominoSettingFailsTableOne) {
    CorrelationTensor t = correlations(reference());
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t z = 0; z < 3; ++z)
            for (std::size_t o = 0; o < 81; ++o)
                t.at(x, kDominoSetting, z, o / 27, (o / 9) % 3, (o / 3) % 3, o % 3) = 1.0 / 81.0;
    const auto cs = check_statistics(t);
    std::size_t table_failures = 0;
    for (const auto &c : cs) {
        if (c.check_id.rfind("statistics/table_i/", 0) == 0) {
            EXPECT_FALSE(c.pass);
            EXPECT_NEAR(c.residual, 1.0 / 9.0 - 1.0 / 81.0, 1e-15);
            ++table_failures;
        }
    }
    EXPECT_EQ(table_failures, 9u);
    // Uniform noise keeps every marginal uniform.
    EXPECT_TRUE(find(cs, "statistics/domino_marginal/b1=1,b2=2").pass);
}

TEST(Parallel, ReferenceAndRotated) {
    for (Round round : {Round::First, Round::Second}) {
        const auto cs = check_parallel_relations(build_block_operators(reference(), round), reference());
        EXPECT_EQ(cs.size(), 18u);
        EXPECT_LT(worst(cs), 1e-12);
    }
    EquivalenceOptions opt;
    opt.seed = 3;
    opt.junk = {2, 2, 1, 1};
    const Realization r = randomized_equivalent(reference(), opt);
    for (Round round : {Round::First, Round::Second}) {
        const auto cs = check_parallel_relations(build_block_operators(r, round), r);
        EXPECT_TRUE(all_pass(cs));
    }
}

TEST(Parallel, RotatedAliceSettingBreaksARelation) {
    Realization r = reference();
    // Rotate Alice's second measurement by 0.1 rad in the (0, 2) plane.
    Matrix u = identity(3);
    u(0, 0) = u(2, 2) = std::cos(0.1);
    u(0, 2) = -std::sin(0.1);
    u(2, 0) = std::sin(0.1);
    for (auto &m : r.alice[1]) m = u * m * u.adjoint();
    const auto cs = check_parallel_relations(build_block_operators(r, Round::First), r);
    EXPECT_GT(worst(cs), 1e-3);
    EXPECT_FALSE(find(cs, "parallel/round1/M2|1^A=M2|0^B1").pass);
}

TEST(Sos, ReferenceBellValue) {
    const auto cs = check_sos(build_block_operators(reference(), Round::First), reference());
    EXPECT_TRUE(all_pass(cs));
    EXPECT_LT(find(cs, "sos/round1/01/bell_value").residual, 1e-12);
    EXPECT_LT(find(cs, "sos/round1/01/zz").residual, 1e-12);
    EXPECT_LT(find(cs, "sos/round1/12/identity_sum").residual, 1e-12);
}

TEST(Sos, ProductStateFallsShort) {
    Realization r = reference();
    r.state_ab1 = tensor(qutrit::ket(0), qutrit::ket(0));
    r.state_b2c = r.state_ab1;
    const auto b = build_block_operators(r, Round::First);
    const auto &c = find(check_sos(b, r), "sos/round1/01/bell_value");
    // Recover the value from the residual: the product state stays below 4√2/3.
    const Ket psi = r.network_state();
    const Ket v = apply_on(b.side_z01, apply_on(b.bob_d01 + b.bob_e01, psi, 3, 3), 1, 27) +
                  apply_on(b.side_x01, apply_on(b.bob_d01 - b.bob_e01, psi, 3, 3), 1, 27);
    const double bell = inner(psi, v).real();
    EXPECT_LT(bell, 4.0 * std::sqrt(2.0) / 3.0 - 1e-3);
    EXPECT_NEAR(c.residual, 4.0 * std::sqrt(2.0) / 3.0 - bell, 1e-12);
    EXPECT_FALSE(c.pass);
}

TEST(Anticommutation, ReferenceBothSides) {
    for (Round round : {Round::First, Round::Second}) {
        const auto cs = check_anticommutation(build_block_operators(reference(), round), reference());
        EXPECT_EQ(cs.size(), 4u);
        EXPECT_LT(worst(cs), 1e-12);
    }
}

TEST(Anticommutation, QubitPaulis) {
    Matrix x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    EXPECT_EQ((x * z + z * x).norm(), 0.0);
}

TEST(Anticommutation, ReplacingXByZFails) {
    auto b = build_block_operators(reference(), Round::First);
    b.side_x01 = b.side_z01;
    const auto &c = find(check_anticommutation(b, reference()), "anticommutation/round1/side_01");
    // {Z, Z}ψ = 2·1_{01}ψ, and ‖1_{01}ψ‖ = √(2/3).
    EXPECT_NEAR(c.residual, 2.0 * std::sqrt(2.0 / 3.0), 1e-12);
    EXPECT_GT(c.residual, 0.5);
}

TEST(Operators, InvariantsOnReferenceAndRotated) {
    EquivalenceOptions opt;
    opt.seed = 8;
    opt.junk = {1, 2, 2, 1};
    for (const Realization &r : {reference(), randomized_equivalent(reference(), opt)}) {
        for (Round round : {Round::First, Round::Second}) {
            const auto b = build_block_operators(r, round);
            const auto cs = check_operator_invariants(b, build_swap_operators(b));
            for (const auto &c : cs) EXPECT_TRUE(c.pass) << c.check_id << " " << c.residual;
        }
    }
}

TEST(Isometry, PropertiesOnReferenceAndRotated) {
    EquivalenceOptions opt;
    opt.seed = 4;
    opt.junk = {2, 1, 2, 1};
    for (const Realization &r : {reference(), randomized_equivalent(reference(), opt)}) {
        const SelfTestContext ctx(r);
        const auto cs = check_isometry_properties(ctx);
        for (const auto &c : cs) EXPECT_TRUE(c.pass) << c.check_id << " " << c.residual;
        EXPECT_LT(find(cs, "isometry/round1/deltaz/j=0,k=1").residual, 1e-9);
        EXPECT_LT(find(cs, "isometry/norm/domino/b=4").residual, 1e-9);
    }
}

TEST(Report, ReferenceVerdictPass) {
    const auto rep = compile_report(reference(), run_checks(reference()));
    EXPECT_TRUE(rep.verdict);
    EXPECT_TRUE(rep.first_failure.empty());
    EXPECT_FALSE(rep.vacuous);
    EXPECT_TRUE(std::is_sorted(rep.checks.begin(), rep.checks.end(),
                               [](const auto &a, const auto &b) { return a.check_id < b.check_id; }));
}

TEST(Report, EmptyIsVacuousPass) {
    const auto rep = compile_report(reference(), {});
    EXPECT_TRUE(rep.verdict);
    EXPECT_TRUE(rep.vacuous);
    EXPECT_EQ(report_to_json(rep)["context"], "vacuous: no checks were run");
}

TEST(Report, SingleFailureIsNamedFirst) {
    std::vector<CheckResult> cs = {make_check("b", 0.0, 1.0, ""), make_check("c", 2.0, 1.0, "bad"),
                                   make_check("a", 0.5, 1.0, "")};
    const auto rep = compile_report(reference(), cs);
    EXPECT_FALSE(rep.verdict);
    EXPECT_EQ(rep.first_failure, "c");
    EXPECT_EQ(rep.checks.front().check_id, "a");
    const auto j = report_to_json(rep);
    EXPECT_EQ(j["verdict"], "FAIL");
    EXPECT_EQ(j["first_failure"], "c");
    std::vector<std::string> keys;
    for (auto it = j["checks"][0].begin(); it != j["checks"][0].end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"check_id", "residual", "threshold", "pass", "context"}));
}

TEST(Report, BitIdenticalAcrossRuns) {
    EquivalenceOptions opt;
    opt.seed = 2;
    const Realization r = randomized_equivalent(reference(), opt);
    const auto a = report_to_json(compile_report(r, run_checks(r))).dump();
    const auto b = report_to_json(compile_report(r, run_checks(r))).dump();
    EXPECT_EQ(a, b);
}

TEST(Report, GridDominoFailsTableOne) {
    const Realization r = testing::reference_with_grid_domino();
    const auto rep = compile_report(r, run_checks(r));
    EXPECT_FALSE(rep.verdict);
    EXPECT_FALSE(find(rep.checks, "statistics/table_i/x=0,z=1->0010").pass);
    // The product-setting diagnostics do not involve the domino setting.
    for (const auto &c : rep.checks) {
        if (c.check_id.rfind("parallel/", 0) == 0 || c.check_id.rfind("sos/", 0) == 0) {
            EXPECT_TRUE(c.pass) << c.check_id;
        }
    }
}

}  // namespace
}  // namespace nlwe
