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

// Fine-grained diagnostics evaluated on a realization's own operators.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nlwe/realization_io.hpp"
#include "nlwe/selftest.hpp"

namespace nlwe {

struct CheckResult {
    std::string check_id;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string context;
};

using CheckResults = std::vector<CheckResult>;

inline CheckResult make_check(std::string id, double residual, double threshold,
                              std::string context) {
    return {std::move(id), residual, threshold, residual <= threshold, std::move(context)};
}

inline constexpr double kStatisticsThreshold = 1e-10;
inline constexpr double kResidualThreshold = 1e-9;

namespace detail {

/// Σ p(a,b1,b2,c|x,y,z) over outcomes accepted by `keep`.
inline double sum_outcomes(const CorrelationTensor &t, std::size_t x, std::size_t y, std::size_t z,
                           const std::function<bool(std::size_t, std::size_t, std::size_t,
                                                    std::size_t)> &keep) {
    double s = 0.0;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b1 = 0; b1 < 3; ++b1)
            for (std::size_t b2 = 0; b2 < 3; ++b2)
                for (std::size_t c = 0; c < 3; ++c)
                    if (keep(a, b1, b2, c)) s += t.at(x, y, z, a, b1, b2, c);
    return s;
}

inline std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(12) << v;
    return ss.str();
}

}  // namespace detail

/// The sixteen 1/3 marginals, the nine domino patterns and the uniform
/// 1/9 marginals of the reference statistics. Settings that a marginal does
/// not mention are fixed to 0.
inline CheckResults check_statistics(const CorrelationTensor &t,
                                     double threshold = kStatisticsThreshold) {
    CheckResults out;
    auto third = [&](const std::string &id, std::size_t x, std::size_t y, auto keep) {
        const double p = detail::sum_outcomes(t, x, y, 0, keep);
        out.push_back(make_check("statistics/third/" + id, std::abs(p - 1.0 / 3.0), threshold,
                                 "value " + detail::fmt(p) + ", expected 1/3"));
    };
    for (std::size_t x : {0, 1}) {
        third("p(a=2|x=" + std::to_string(x) + ")", x, 0,
              [](auto a, auto, auto, auto) { return a == 2; });
    }
    for (std::size_t y : {0, 1}) {
        third("p(b1=2|y=" + std::to_string(y) + ")", 0, y,
              [](auto, auto b1, auto, auto) { return b1 == 2; });
    }
    for (std::size_t x : {0, 2}) {
        third("p(a=0|x=" + std::to_string(x) + ")", x, 0,
              [](auto a, auto, auto, auto) { return a == 0; });
    }
    for (std::size_t y : {2, 3}) {
        third("p(b1=0|y=" + std::to_string(y) + ")", 0, y,
              [](auto, auto b1, auto, auto) { return b1 == 0; });
    }
    for (std::size_t y : {0, 1}) {
        for (std::size_t x : {0, 1}) {
            third("p(a=2,b1=2|x=" + std::to_string(x) + ",y=" + std::to_string(y) + ")", x, y,
                  [](auto a, auto b1, auto, auto) { return a == 2 && b1 == 2; });
        }
    }
    for (std::size_t y : {2, 3}) {
        for (std::size_t x : {0, 2}) {
            third("p(a=0,b1=0|x=" + std::to_string(x) + ",y=" + std::to_string(y) + ")", x, y,
                  [](auto a, auto b1, auto, auto) { return a == 0 && b1 == 0; });
        }
    }

    for (const auto &p : kDominoPatterns) {
        const double v = t.at(p.x, kDominoSetting, p.z, p.a, p.b1, p.b2, p.c);
        std::ostringstream id;
        id << "statistics/table_i/x=" << p.x << ",z=" << p.z << "->" << p.a << p.b1 << p.b2
           << p.c;
        out.push_back(make_check(id.str(), std::abs(v - 1.0 / 9.0), threshold,
                                 "p(a,b1,b2,c|x,diamond,z) = " + detail::fmt(v) +
                                     ", expected 1/9"));
    }

    for (std::size_t b1 = 0; b1 < 3; ++b1) {
        for (std::size_t b2 = 0; b2 < 3; ++b2) {
            const double v = detail::sum_outcomes(t, 0, kDominoSetting, 0, [&](auto, auto u, auto w, auto) {
                return u == b1 && w == b2;
            });
            out.push_back(make_check(
                "statistics/domino_marginal/b1=" + std::to_string(b1) + ",b2=" + std::to_string(b2),
                std::abs(v - 1.0 / 9.0), threshold, "value " + detail::fmt(v) + ", expected 1/9"));
        }
    }

    for (std::size_t x = 0; x < 3; ++x) {
        for (std::size_t z = 0; z < 3; ++z) {
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t c = 0; c < 3; ++c) {
                    const double v = detail::sum_outcomes(
                        t, x, kDominoSetting, z,
                        [&](auto u, auto, auto, auto w) { return u == a && w == c; });
                    std::ostringstream id;
                    id << "statistics/side_marginal/a=" << a << ",c=" << c << "|x=" << x
                       << ",z=" << z;
                    out.push_back(make_check(id.str(), std::abs(v - 1.0 / 9.0), threshold,
                                             "value " + detail::fmt(v) + ", expected 1/9"));
                }
            }
        }
    }
    return out;
}

namespace detail {

inline std::string round_tag(Round r) { return r == Round::First ? "round1" : "round2"; }

/// Applies side-party (A or C) and Bob (B1B2) operators for a given round.
struct RoundView {
    const Realization &r;
    Round round;
    Ket psi;

    RoundView(const Realization &real, Round rd) : r(real), round(rd), psi(real.network_state()) {}

    Ket side(const Matrix &m, const Ket &v) const {
        const auto &d = r.dims;
        return round == Round::First ? apply_on(m, v, 1, d.bob() * d.c)
                                     : apply_on(m, v, d.a * d.bob(), 1);
    }
    Ket bob(const Matrix &m, const Ket &v) const { return apply_on(m, v, r.dims.a, r.dims.c); }
    Ket side(const Matrix &m) const { return side(m, psi); }
    Ket bob(const Matrix &m) const { return bob(m, psi); }
};

}  // namespace detail

/// Parallel-vector relations between side-party and coarse-grained Bob
/// projectors, the block-identity consistency relations and their norms.
inline CheckResults check_parallel_relations(const BlockOperators &b, const Realization &r,
                                             double threshold = kResidualThreshold) {
    const detail::RoundView v(r, b.round);
    const std::string tag = "parallel/" + detail::round_tag(b.round) + "/";
    const char *side = b.round == Round::First ? "A" : "C";
    const char *bob = b.round == Round::First ? "B1" : "B2";
    CheckResults out;

    struct Pair {
        std::size_t j, x, k, y;
    };
    const Pair pairs[] = {{2, 0, 2, 0}, {2, 0, 2, 1}, {2, 1, 2, 0}, {2, 1, 2, 1},
                          {0, 0, 0, 2}, {0, 0, 0, 3}, {0, 2, 0, 2}, {0, 2, 0, 3}};
    for (const auto &p : pairs) {
        const double res = (v.side(b.side[p.x][p.j]) - v.bob(b.bob[p.y][p.k])).norm();
        std::ostringstream id, ctx;
        id << tag << "M" << p.j << "|" << p.x << "^" << side << "=M" << p.k << "|" << p.y << "^"
           << bob;
        ctx << "||(M_{" << p.j << "|" << p.x << "} (x) 1 - 1 (x) M_{" << p.k << "|" << p.y
            << "})psi||";
        out.push_back(make_check(id.str(), res, threshold, ctx.str()));
    }

    struct Block {
        const char *name;
        const Matrix &z, &d, &e, &x, &range;
    };
    const Block blocks[] = {
        {"01", b.side_id01_z, b.bob_id01_d, b.bob_id01_e, b.side_id01_x, b.bob_id01},
        {"12", b.side_id12_z, b.bob_id12_d, b.bob_id12_e, b.side_id12_x, b.bob_id12},
    };
    for (const auto &blk : blocks) {
        const Ket ref = v.side(blk.z);
        const std::string base = tag + "psi_" + blk.name;
        out.push_back(make_check(base + "/D", (ref - v.bob(blk.d)).norm(), threshold,
                                 "1_Z on the side party vs 1_D on Bob"));
        out.push_back(make_check(base + "/E", (ref - v.bob(blk.e)).norm(), threshold,
                                 "1_Z on the side party vs 1_E on Bob"));
        out.push_back(make_check(base + "/X", (ref - v.side(blk.x)).norm(), threshold,
                                 "1_Z vs 1_X on the side party"));
        out.push_back(make_check(base + "/range", (ref - v.bob(blk.range)).norm(), threshold,
                                 "1_Z on the side party vs Bob's block range projector"));
        const double n = ref.norm();
        out.push_back(make_check(base + "/norm", std::abs(n - std::sqrt(2.0 / 3.0)), threshold,
                                 "norm " + detail::fmt(n) + ", expected sqrt(2/3)"));
    }
    return out;
}

/// Bell value, identity sum, the squared-term vectors and the SOS identity,
/// for both blocks.
inline CheckResults check_sos(const BlockOperators &b, const Realization &r,
                              double threshold = kResidualThreshold) {
    const detail::RoundView v(r, b.round);
    const std::string tag = "sos/" + detail::round_tag(b.round) + "/";
    CheckResults out;
    const double r2 = std::sqrt(2.0);

    struct Block {
        const char *name;
        const Matrix &z, &x, &d, &e, &id_z, &id_x, &id_d, &id_e, &z_hat, &x_hat;
    };
    const Block blocks[] = {
        {"01", b.side_z01, b.side_x01, b.bob_d01, b.bob_e01, b.side_id01_z, b.side_id01_x,
         b.bob_id01_d, b.bob_id01_e, b.bob_z01_hat, b.bob_x01_hat},
        {"12", b.side_z12, b.side_x12, b.bob_d12, b.bob_e12, b.side_id12_z, b.side_id12_x,
         b.bob_id12_d, b.bob_id12_e, b.bob_z12_hat, b.bob_x12_hat},
    };
    for (const auto &blk : blocks) {
        const std::string base = tag + blk.name;
        const Matrix sum_de = blk.d + blk.e;
        const Matrix diff_de = blk.d - blk.e;
        const Ket bell_vec = v.side(blk.z, v.bob(sum_de)) + v.side(blk.x, v.bob(diff_de));
        const double bell = inner(v.psi, bell_vec).real();
        out.push_back(make_check(base + "/bell_value", std::abs(bell - 4.0 * r2 / 3.0), threshold,
                                 "value " + detail::fmt(bell) + ", expected (2/3)*2*sqrt(2)"));

        const Ket id_vec = v.side(blk.id_z) + v.side(blk.id_x) + v.bob(blk.id_d) + v.bob(blk.id_e);
        const double ids = inner(v.psi, id_vec).real();
        out.push_back(make_check(base + "/identity_sum", std::abs(ids - 8.0 / 3.0), threshold,
                                 "value " + detail::fmt(ids) + ", expected 8/3"));

        const Ket tz = v.side(blk.z) - v.bob(blk.z_hat);
        const Ket tx = v.side(blk.x) - v.bob(blk.x_hat);
        out.push_back(make_check(base + "/zz", tz.norm(), threshold, "||(Z^side - Zhat^B)psi||"));
        out.push_back(make_check(base + "/xx", tx.norm(), threshold, "||(X^side - Xhat^B)psi||"));

        // ⟨ψ|shifted Bell operator|ψ⟩ against ⟨ψ|sum of squares|ψ⟩.
        const double lhs = ids - r2 * bell;
        const double rhs = tz.squaredNorm() + tx.squaredNorm();
        out.push_back(make_check(base + "/identity", std::abs(lhs - rhs), threshold,
                                 "shifted Bell " + detail::fmt(lhs) + " vs squares " +
                                     detail::fmt(rhs)));
    }
    return out;
}

inline CheckResults check_anticommutation(const BlockOperators &b, const Realization &r,
                                          double threshold = kResidualThreshold) {
    const detail::RoundView v(r, b.round);
    const std::string tag = "anticommutation/" + detail::round_tag(b.round) + "/";
    CheckResults out;
    auto side = [&](const char *name, const Matrix &x, const Matrix &z) {
        const Ket w = v.side(x * z + z * x);
        out.push_back(make_check(tag + "side_" + name, w.norm(), threshold, "||{X,Z}psi|| on the side party"));
    };
    auto bob = [&](const char *name, const Matrix &x, const Matrix &z) {
        const Ket w = v.bob(x * z + z * x);
        out.push_back(make_check(tag + "bob_hat_" + name, w.norm(), threshold, "||{Xhat,Zhat}psi|| on Bob"));
    };
    side("01", b.side_x01, b.side_z01);
    side("12", b.side_x12, b.side_z12);
    bob("01", b.bob_x01_hat, b.bob_z01_hat);
    bob("12", b.bob_x12_hat, b.bob_z12_hat);
    return out;
}

namespace detail {

inline double op_norm(const Matrix &m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace detail

/// Operator-level invariants of the block and swap operators.
inline CheckResults check_operator_invariants(const BlockOperators &b, const SwapOperators &s,
                                              double threshold = kResidualThreshold) {
    const std::string tag = "operators/" + detail::round_tag(b.round) + "/";
    CheckResults out;
    auto add = [&](const std::string &id, double res, const std::string &ctx) {
        out.push_back(make_check(tag + id, res, threshold, ctx));
    };
    auto unitary_defect = [](const Matrix &u) {
        return detail::op_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
    };

    const std::pair<const char *, const Matrix *> regs[] = {{"z01", &b.bob_z01_unitary},
                                                            {"x01", &b.bob_x01_unitary},
                                                            {"z12", &b.bob_z12_unitary},
                                                            {"x12", &b.bob_x12_unitary}};
    for (const auto &[name, m] : regs) {
        add(std::string("regularized_") + name,
            std::max(unitary_defect(*m), detail::op_norm(*m - m->adjoint())),
            "Hermitian unitary defect");
    }
    add("hat_anticommutator_01",
        detail::op_norm(b.bob_z01_hat * b.bob_x01_hat + b.bob_x01_hat * b.bob_z01_hat),
        "operator norm of {Zhat,Xhat}");
    add("hat_anticommutator_12",
        detail::op_norm(b.bob_z12_hat * b.bob_x12_hat + b.bob_x12_hat * b.bob_z12_hat),
        "operator norm of {Zhat,Xhat}");
    const Matrix psum = b.bob_p[0] + b.bob_p[1] + b.bob_p[2];
    add("p_sum", detail::op_norm(psum - support_projector(b.bob_id01 + b.bob_id12)),
        "P0+P1+P2 vs projector onto the union of block ranges");

    for (const auto &[name, u] : {std::pair{"side_x1", &s.side_x1}, std::pair{"side_x2", &s.side_x2},
                                  std::pair{"bob_x1", &s.bob_x1}, std::pair{"bob_x2", &s.bob_x2}}) {
        add(std::string("unitary_") + name, unitary_defect(*u), "||U^dag U - 1||");
    }
    const Matrix z3 = s.side_z * s.side_z * s.side_z;
    add("side_z_cubed", detail::op_norm(z3 - Matrix::Identity(z3.rows(), z3.cols())),
        "(Z^side)^3 - 1");
    // Bob's Z^B is an order-3 unitary on the span of the block ranges.
    const Matrix span = support_projector(b.bob_id01 + b.bob_id12);
    const Matrix zb3 = s.bob_z * s.bob_z * s.bob_z;
    add("bob_z_cubed", detail::op_norm(zb3 - span), "(Z^B)^3 - projector onto the used span");

    double inversion = 0.0;
    const Complex w = omega();
    for (std::size_t j = 0; j < 3; ++j) {
        Matrix acc = Matrix::Zero(s.side_z.rows(), s.side_z.cols());
        Matrix zk = Matrix::Identity(s.side_z.rows(), s.side_z.cols());
        for (int k = 0; k < 3; ++k) {
            acc += std::pow(std::conj(w), static_cast<int>(j) * k) * zk;
            zk = zk * s.side_z;
        }
        inversion = std::max(inversion, detail::op_norm(acc / 3.0 - b.side[0][j]));
    }
    add("z_inversion", inversion, "M_{j|0} vs (1/3) sum_k w^{-jk} Z^k");

    double fourier = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        Ket expected(3);
        for (int k = 0; k < 3; ++k) expected(k) = std::pow(w, static_cast<int>(j) * k) / std::sqrt(3.0);
        fourier = std::max(fourier, (s.fourier * qutrit::ket(static_cast<int>(j)) - expected).norm());
    }
    add("fourier", fourier, "F|j> vs (1/sqrt3) sum_k w^{jk}|k>");
    return out;
}

/// Properties the isometry relies on: δ-selection, norm facts, norm
/// preservation of both rounds and the junk factorization.
inline CheckResults check_isometry_properties(const SelfTestContext &ctx,
                                              double threshold = kResidualThreshold) {
    const Realization &r = *ctx.realization;
    CheckResults out;

    for (Round round : {Round::First, Round::Second}) {
        const detail::RoundView v(r, round);
        const auto &b = round == Round::First ? ctx.block1 : ctx.block2;
        const std::string tag = "isometry/" + detail::round_tag(round) + "/";
        for (std::size_t j = 0; j < 3; ++j) {
            const Ket mj = v.side(b.side[0][j]);
            for (std::size_t k = 0; k < 3; ++k) {
                const Ket w = v.side(b.side[0][j], v.bob(b.bob_p[k]));
                const double res = j == k ? (w - mj).norm() : w.norm();
                out.push_back(make_check(
                    tag + "deltaz/j=" + std::to_string(j) + ",k=" + std::to_string(k), res,
                    threshold, j == k ? "||M_j (x) P_j psi - M_j psi||" : "||M_j (x) P_k psi||"));
            }
        }
    }

    for (std::size_t x = 0; x < 3; ++x) {
        for (std::size_t a = 0; a < 3; ++a) {
            const std::string sfx = "/a=" + std::to_string(a) + ",x=" + std::to_string(x);
            const double na = ctx.on_alice(r.alice[x][a], ctx.psi).norm();
            const double nc = ctx.on_charlie(r.charlie[x][a], ctx.psi).norm();
            out.push_back(make_check("isometry/norm/alice" + sfx, std::abs(na - 1.0 / std::sqrt(3.0)),
                                     threshold, "norm " + detail::fmt(na) + ", expected 1/sqrt3"));
            out.push_back(make_check("isometry/norm/charlie" + sfx,
                                     std::abs(nc - 1.0 / std::sqrt(3.0)), threshold,
                                     "norm " + detail::fmt(nc) + ", expected 1/sqrt3"));
        }
    }
    for (std::size_t b = 0; b < kBobOutcomes; ++b) {
        const double n = ctx.on_bob(r.bob[kDominoSetting][b], ctx.psi).norm();
        out.push_back(make_check("isometry/norm/domino/b=" + std::to_string(b),
                                 std::abs(n - 1.0 / 3.0), threshold,
                                 "norm " + detail::fmt(n) + ", expected 1/3"));
    }

    std::vector<std::pair<std::string, Ket>> span;
    span.emplace_back("psi", ctx.psi);
    for (std::size_t x = 0; x < 3; ++x) {
        for (std::size_t a = 0; a < 3; ++a) {
            const std::string sfx = "a=" + std::to_string(a) + ",x=" + std::to_string(x);
            span.emplace_back("alice/" + sfx, ctx.on_alice(r.alice[x][a], ctx.psi));
            span.emplace_back("charlie/" + sfx, ctx.on_charlie(r.charlie[x][a], ctx.psi));
        }
    }
    for (std::size_t b = 0; b < kBobOutcomes; ++b) {
        span.emplace_back("domino/b=" + std::to_string(b), ctx.on_bob(r.bob[kDominoSetting][b], ctx.psi));
    }
    for (const auto &[name, vec] : span) {
        const double n = vec.norm();
        const double n1 = ctx.round1(vec).norm();
        const double n2 = ctx.round2(vec).norm();
        auto ratio = [n](double m) { return n == 0.0 ? (m == 0.0 ? 0.0 : INFINITY) : std::abs(m / n - 1.0); };
        out.push_back(make_check("isometry/round1/norm_preservation/" + name, ratio(n1), threshold,
                                 "|(||L v|| / ||v||) - 1|"));
        out.push_back(make_check("isometry/round2/norm_preservation/" + name, ratio(n2), threshold,
                                 "|(||L v|| / ||v||) - 1|"));
    }

    const auto split = schmidt_split(ctx.junk, r.dims.a * r.dims.b1, r.dims.b2 * r.dims.c);
    out.push_back(make_check("isometry/junk_factorization", split.residual, threshold,
                             "Schmidt tail across (AB1)|(B2C), leading weight " +
                                 detail::fmt(split.leading_weight)));
    return out;
}

struct SelfTestReport {
    std::string digest;
    std::vector<CheckResult> checks;
    std::vector<ExtractionResult> extractions;
    bool verdict = true;
    bool vacuous = false;
    std::string first_failure;  // empty on PASS
};

/// Sorts checks by id and folds the verdict. Extraction results keep the
/// engine's order, which is already deterministic.
inline SelfTestReport compile_report(const Realization &r, std::vector<CheckResult> checks,
                                     std::vector<ExtractionResult> extractions = {}) {
    SelfTestReport rep;
    rep.digest = realization_digest(r);
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckResult &a, const CheckResult &b) { return a.check_id < b.check_id; });
    rep.checks = std::move(checks);
    rep.extractions = std::move(extractions);
    rep.vacuous = rep.checks.empty() && rep.extractions.empty();
    for (const auto &c : rep.checks) {
        if (!c.pass && rep.first_failure.empty()) rep.first_failure = c.check_id;
        rep.verdict = rep.verdict && c.pass;
    }
    for (const auto &e : rep.extractions) {
        if (!e.pass && rep.first_failure.empty()) rep.first_failure = e.id;
        rep.verdict = rep.verdict && e.pass;
    }
    return rep;
}

/// Every operator-level check on both rounds, plus the statistics.
inline std::vector<CheckResult> run_checks(const Realization &r, const Tolerances &tol = {}) {
    std::vector<CheckResult> all = check_statistics(correlations(r), tol.stats);
    const SelfTestContext ctx(r);
    for (const BlockOperators *b : {&ctx.block1, &ctx.block2}) {
        const SwapOperators &s = b->round == Round::First ? ctx.swap1 : ctx.swap2;
        for (auto &&group : {check_parallel_relations(*b, r, tol.residual), check_sos(*b, r, tol.residual),
                             check_anticommutation(*b, r, tol.residual),
                             check_operator_invariants(*b, s, tol.residual)}) {
            all.insert(all.end(), group.begin(), group.end());
        }
    }
    auto iso = check_isometry_properties(ctx, tol.residual);
    all.insert(all.end(), iso.begin(), iso.end());
    return all;
}

inline io::OrderedJson check_to_json(const CheckResult &c) {
    io::OrderedJson j;
    j["check_id"] = c.check_id;
    j["residual"] = c.residual;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    j["context"] = c.context;
    return j;
}

inline io::OrderedJson extraction_to_json(const ExtractionResult &e) {
    io::OrderedJson j;
    j["id"] = e.id;
    j["fidelity"] = e.fidelity;
    j["residual"] = e.residual;
    j["norm_ratio"] = e.norm_ratio;
    j["pass"] = e.pass;
    if (e.junk.size() > 0) j["junk_norm"] = e.junk.norm();
    return j;
}

inline io::OrderedJson report_to_json(const SelfTestReport &rep) {
    io::OrderedJson j;
    j["digest"] = rep.digest;
    j["verdict"] = rep.verdict ? "PASS" : "FAIL";
    j["context"] = rep.vacuous ? "vacuous: no checks were run" : "";
    j["first_failure"] = rep.first_failure.empty() ? io::OrderedJson() : io::OrderedJson(rep.first_failure);
    j["checks"] = io::OrderedJson::array();
    for (const auto &c : rep.checks) j["checks"].push_back(check_to_json(c));
    j["extractions"] = io::OrderedJson::array();
    for (const auto &e : rep.extractions) j["extractions"].push_back(extraction_to_json(e));
    return j;
}

}  // namespace nlwe
