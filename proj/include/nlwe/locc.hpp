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

// Discrimination of bipartite product ensembles: the global optimum and a
// seesaw over one-way LOCC protocols (first party measures, announces m, the
// second party measures with a POVM chosen by m and guesses).
//
// Only one-way protocols are searched. A gap found here is evidence about that
// class alone and says nothing about general LOCC.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlwe/parallel.hpp"
#include "nlwe/realization_io.hpp"

namespace nlwe {

inline constexpr double kPriorTolerance = 1e-12;
inline constexpr double kEnsembleNormTolerance = 1e-10;
inline constexpr double kPovmTolerance = 1e-9;
inline constexpr double kOrthogonalityTolerance = 1e-10;

struct ProductState {
    Ket first;
    Ket second;
};

struct DiscriminationInstance {
    std::vector<double> priors;
    std::vector<ProductState> states;

    std::size_t size() const { return states.size(); }
    std::size_t first_dim() const { return states.empty() ? 0 : static_cast<std::size_t>(states[0].first.size()); }
    std::size_t second_dim() const { return states.empty() ? 0 : static_cast<std::size_t>(states[0].second.size()); }
    std::vector<Ket> joint_states() const {
        std::vector<Ket> out;
        for (const auto &s : states) out.push_back(tensor(s.first, s.second));
        return out;
    }

    void validate() const {
        if (states.empty()) throw ValidationError("ensemble", "ensemble is empty", 0.0);
        if (priors.size() != states.size()) {
            throw ValidationError("ensemble/priors", "expected one prior per state", 0.0);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < priors.size(); ++i) {
            if (!(priors[i] >= 0.0)) {
                throw ValidationError("ensemble/priors/" + std::to_string(i), "prior is negative", priors[i]);
            }
            total += priors[i];
        }
        if (std::abs(total - 1.0) > kPriorTolerance) {
            throw ValidationError("ensemble/priors", "priors sum to " + std::to_string(total),
                                  std::abs(total - 1.0));
        }
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto &s = states[i];
            if (static_cast<std::size_t>(s.first.size()) != first_dim() ||
                static_cast<std::size_t>(s.second.size()) != second_dim() || first_dim() == 0 ||
                second_dim() == 0) {
                throw ValidationError("ensemble/states/" + std::to_string(i), "inconsistent dimensions", 0.0);
            }
            const double dev = std::max(std::abs(s.first.norm() - 1.0), std::abs(s.second.norm() - 1.0));
            if (dev > kEnsembleNormTolerance) {
                throw ValidationError("ensemble/states/" + std::to_string(i), "factor not normalized", dev);
            }
        }
    }
};

inline DiscriminationInstance uniform_instance(std::vector<ProductState> states) {
    DiscriminationInstance inst;
    inst.priors.assign(states.size(), 1.0 / static_cast<double>(states.size()));
    inst.states = std::move(states);
    return inst;
}

inline DiscriminationInstance domino_instance() {
    std::vector<ProductState> states;
    for (const auto &e : domino_measurement().elements) states.push_back({e.first, e.second});
    return uniform_instance(std::move(states));
}

/// |i⟩|j⟩ for i, j < 3.
inline DiscriminationInstance product_grid_instance() {
    std::vector<ProductState> states;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) states.push_back({qutrit::ket(i), qutrit::ket(j)});
    return uniform_instance(std::move(states));
}

struct OneWayProtocol {
    std::vector<Matrix> first;                      // A_m
    std::vector<std::vector<Matrix>> second;        // B_{r|m}
    std::vector<std::vector<std::size_t>> guess;    // g(m, r)

    void validate(double tol = kPovmTolerance) const {
        auto check_povm = [tol](const std::vector<Matrix> &povm, const std::string &tag) {
            if (povm.empty()) throw ValidationError(tag, "POVM has no elements", 0.0);
            const auto d = povm[0].rows();
            Matrix sum = Matrix::Zero(d, d);
            for (std::size_t k = 0; k < povm.size(); ++k) {
                const auto eig = hermitian_eig(povm[k], tol);
                if (eig.values.back() < -tol) {
                    throw ValidationError(tag + "/" + std::to_string(k), "element not positive",
                                          -eig.values.back());
                }
                sum += povm[k];
            }
            const double res = (sum - Matrix::Identity(d, d)).norm();
            if (res > tol) throw ValidationError(tag, "POVM incomplete", res);
        };
        check_povm(first, "first");
        if (second.size() != first.size() || guess.size() != first.size()) {
            throw ValidationError("second", "one second-stage POVM and guess list per first outcome", 0.0);
        }
        for (std::size_t m = 0; m < second.size(); ++m) {
            check_povm(second[m], "second/" + std::to_string(m));
            if (guess[m].size() != second[m].size()) {
                throw ValidationError("guess/" + std::to_string(m), "one guess per second outcome", 0.0);
            }
        }
    }
};

namespace detail {

inline double expectation(const Matrix &m, const Ket &v) { return inner(v, m * v).real(); }

}  // namespace detail

inline double success_probability(const OneWayProtocol &p, const DiscriminationInstance &inst) {
    if (p.second.size() != p.first.size() || p.guess.size() != p.first.size()) {
        throw UsageError("success_probability: protocol stages have inconsistent sizes");
    }
    double total = 0.0;
    for (std::size_t m = 0; m < p.first.size(); ++m) {
        if (static_cast<std::size_t>(p.first[m].rows()) != inst.first_dim()) {
            throw UsageError("success_probability: first POVM dimension does not match the ensemble");
        }
        if (p.guess[m].size() != p.second[m].size()) {
            throw UsageError("success_probability: guess map size mismatch");
        }
        for (std::size_t r = 0; r < p.second[m].size(); ++r) {
            if (static_cast<std::size_t>(p.second[m][r].rows()) != inst.second_dim()) {
                throw UsageError("success_probability: second POVM dimension does not match the ensemble");
            }
            const std::size_t i = p.guess[m][r];
            if (i >= inst.size()) throw UsageError("success_probability: guess out of range");
            const auto &s = inst.states[i];
            total += inst.priors[i] * detail::expectation(p.first[m], s.first) *
                     detail::expectation(p.second[m][r], s.second);
        }
    }
    return total;
}

/// Maximizes Σ_k Tr[Π_k Q_k] over POVMs {Π_k} with the fixed-point iteration
/// Π_k ← R^{-1/2} Q_k Π_k Q_k R^{-1/2}, R = Σ_k Q_k Π_k Q_k. Iterates are only
/// accepted while the objective increases, so the returned value is never
/// below that of `start`.
struct PovmOptimum {
    std::vector<Matrix> povm;
    double value = 0.0;
};

namespace detail {

inline double povm_objective(const std::vector<Matrix> &povm, const std::vector<Matrix> &q) {
    double v = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) v += (povm[k] * q[k]).trace().real();
    return v;
}

/// Hands whatever the elements miss of the identity to the element that
/// gains most from it, restoring exact completeness.
inline void complete_povm(std::vector<Matrix> &povm, const std::vector<Matrix> &q) {
    const auto d = q[0].rows();
    Matrix sum = Matrix::Zero(d, d);
    for (auto &p : povm) {
        p = 0.5 * (p + p.adjoint());
        sum += p;
    }
    const Matrix rest = Matrix::Identity(d, d) - sum;
    std::size_t best = 0;
    double gain = -INFINITY;
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double g = (rest * q[k]).trace().real();
        if (g > gain) {
            gain = g;
            best = k;
        }
    }
    povm[best] += rest;
}

inline std::vector<Matrix> pretty_good(const std::vector<Matrix> &q) {
    const auto d = q[0].rows();
    Matrix rho = Matrix::Zero(d, d);
    for (const auto &m : q) rho += m;
    const Matrix s = inverse_sqrt_psd(rho, 1e-14 * std::max(1.0, rho.trace().real()));
    std::vector<Matrix> out;
    for (const auto &m : q) out.push_back(s * m * s);
    complete_povm(out, q);
    return out;
}

}  // namespace detail

inline PovmOptimum maximize_povm(const std::vector<Matrix> &q, std::vector<Matrix> start,
                                 int iterations = 400) {
    PovmOptimum best{std::move(start), 0.0};
    best.value = detail::povm_objective(best.povm, q);
    const auto d = q[0].rows();
    for (int it = 0; it < iterations; ++it) {
        Matrix r = Matrix::Zero(d, d);
        std::vector<Matrix> qpq(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) {
            qpq[k] = q[k] * best.povm[k] * q[k];
            r += qpq[k];
        }
        const double scale = r.trace().real();
        if (scale <= 0.0) break;
        const Matrix s = inverse_sqrt_psd(r, 1e-14 * scale);
        std::vector<Matrix> next;
        for (const auto &m : qpq) next.push_back(s * m * s);
        detail::complete_povm(next, q);
        const double v = detail::povm_objective(next, q);
        if (!(v > best.value)) break;
        const bool converged = v - best.value < 1e-15;
        best = {std::move(next), v};
        if (converged) break;
    }
    return best;
}

/// Best of a warm start and the pretty-good measurement, each refined.
inline PovmOptimum best_povm(const std::vector<Matrix> &q, const std::vector<Matrix> &warm) {
    PovmOptimum a = maximize_povm(q, detail::pretty_good(q));
    if (warm.empty()) return a;
    PovmOptimum b = maximize_povm(q, warm);
    return b.value >= a.value ? b : a;
}

struct GlobalSuccess {
    double value = 0.0;
    bool orthogonal = false;  // pairwise orthogonal within kOrthogonalityTolerance
};

/// Optimal global discrimination. Exactly 1 for pairwise orthogonal states;
/// otherwise the refined pretty-good-measurement value.
inline GlobalSuccess global_success(const std::vector<double> &priors, const std::vector<Ket> &kets) {
    if (priors.size() != kets.size() || kets.empty()) {
        throw UsageError("global_success: need one prior per state");
    }
    bool orthogonal = true;
    for (std::size_t i = 0; i < kets.size() && orthogonal; ++i) {
        for (std::size_t j = i + 1; j < kets.size(); ++j) {
            if (std::abs(inner(kets[i], kets[j])) > kOrthogonalityTolerance) {
                orthogonal = false;
                break;
            }
        }
    }
    if (orthogonal) return {1.0, true};
    std::vector<Matrix> q;
    for (std::size_t i = 0; i < kets.size(); ++i) q.push_back(priors[i] * projector(kets[i]));
    return {maximize_povm(q, detail::pretty_good(q), 2000).value, false};
}

inline GlobalSuccess global_success(const DiscriminationInstance &inst) {
    return global_success(inst.priors, inst.joint_states());
}

/// Haar-ish random POVM: S^{-1/2} G_k G_k† S^{-1/2} with Ginibre G_k.
inline std::vector<Matrix> random_povm(std::size_t dim, std::size_t outcomes, std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Matrix> e;
    Matrix s = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < outcomes; ++k) {
        Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = {n(rng), n(rng)};
        e.push_back(g * g.adjoint());
        s += e.back();
    }
    const Matrix w = inverse_sqrt_psd(s);
    for (auto &m : e) {
        m = w * m * w;
        m = 0.5 * (m + m.adjoint());
    }
    return e;
}

struct SeesawOptions {
    std::size_t outcomes = 9;  // first-round outcome count
    std::size_t restarts = 64;
    std::uint64_t seed = 7;
    int max_rounds = 300;
    double stop_tolerance = 1e-13;
    std::size_t threads = 0;  // 0: thread_budget()
};

struct SeesawResult {
    double best_success = 0.0;
    OneWayProtocol protocol;
    std::size_t best_restart = 0;
    std::vector<double> restart_values;
    std::vector<double> trajectory;  // success after every stage of the best restart
};

namespace detail {

/// Second-stage problem for first outcome m: Q_i = p_i ⟨α_i|A_m|α_i⟩ |β_i⟩⟨β_i|.
inline std::vector<Matrix> second_stage_targets(const DiscriminationInstance &inst, const Matrix &a_m) {
    std::vector<Matrix> q;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto &s = inst.states[i];
        q.push_back(inst.priors[i] * expectation(a_m, s.first) * projector(s.second));
    }
    return q;
}

/// First-stage problem: Q_m = Σ_i p_i (Σ_{r: g(m,r)=i} ⟨β_i|B_{r|m}|β_i⟩) |α_i⟩⟨α_i|.
inline std::vector<Matrix> first_stage_targets(const DiscriminationInstance &inst, const OneWayProtocol &p) {
    std::vector<Matrix> q;
    const auto d = static_cast<Eigen::Index>(inst.first_dim());
    for (std::size_t m = 0; m < p.first.size(); ++m) {
        Matrix qm = Matrix::Zero(d, d);
        for (std::size_t r = 0; r < p.second[m].size(); ++r) {
            const std::size_t i = p.guess[m][r];
            const auto &s = inst.states[i];
            qm += inst.priors[i] * expectation(p.second[m][r], s.second) * projector(s.first);
        }
        q.push_back(std::move(qm));
    }
    return q;
}

inline void optimize_second_stage(const DiscriminationInstance &inst, OneWayProtocol &p) {
    for (std::size_t m = 0; m < p.first.size(); ++m) {
        const auto q = second_stage_targets(inst, p.first[m]);
        double scale = 0.0;
        for (const auto &x : q) scale += x.trace().real();
        if (scale <= 0.0) continue;
        const double current = p.second[m].empty() ? -1.0 : povm_objective(p.second[m], q);
        auto opt = best_povm(q, p.second[m]);
        if (opt.value > current) p.second[m] = std::move(opt.povm);
    }
}

inline void optimize_first_stage(const DiscriminationInstance &inst, OneWayProtocol &p) {
    const auto q = first_stage_targets(inst, p);
    auto opt = maximize_povm(q, p.first);
    p.first = std::move(opt.povm);
}

inline std::pair<OneWayProtocol, std::vector<double>> seesaw_restart(const DiscriminationInstance &inst,
                                                                     const SeesawOptions &opt,
                                                                     std::size_t restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    OneWayProtocol p;
    p.first = random_povm(inst.first_dim(), opt.outcomes, rng);
    p.second.assign(opt.outcomes, {});
    p.guess.assign(opt.outcomes, {});
    for (auto &g : p.guess) {
        for (std::size_t i = 0; i < inst.size(); ++i) g.push_back(i);
    }
    std::vector<double> trajectory;
    optimize_second_stage(inst, p);
    for (auto &b : p.second) {
        if (b.empty()) {
            b.assign(inst.size(), Matrix::Zero(static_cast<Eigen::Index>(inst.second_dim()),
                                               static_cast<Eigen::Index>(inst.second_dim())));
            b[0] = identity(inst.second_dim());
        }
    }
    trajectory.push_back(success_probability(p, inst));
    for (int round = 0; round < opt.max_rounds; ++round) {
        optimize_first_stage(inst, p);
        trajectory.push_back(success_probability(p, inst));
        optimize_second_stage(inst, p);
        trajectory.push_back(success_probability(p, inst));
        const double gain = trajectory.back() - trajectory[trajectory.size() - 3];
        if (gain < opt.stop_tolerance) break;
    }
    return {std::move(p), std::move(trajectory)};
}

}  // namespace detail

/// Alternating optimization over one-way protocols, best of `restarts`
/// independently seeded runs. Ties go to the lowest restart index.
inline SeesawResult seesaw_one_way(const DiscriminationInstance &inst, const SeesawOptions &opt = {}) {
    inst.validate();
    if (opt.restarts < 1) throw UsageError("seesaw_one_way: restarts must be at least 1");
    if (opt.outcomes < 1) throw UsageError("seesaw_one_way: need at least one first-round outcome");
    std::vector<std::pair<OneWayProtocol, std::vector<double>>> runs(opt.restarts);
    parallel_for(
        opt.restarts, [&](std::size_t k) { runs[k] = detail::seesaw_restart(inst, opt, k); },
        opt.threads == 0 ? thread_budget() : opt.threads);

    SeesawResult res;
    res.best_success = -1.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const double v = runs[k].second.back();
        res.restart_values.push_back(v);
        if (v > res.best_success) {
            res.best_success = v;
            res.best_restart = k;
        }
    }
    res.protocol = runs[res.best_restart].first;
    res.trajectory = runs[res.best_restart].second;
    return res;
}

inline io::OrderedJson protocol_to_json(const OneWayProtocol &p) {
    io::OrderedJson j;
    j["A"] = io::OrderedJson::array();
    for (const auto &m : p.first) j["A"].push_back(io::matrix_to_json(m));
    j["B"] = io::families_to_json(p.second);
    j["guess"] = p.guess;
    return j;
}

inline io::OrderedJson seesaw_to_json(const SeesawResult &r, const SeesawOptions &opt) {
    io::OrderedJson j;
    j["best_success"] = r.best_success;
    j["restarts"] = opt.restarts;
    j["seed"] = opt.seed;
    j["outcomes"] = opt.outcomes;
    j["best_restart"] = r.best_restart;
    j["protocol"] = protocol_to_json(r.protocol);
    return j;
}

/// {"priors": [...] (optional, uniform if absent),
///  "states": [{"first": [[re, im], ...], "second": [...]}, ...]}
inline DiscriminationInstance parse_ensemble(const io::Json &j) {
    const auto &states = io::require(j, "states", "");
    if (!states.is_array() || states.empty()) throw ParseError("/states", "expected a non-empty array");
    std::vector<ProductState> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string path = "/states/" + std::to_string(i);
        const auto &f = io::require(states[i], "first", path);
        const auto &s = io::require(states[i], "second", path);
        if (!f.is_array() || !s.is_array()) throw ParseError(path, "expected amplitude arrays");
        out.push_back({io::ket_from_json(f, f.size(), path + "/first"),
                       io::ket_from_json(s, s.size(), path + "/second")});
    }
    DiscriminationInstance inst = uniform_instance(std::move(out));
    if (j.contains("priors")) {
        const auto &p = j["priors"];
        if (!p.is_array()) throw ParseError("/priors", "expected an array of numbers");
        inst.priors.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!p[i].is_number()) throw ParseError("/priors/" + std::to_string(i), "expected a number");
            inst.priors.push_back(p[i].get<double>());
        }
    }
    inst.validate();
    return inst;
}

inline io::OrderedJson ensemble_to_json(const DiscriminationInstance &inst) {
    io::OrderedJson j;
    j["priors"] = inst.priors;
    j["states"] = io::OrderedJson::array();
    for (const auto &s : inst.states) {
        io::OrderedJson e;
        e["first"] = io::ket_to_json(s.first);
        e["second"] = io::ket_to_json(s.second);
        j["states"].push_back(std::move(e));
    }
    return j;
}

}  // namespace nlwe
