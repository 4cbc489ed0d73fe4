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

// nlwe: correlations | verify | selftest | locc | generate
//
// Exit codes: 0 pass, 1 verification failure, 2 I/O error,
// 3 parse/validation error, 4 statistics differ from the reference.

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nlwe/nlwe.hpp"

namespace {

enum ExitCode : int { kPass = 0, kFail = 1, kIo = 2, kInvalid = 3, kHypothesis = 4 };

struct CliConfig {
    std::string input;
    bool reference = false;
    std::string output;
    std::string format = "json";
    std::optional<double> stats_tol;
    std::optional<double> residual_tol;
    std::uint64_t seed = 7;
    std::size_t restarts = 64;
    std::size_t outcomes = 9;
    std::string junk = "1,1,1,1";
    bool no_rotate = false;
    int verbosity = 0;
};

void log(const CliConfig &cfg, const std::string &msg) {
    if (cfg.verbosity == 0) return;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::cerr << "[" << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << "] " << msg << "\n";
}

void emit(const CliConfig &cfg, const std::string &payload) {
    if (cfg.output.empty()) {
        std::cout << payload;
    } else {
        nlwe::write_file(cfg.output, payload);
    }
}

nlwe::Realization load_realization(const CliConfig &cfg) {
    if (cfg.reference) return nlwe::reference_realization();
    if (cfg.input.empty()) throw nlwe::UsageError("either --input PATH or --reference is required");
    return nlwe::parse_realization_text(nlwe::read_file(cfg.input));
}

nlwe::Tolerances tolerances(const CliConfig &cfg, double residual_default) {
    nlwe::Tolerances t;
    if (cfg.stats_tol) t.stats = *cfg.stats_tol;
    t.residual = cfg.residual_tol.value_or(residual_default);
    t.extraction = cfg.residual_tol.value_or(residual_default);
    return t;
}

std::string format_probability(double p) {
    std::ostringstream ss;
    ss << std::setprecision(12) << p;
    return ss.str();
}

int cmd_correlations(const CliConfig &cfg) {
    const auto r = load_realization(cfg);
    log(cfg, "computing correlations for realization " + nlwe::realization_digest(r));
    const auto t = nlwe::correlations(r);
    std::ostringstream out;
    const auto &shape = nlwe::CorrelationTensor::kShape;
    if (cfg.format == "csv") {
        out << "x,y,z,a,b1,b2,c,p\n";
    }
    nlwe::io::OrderedJson rows = nlwe::io::OrderedJson::array();
    for (std::size_t x = 0; x < shape[0]; ++x)
        for (std::size_t y = 0; y < shape[1]; ++y)
            for (std::size_t z = 0; z < shape[2]; ++z)
                for (std::size_t a = 0; a < 3; ++a)
                    for (std::size_t b1 = 0; b1 < 3; ++b1)
                        for (std::size_t b2 = 0; b2 < 3; ++b2)
                            for (std::size_t c = 0; c < 3; ++c) {
                                const double p = t.at(x, y, z, a, b1, b2, c);
                                if (cfg.format == "csv") {
                                    out << x << ',' << y << ',' << z << ',' << a << ',' << b1 << ','
                                        << b2 << ',' << c << ',' << format_probability(p) << '\n';
                                } else {
                                    rows.push_back({x, y, z, a, b1, b2, c, p});
                                }
                            }
    if (cfg.format == "json") {
        nlwe::io::OrderedJson j;
        j["digest"] = nlwe::realization_digest(r);
        j["columns"] = {"x", "y", "z", "a", "b1", "b2", "c", "p"};
        j["rows"] = std::move(rows);
        out << j.dump(2) << "\n";
    }
    emit(cfg, out.str());
    return kPass;
}

void summarize(const nlwe::SelfTestReport &rep) {
    std::size_t failed = 0;
    for (const auto &c : rep.checks) {
        if (!c.pass) {
            if (failed < 20) std::cerr << "FAIL " << c.check_id << ": residual " << c.residual << " > " << c.threshold << " (" << c.context << ")\n";
            ++failed;
        }
    }
    for (const auto &e : rep.extractions) {
        if (!e.pass) {
            if (failed < 20) std::cerr << "FAIL " << e.id << ": residual " << e.residual << ", fidelity " << e.fidelity << "\n";
            ++failed;
        }
    }
    std::cerr << (rep.verdict ? "PASS" : "FAIL") << ": " << rep.checks.size() << " checks, "
              << rep.extractions.size() << " extractions, " << failed << " failed\n";
}

int cmd_verify(const CliConfig &cfg) {
    const auto r = load_realization(cfg);
    const auto tol = tolerances(cfg, 1e-9);
    log(cfg, "running verification checks");
    const auto rep = nlwe::compile_report(r, nlwe::run_checks(r, tol));
    emit(cfg, nlwe::report_to_json(rep).dump(2) + "\n");
    summarize(rep);
    return rep.verdict ? kPass : kFail;
}

int cmd_selftest(const CliConfig &cfg) {
    const auto r = load_realization(cfg);
    const auto tol = tolerances(cfg, 1e-8);
    log(cfg, "running the self-test isometry");
    const auto rep = nlwe::compile_report(r, {}, nlwe::verify_theorem1(r, tol));
    emit(cfg, nlwe::report_to_json(rep).dump(2) + "\n");
    summarize(rep);
    return rep.verdict ? kPass : kFail;
}

int cmd_locc(const CliConfig &cfg) {
    const auto inst = cfg.input.empty()
                          ? nlwe::domino_instance()
                          : nlwe::parse_ensemble([&] {
                                const auto text = nlwe::read_file(cfg.input);
                                try {
                                    return nlwe::io::Json::parse(text);
                                } catch (const nlwe::io::Json::parse_error &e) {
                                    throw nlwe::ParseError("/", std::string("invalid JSON: ") + e.what());
                                }
                            }());
    nlwe::SeesawOptions opt;
    opt.seed = cfg.seed;
    opt.restarts = cfg.restarts;
    opt.outcomes = cfg.outcomes;
    log(cfg, "seesaw over one-way protocols, " + std::to_string(opt.restarts) + " restarts");
    const auto global = nlwe::global_success(inst);
    const auto res = nlwe::seesaw_one_way(inst, opt);

    nlwe::io::OrderedJson j;
    j["protocol_class"] = "one-way LOCC (first party measures, second party adapts)";
    j["global_success"] = global.value;
    j["orthogonal"] = global.orthogonal;
    j["gap"] = global.value - res.best_success;
    j["one_way"] = nlwe::seesaw_to_json(res, opt);
    emit(cfg, j.dump(2) + "\n");
    std::cerr << "global " << format_probability(global.value) << ", one-way best "
              << format_probability(res.best_success) << ", gap "
              << format_probability(global.value - res.best_success) << "\n";
    return kPass;
}

int cmd_generate(const CliConfig &cfg) {
    nlwe::Realization base = cfg.input.empty() ? nlwe::reference_realization()
                                               : nlwe::parse_realization_text(nlwe::read_file(cfg.input));
    nlwe::EquivalenceOptions opt;
    opt.seed = cfg.seed;
    opt.rotate = !cfg.no_rotate;
    std::istringstream ss(cfg.junk);
    std::string part;
    std::size_t k = 0;
    while (std::getline(ss, part, ',')) {
        if (k >= 4) throw nlwe::UsageError("--junk expects four comma-separated dimensions");
        std::size_t pos = 0;
        const long v = std::stol(part, &pos);
        if (pos != part.size() || v < 1) throw nlwe::UsageError("--junk dimensions must be positive integers");
        opt.junk[k++] = static_cast<std::size_t>(v);
    }
    if (k != 4) throw nlwe::UsageError("--junk expects four comma-separated dimensions");
    const bool identity = !opt.rotate && opt.junk == std::array<std::size_t, 4>{1, 1, 1, 1};
    const auto r = identity ? base : nlwe::randomized_equivalent(base, opt);
    emit(cfg, nlwe::serialize_realization(r).dump() + "\n");
    return kPass;
}

void add_common(CLI::App *sub, CliConfig &cfg, bool tolerances, bool realization) {
    if (realization) {
        auto *in = sub->add_option("--input", cfg.input, "realization JSON file");
        auto *ref = sub->add_flag("--reference", cfg.reference, "use the built-in reference realization");
        in->excludes(ref);
    }
    sub->add_option("--output", cfg.output, "write the payload here instead of stdout");
    if (tolerances) {
        sub->add_option("--stats-tol", cfg.stats_tol, "correlation match tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--residual-tol", cfg.residual_tol, "operator/extraction residual tolerance")
            ->check(CLI::PositiveNumber);
    }
    sub->add_flag("-v", cfg.verbosity, "log progress to stderr");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Self-testing and LOCC toolkit for the domino-basis bilocality experiment"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto *corr = app.add_subcommand("correlations", "print the full correlation tensor");
    add_common(corr, cfg, false, true);
    corr->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto *verify = app.add_subcommand("verify", "run the operator-level verification checks");
    add_common(verify, cfg, true, true);

    auto *selftest = app.add_subcommand("selftest", "apply the self-testing isometry");
    add_common(selftest, cfg, true, true);

    auto *locc = app.add_subcommand("locc", "global vs one-way LOCC discrimination");
    locc->add_option("--input", cfg.input, "ensemble JSON file (default: domino basis)");
    add_common(locc, cfg, false, false);
    locc->add_option("--seed", cfg.seed, "RNG seed");
    locc->add_option("--restarts", cfg.restarts, "seesaw restarts")->check(CLI::PositiveNumber);
    locc->add_option("--outcomes", cfg.outcomes, "first-round outcome count")->check(CLI::PositiveNumber);

    auto *gen = app.add_subcommand("generate", "write a realization file (reference or a randomized equivalent)");
    gen->add_option("--input", cfg.input, "base realization (default: reference)");
    add_common(gen, cfg, false, false);
    gen->add_option("--seed", cfg.seed, "RNG seed");
    gen->add_option("--junk", cfg.junk, "junk dimensions dA,dB1,dB2,dC");
    gen->add_flag("--no-rotate", cfg.no_rotate, "skip the random local unitaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kPass : kInvalid;
    }

    try {
        if (*corr) return cmd_correlations(cfg);
        if (*verify) return cmd_verify(cfg);
        if (*selftest) return cmd_selftest(cfg);
        if (*locc) return cmd_locc(cfg);
        if (*gen) return cmd_generate(cfg);
    } catch (const std::ios_base::failure &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const nlwe::ParseError &e) {
        std::cerr << "parse error at " << e.what() << "\n";
        return kInvalid;
    } catch (const nlwe::ValidationError &e) {
        std::cerr << "validation error in " << e.what() << "\n";
        return kInvalid;
    } catch (const nlwe::UsageError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const nlwe::HypothesisViolation &e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return kHypothesis;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
