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

// Realization files (UTF-8 JSON):
//
//   {"dims": [dA, dB1, dB2, dC],
//    "state_ab1": [[re, im], ...],
//    "state_b2c": [[re, im], ...],
//    "alice":   [setting][outcome] -> matrix,
//    "bob":     [setting][3*b1 + b2] -> matrix   (settings 0..3, then the domino setting),
//    "charlie": [setting][outcome] -> matrix}
//
// A matrix is a flat row-major list of [re, im] pairs.

#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"
#include "nlwe/realization.hpp"

namespace nlwe {

namespace io {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline OrderedJson complex_to_json(Complex z) { return OrderedJson::array({z.real(), z.imag()}); }

inline OrderedJson ket_to_json(const Ket &v) {
    OrderedJson out = OrderedJson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

inline OrderedJson matrix_to_json(const Matrix &m) {
    OrderedJson out = OrderedJson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(complex_to_json(m(i, j)));
    }
    return out;
}

inline OrderedJson families_to_json(const std::vector<Family> &fs) {
    OrderedJson out = OrderedJson::array();
    for (const auto &f : fs) {
        OrderedJson setting = OrderedJson::array();
        for (const auto &m : f) setting.push_back(matrix_to_json(m));
        out.push_back(std::move(setting));
    }
    return out;
}

inline const Json &require(const Json &j, const std::string &key, const std::string &path) {
    if (!j.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path + "/" + key, "missing field");
    return *it;
}

inline Complex complex_from_json(const Json &j, const std::string &path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(path, "expected [re, im] pair of numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Ket ket_from_json(const Json &j, std::size_t dim, const std::string &path) {
    if (!j.is_array()) throw ParseError(path, "expected an array of [re, im] pairs");
    if (j.size() != dim) {
        throw ParseError(path, "expected " + std::to_string(dim) + " amplitudes, got " +
                                   std::to_string(j.size()));
    }
    Ket v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], path + "/" + std::to_string(i));
    }
    return v;
}

inline Matrix matrix_from_json(const Json &j, std::size_t dim, const std::string &path) {
    if (!j.is_array()) throw ParseError(path, "expected a flat row-major array of [re, im] pairs");
    if (j.size() != dim * dim) {
        throw ParseError(path, "expected " + std::to_string(dim * dim) + " entries, got " +
                                   std::to_string(j.size()));
    }
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim * dim; ++i) {
        m(static_cast<Eigen::Index>(i / dim), static_cast<Eigen::Index>(i % dim)) =
            complex_from_json(j[i], path + "/" + std::to_string(i));
    }
    return m;
}

inline std::vector<Family> families_from_json(const Json &j, std::size_t settings,
                                              std::size_t outcomes, std::size_t dim,
                                              const std::string &path) {
    if (!j.is_array() || j.size() != settings) {
        throw ParseError(path, "expected " + std::to_string(settings) + " settings");
    }
    std::vector<Family> out;
    for (std::size_t s = 0; s < settings; ++s) {
        const std::string spath = path + "/" + std::to_string(s);
        if (!j[s].is_array() || j[s].size() != outcomes) {
            throw ParseError(spath, "expected " + std::to_string(outcomes) + " outcomes");
        }
        Family f;
        for (std::size_t o = 0; o < outcomes; ++o) {
            f.push_back(matrix_from_json(j[s][o], dim, spath + "/" + std::to_string(o)));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace io

inline io::OrderedJson serialize_realization(const Realization &r) {
    io::OrderedJson j;
    j["dims"] = {r.dims.a, r.dims.b1, r.dims.b2, r.dims.c};
    j["state_ab1"] = io::ket_to_json(r.state_ab1);
    j["state_b2c"] = io::ket_to_json(r.state_b2c);
    j["alice"] = io::families_to_json(r.alice);
    j["bob"] = io::families_to_json(r.bob);
    j["charlie"] = io::families_to_json(r.charlie);
    return j;
}

/// Parses and validates. Throws ParseError (with JSON pointer) or ValidationError.
inline Realization parse_realization(const io::Json &j) {
    Realization r;
    const auto &dims = io::require(j, "dims", "");
    if (!dims.is_array() || dims.size() != 4) throw ParseError("/dims", "expected 4 dimensions");
    std::array<std::size_t, 4> d{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!dims[i].is_number_integer() || dims[i].get<long long>() < 1) {
            throw ParseError("/dims/" + std::to_string(i), "expected a positive integer");
        }
        d[i] = dims[i].get<std::size_t>();
    }
    r.dims = {d[0], d[1], d[2], d[3]};
    r.state_ab1 = io::ket_from_json(io::require(j, "state_ab1", ""), d[0] * d[1], "/state_ab1");
    r.state_b2c = io::ket_from_json(io::require(j, "state_b2c", ""), d[2] * d[3], "/state_b2c");
    r.alice = io::families_from_json(io::require(j, "alice", ""), kSideSettings, kOutcomes, d[0],
                                     "/alice");
    r.bob = io::families_from_json(io::require(j, "bob", ""), kBobSettings, kBobOutcomes,
                                   d[1] * d[2], "/bob");
    r.charlie = io::families_from_json(io::require(j, "charlie", ""), kSideSettings, kOutcomes,
                                       d[3], "/charlie");
    r.validate();
    return r;
}

inline Realization parse_realization_text(const std::string &text) {
    io::Json j;
    try {
        j = io::Json::parse(text);
    } catch (const io::Json::parse_error &e) {
        throw ParseError("/", std::string("invalid JSON: ") + e.what());
    }
    return parse_realization(j);
}

/// Reads a file; std::ios_base::failure on I/O errors.
inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed for " + path);
}

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
inline std::string realization_digest(const Realization &r) {
    const std::string text = serialize_realization(r).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

}  // namespace nlwe
