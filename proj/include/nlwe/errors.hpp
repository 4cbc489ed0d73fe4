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

#pragma once

#include <stdexcept>
#include <string>

namespace nlwe {

/// Caller violated a shape or argument contract (dimension mismatch, bad index set).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but outside the mathematical domain (e.g. non-Hermitian).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Malformed serialized document. `path` is a JSON pointer to the offending node.
struct ParseError : std::runtime_error {
    ParseError(std::string path, const std::string &what)
        : std::runtime_error(path + ": " + what), path(std::move(path)) {}
    std::string path;
};

/// A realization parsed fine but violates a physical invariant.
struct ValidationError : std::runtime_error {
    ValidationError(std::string check, const std::string &what, double residual)
        : std::runtime_error(check + ": " + what), check(std::move(check)), residual(residual) {}
    std::string check;
    double residual;
};

}  // namespace nlwe
