// Copyright 2026 The peri authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace peri {

/// Base class of all library errors. The class() tag is a stable,
/// machine-parsable identifier used by the CLI for one-line diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string cls, const std::string& msg)
        : std::runtime_error(cls + ": " + msg), cls_(std::move(cls)) {}
    const std::string& error_class() const { return cls_; }

private:
    std::string cls_;
};

/// Malformed or out-of-contract input data (images, files, score vectors).
struct InputError : Error {
    explicit InputError(const std::string& msg) : Error("input-error", msg) {}
};

/// Invalid configuration parameter (violates an operation precondition).
struct ParamError : Error {
    explicit ParamError(const std::string& msg) : Error("param-error", msg) {}
};

/// Two artifacts that must share layout/configuration do not.
struct IncompatibleError : Error {
    explicit IncompatibleError(const std::string& msg)
        : Error("incompatible-error", msg) {}
};

/// A similarity score cannot be defined for the given pair (e.g. an
/// all-zero descriptor). Callers are expected to flag, not to score 0.
struct UndefinedScoreError : Error {
    explicit UndefinedScoreError(const std::string& msg)
        : Error("undefined-score", msg) {}
};

/// Feature extraction failed for a specific image/annotation.
struct ExtractionError : Error {
    explicit ExtractionError(const std::string& msg)
        : Error("extraction-error", msg) {}
};

/// Model training failed (degenerate data, single class, non-finite input).
struct TrainingError : Error {
    explicit TrainingError(const std::string& msg)
        : Error("training-error", msg) {}
};

/// Filesystem / serialization failure.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io-error", msg) {}
};

/// Too many per-item failures for a batch run to be trustworthy.
struct RunError : Error {
    explicit RunError(const std::string& msg) : Error("run-error", msg) {}
};

}  // namespace peri
