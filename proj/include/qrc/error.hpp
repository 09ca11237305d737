// Copyright 2026 The qrc Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exception hierarchy shared by every qrc module.
 *
 * All recoverable failures are reported by throwing a subclass of
 * `qrc::Error`. The `kind()` tag lets callers (the CLI in particular) map an
 * exception onto an exit code and a machine-readable error record without
 * string matching.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qrc {

enum class ErrorKind {
    Config,           ///< invalid configuration or argument
    Sizing,           ///< dimension / length mismatch
    Diverged,         ///< numerical integration blew up
    DegenerateScale,  ///< zero variance / constant data
    Simulation,       ///< invalid quantum state or circuit
    Io,               ///< file read/write or format failure
    Convergence,      ///< iterative solver did not converge
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Sizing: return "sizing";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::DegenerateScale: return "degenerate_scale";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Convergence: return "convergence";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Configuration error carrying the dotted path of the offending field.
class ConfigError : public Error {
  public:
    ConfigError(std::string path, const std::string &what)
        : Error(ErrorKind::Config, path.empty() ? what : path + ": " + what),
          path_(std::move(path)) {}

    [[nodiscard]] const std::string &path() const noexcept { return path_; }

  private:
    std::string path_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string &what) {
    if (!cond) {
        throw Error(kind, what);
    }
}

} // namespace detail
} // namespace qrc
