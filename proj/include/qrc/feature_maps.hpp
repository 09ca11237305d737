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
 * Encoder circuits used by the reservoir: the compact CPMap (two features
 * per qubit) and the ZZ feature map (one feature per qubit).
 *
 * CPMap layout on n = ceil(F/2) qubits:
 *
 *   1. three entangling layers; each layer is a brick sweep over all
 *      adjacent pairs, first (0,1),(2,3),... then (1,2),(3,4),...
 *   2. an encoding layer: qubit i gets RY(x[2i]) then RZ(x[2i+1]); when F is
 *      odd the last qubit only gets RY.
 *
 * Every entangling block on (a, b) is
 *   CNOT(a->b) RY(t1)a RY(t2)b CNOT(b->a) RZ(t3)a RY(t4)b CNOT(a->b) RY(t5)a RZ(t6)b
 * so the map uses 3 * 3(n-1) = 9(n-1) CNOTs.
 *
 * The data-independent entangling section comes first. In the reservoir
 * composite U^dagger(z) U(x) a data-independent tail of U would cancel
 * against the head of U^dagger, leaving only local rotations.
 */
#pragma once

#include "qrc/circuit.hpp"
#include "qrc/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class FeatureMapKind { CPMap, ZZFeatureMap };

inline std::string_view to_string(FeatureMapKind kind) {
    return kind == FeatureMapKind::CPMap ? "cpmap" : "zz";
}

inline FeatureMapKind feature_map_kind_from_string(std::string_view s) {
    if (s == "cpmap" || s == "CPMap") {
        return FeatureMapKind::CPMap;
    }
    if (s == "zz" || s == "ZZFeatureMap") {
        return FeatureMapKind::ZZFeatureMap;
    }
    throw ConfigError("reservoir.feature_map", "unknown feature map '" + std::string(s) +
                                                   "' (expected cpmap or zz)");
}

/// Pinned CPMap internal angles.
inline constexpr std::array<double, 6> kDefaultThetas{0.35, -0.20, 0.55, 0.10, -0.45, 0.25};

struct FeatureMapSpec {
    FeatureMapKind kind = FeatureMapKind::CPMap;
    std::size_t n_features = 20;
    std::size_t reps = 1;
    std::array<double, 6> thetas = kDefaultThetas;

    [[nodiscard]] std::size_t n_qubits() const {
        return kind == FeatureMapKind::CPMap ? (n_features + 1) / 2 : n_features;
    }

    void validate() const {
        if (kind == FeatureMapKind::CPMap && n_features < 2) {
            throw ConfigError("reservoir.window_len", "CPMap needs at least 2 features");
        }
        if (n_features < 1) {
            throw ConfigError("reservoir.window_len", "must be positive");
        }
        if (reps < 1) {
            throw ConfigError("reservoir.zz_reps", "must be positive");
        }
        for (double t : thetas) {
            if (!(std::abs(t) <= std::numbers::pi / 2.0)) {
                throw ConfigError("reservoir.thetas", "angles must lie in [-pi/2, pi/2]");
            }
        }
    }

    friend bool operator==(const FeatureMapSpec &, const FeatureMapSpec &) = default;
};

namespace detail {

inline void append_cpmap_block(Circuit &c, std::size_t a, std::size_t b,
                               const std::array<double, 6> &t) {
    c.add(Gate::cnot(a, b))
        .add(Gate::ry(a, t[0]))
        .add(Gate::ry(b, t[1]))
        .add(Gate::cnot(b, a))
        .add(Gate::rz(a, t[2]))
        .add(Gate::ry(b, t[3]))
        .add(Gate::cnot(a, b))
        .add(Gate::ry(a, t[4]))
        .add(Gate::rz(b, t[5]));
}

inline void check_features(const FeatureMapSpec &spec, std::span<const double> x) {
    if (x.size() != spec.n_features) {
        throw Error(ErrorKind::Sizing, "feature vector has " + std::to_string(x.size()) +
                                           " entries, map expects " +
                                           std::to_string(spec.n_features));
    }
}

} // namespace detail

inline constexpr std::size_t kCpmapEntanglingLayers = 3;

/// Number of two-qubit blocks in a CPMap on `n_qubits` qubits.
[[nodiscard]] constexpr std::size_t cpmap_block_count(std::size_t n_qubits) {
    return n_qubits == 0 ? 0 : kCpmapEntanglingLayers * (n_qubits - 1);
}

inline Circuit build_cpmap(const FeatureMapSpec &spec, std::span<const double> x) {
    detail::require(spec.kind == FeatureMapKind::CPMap, ErrorKind::Config,
                    "build_cpmap: spec is not a CPMap");
    if (spec.n_features < 2) {
        throw Error(ErrorKind::Sizing, "CPMap needs at least 2 features");
    }
    detail::check_features(spec, x);
    const std::size_t n = spec.n_qubits();
    Circuit c(n);
    for (std::size_t layer = 0; layer < kCpmapEntanglingLayers; ++layer) {
        for (std::size_t parity = 0; parity < 2; ++parity) {
            for (std::size_t a = parity; a + 1 < n; a += 2) {
                detail::append_cpmap_block(c, a, a + 1, spec.thetas);
            }
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        c.add(Gate::ry(q, x[2 * q]));
        if (2 * q + 1 < x.size()) {
            c.add(Gate::rz(q, x[2 * q + 1]));
        }
    }
    return c;
}

inline Circuit build_zz(const FeatureMapSpec &spec, std::span<const double> x) {
    detail::require(spec.kind == FeatureMapKind::ZZFeatureMap, ErrorKind::Config,
                    "build_zz: spec is not a ZZ feature map");
    detail::check_features(spec, x);
    const std::size_t n = spec.n_qubits();
    constexpr double pi = std::numbers::pi;
    Circuit c(n);
    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        for (std::size_t q = 0; q < n; ++q) {
            c.add(Gate::h(q));
        }
        for (std::size_t q = 0; q < n; ++q) {
            c.add(Gate::phase(q, 2.0 * x[q]));
        }
        for (std::size_t q = 0; q + 1 < n; ++q) {
            c.add(Gate::cnot(q, q + 1))
                .add(Gate::phase(q + 1, 2.0 * (pi - x[q]) * (pi - x[q + 1])))
                .add(Gate::cnot(q, q + 1));
        }
    }
    return c;
}

inline Circuit build_feature_map(const FeatureMapSpec &spec, std::span<const double> x) {
    return spec.kind == FeatureMapKind::CPMap ? build_cpmap(spec, x) : build_zz(spec, x);
}

/// Zero-pads the feedback vector to the encoder's feature count.
inline std::vector<double> pad_feedback(std::span<const double> z, std::size_t target_len) {
    if (z.size() > target_len) {
        throw Error(ErrorKind::Sizing, "feedback of length " + std::to_string(z.size()) +
                                           " exceeds target length " +
                                           std::to_string(target_len));
    }
    std::vector<double> out(target_len, 0.0);
    std::copy(z.begin(), z.end(), out.begin());
    return out;
}

/// U(x) followed by U^dagger(pad(z)).
inline Circuit composite_circuit(const FeatureMapSpec &spec, std::span<const double> x,
                                 std::span<const double> z_scaled) {
    Circuit c = build_feature_map(spec, x);
    c.append(dagger(build_feature_map(spec, pad_feedback(z_scaled, spec.n_features))));
    return c;
}

} // namespace qrc
