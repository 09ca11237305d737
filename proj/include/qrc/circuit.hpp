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
 * Gate alphabet and circuit container.
 */
#pragma once

#include "qrc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

using Complex = std::complex<double>;

enum class GateKind { H, RX, RY, RZ, PHASE, CNOT, CZ };

inline std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::PHASE: return "PHASE";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    }
    return "?";
}

[[nodiscard]] constexpr bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CZ;
}

[[nodiscard]] constexpr bool is_parametric(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY ||
           kind == GateKind::RZ || kind == GateKind::PHASE;
}

/// One gate. For CNOT, `qubits[0]` is the control and `qubits[1]` the target.
struct Gate {
    GateKind kind = GateKind::H;
    std::array<std::size_t, 2> qubits{0, 0};
    double angle = 0.0;

    [[nodiscard]] std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }

    friend bool operator==(const Gate &, const Gate &) = default;

    static Gate h(std::size_t q) { return {GateKind::H, {q, q}, 0.0}; }
    static Gate rx(std::size_t q, double a) { return {GateKind::RX, {q, q}, a}; }
    static Gate ry(std::size_t q, double a) { return {GateKind::RY, {q, q}, a}; }
    static Gate rz(std::size_t q, double a) { return {GateKind::RZ, {q, q}, a}; }
    static Gate phase(std::size_t q, double a) {
        return {GateKind::PHASE, {q, q}, a};
    }
    static Gate cnot(std::size_t control, std::size_t target) {
        return {GateKind::CNOT, {control, target}, 0.0};
    }
    static Gate cz(std::size_t a, std::size_t b) { return {GateKind::CZ, {a, b}, 0.0}; }
};

/// 2x2 matrix of a single-qubit gate, row-major, basis order (|0>, |1>).
inline std::array<Complex, 4> single_qubit_matrix(const Gate &g) {
    const double c = std::cos(g.angle / 2.0);
    const double s = std::sin(g.angle / 2.0);
    const Complex i{0.0, 1.0};
    switch (g.kind) {
    case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        return {r, r, r, -r};
    }
    case GateKind::RX: return {c, -i * s, -i * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -g.angle / 2.0), 0.0, 0.0,
                               std::polar(1.0, g.angle / 2.0)};
    case GateKind::PHASE: return {1.0, 0.0, 0.0, std::polar(1.0, g.angle)};
    default: break;
    }
    detail::fail(ErrorKind::Simulation, "single_qubit_matrix: two-qubit gate");
}

/// 4x4 matrix of a two-qubit gate in the local basis |q0 q1> (q0 = qubits[0]
/// is the high bit), row-major.
inline std::array<Complex, 16> two_qubit_matrix(const Gate &g) {
    std::array<Complex, 16> m{};
    switch (g.kind) {
    case GateKind::CNOT:
        m[0 * 4 + 0] = 1.0;
        m[1 * 4 + 1] = 1.0;
        m[2 * 4 + 3] = 1.0;
        m[3 * 4 + 2] = 1.0;
        return m;
    case GateKind::CZ:
        m[0] = 1.0;
        m[5] = 1.0;
        m[10] = 1.0;
        m[15] = -1.0;
        return m;
    default: break;
    }
    detail::fail(ErrorKind::Simulation, "two_qubit_matrix: single-qubit gate");
}

class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
        detail::require(n_qubits > 0, ErrorKind::Simulation,
                        "circuit must have at least one qubit");
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] const std::vector<Gate> &gates() const { return gates_; }
    [[nodiscard]] std::size_t size() const { return gates_.size(); }

    Circuit &add(const Gate &g) {
        validate(g);
        gates_.push_back(g);
        return *this;
    }

    /// Appends every gate of `other` (same register width required).
    Circuit &append(const Circuit &other) {
        detail::require(other.n_qubits_ == n_qubits_, ErrorKind::Sizing,
                        "append: qubit-count mismatch");
        gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
        return *this;
    }

    [[nodiscard]] std::size_t count(GateKind kind) const {
        return static_cast<std::size_t>(std::count_if(
            gates_.begin(), gates_.end(), [kind](const Gate &g) { return g.kind == kind; }));
    }

    friend bool operator==(const Circuit &, const Circuit &) = default;

  private:
    void validate(const Gate &g) const {
        for (std::size_t k = 0; k < g.arity(); ++k) {
            detail::require(g.qubits[k] < n_qubits_, ErrorKind::Simulation,
                            "gate qubit index " + std::to_string(g.qubits[k]) +
                                " out of range for " + std::to_string(n_qubits_) +
                                " qubits");
        }
        if (g.arity() == 2) {
            detail::require(g.qubits[0] != g.qubits[1], ErrorKind::Simulation,
                            "two-qubit gate on identical qubits");
        }
        detail::require(std::isfinite(g.angle), ErrorKind::Simulation,
                        "gate angle must be finite");
    }

    std::size_t n_qubits_ = 0;
    std::vector<Gate> gates_;
};

/// Inverse circuit: reversed order, rotation angles negated.
inline Circuit dagger(const Circuit &c) {
    Circuit out(c.n_qubits());
    for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
        Gate g = *it;
        if (is_parametric(g.kind)) {
            g.angle = -g.angle;
        }
        out.add(g);
    }
    return out;
}

/// One gate per line, `KIND q... [angle]`, angle printed with 17 significant
/// digits.
inline void print_circuit(std::ostream &os, const Circuit &c) {
    const auto old_prec = os.precision(17);
    for (const Gate &g : c.gates()) {
        os << to_string(g.kind);
        for (std::size_t k = 0; k < g.arity(); ++k) {
            os << ' ' << g.qubits[k];
        }
        if (is_parametric(g.kind)) {
            os << ' ' << g.angle;
        }
        os << '\n';
    }
    os.precision(old_prec);
}

inline std::string to_string(const Circuit &c) {
    std::ostringstream os;
    print_circuit(os, c);
    return os.str();
}

} // namespace qrc
