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
 * Dense pure-state and mixed-state simulation.
 *
 * Bit order: basis index `s` is big-endian with qubit 0 as the most
 * significant bit, so qubit `q` lives at bit position `n - 1 - q`.
 *
 * The noisy path attaches channels to gates: after each gate, depolarizing
 * noise on the touched qubits (p1 for one-qubit gates, p2 jointly for
 * two-qubit gates), then amplitude damping with
 * gamma = 1 - exp(-gate_time / t1) on each touched qubit. Consecutive
 * operations confined to at most two qubits are composed into one local
 * superoperator and applied in a single pass over the density matrix.
 */
#pragma once

#include "qrc/circuit.hpp"
#include "qrc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace qrc {

/// Per-gate noise strengths. Times share one unit (microseconds by
/// convention); only gate_time / t1 matters.
struct NoiseSpec {
    double p1 = 0.0;
    double p2 = 0.0;
    double readout_eps = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    double gate_time_1q = 0.05;
    double gate_time_2q = 0.3;

    void validate() const {
        auto prob = [](double p, double hi, const char *name) {
            if (!(p >= 0.0 && p <= hi)) {
                throw ConfigError(std::string("noise.") + name,
                                  "must lie in [0, " + std::to_string(hi) + "]");
            }
        };
        prob(p1, 1.0, "p1");
        prob(p2, 1.0, "p2");
        prob(readout_eps, 0.5, "readout_eps");
        if (!(t1 > 0.0)) {
            throw ConfigError("noise.t1", "must be positive");
        }
        if (!(gate_time_1q >= 0.0) || !std::isfinite(gate_time_1q)) {
            throw ConfigError("noise.gate_time_1q", "must be finite and >= 0");
        }
        if (!(gate_time_2q >= 0.0) || !std::isfinite(gate_time_2q)) {
            throw ConfigError("noise.gate_time_2q", "must be finite and >= 0");
        }
    }

    [[nodiscard]] double damping_gamma(std::size_t arity) const {
        const double t = arity == 2 ? gate_time_2q : gate_time_1q;
        if (std::isinf(t1) || t == 0.0) {
            return 0.0;
        }
        return 1.0 - std::exp(-t / t1);
    }

    /// True when the gate channels are all identity (readout may still be noisy).
    [[nodiscard]] bool gates_are_unitary() const {
        return p1 == 0.0 && p2 == 0.0 && damping_gamma(1) == 0.0 &&
               damping_gamma(2) == 0.0;
    }

    friend bool operator==(const NoiseSpec &, const NoiseSpec &) = default;
};

namespace detail {

inline std::size_t bit_mask(std::size_t n_qubits, std::size_t qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

/// All indices in [0, 2^n) whose bits under `mask` are zero, ascending.
inline std::vector<std::size_t> indices_with_cleared(std::size_t n_qubits,
                                                     std::size_t mask) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<std::size_t> out;
    out.reserve(dim >> std::popcount(mask));
    for (std::size_t s = 0; s < dim; ++s) {
        if ((s & mask) == 0) {
            out.push_back(s);
        }
    }
    return out;
}

inline std::atomic<std::uint64_t> &simulation_counter_storage() {
    static std::atomic<std::uint64_t> counter{0};
    return counter;
}

} // namespace detail

/// Number of full-circuit simulations performed by this process.
inline std::uint64_t simulation_count() {
    return detail::simulation_counter_storage().load();
}

class StateVector {
  public:
    StateVector() = default;

    /// |0...0>.
    explicit StateVector(std::size_t n_qubits)
        : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, Complex{0.0, 0.0}) {
        detail::require(n_qubits > 0 && n_qubits < 28, ErrorKind::Simulation,
                        "state vector qubit count out of range");
        amps_[0] = 1.0;
    }

    StateVector(std::size_t n_qubits, std::vector<Complex> amps)
        : n_qubits_(n_qubits), amps_(std::move(amps)) {
        detail::require(amps_.size() == (std::size_t{1} << n_qubits), ErrorKind::Sizing,
                        "amplitude count must be 2^n_qubits");
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<Complex> amplitudes() { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    void apply(const Gate &g) {
        if (g.arity() == 1) {
            apply_single(g);
        } else {
            apply_two(g);
        }
    }

  private:
    void apply_single(const Gate &g) {
        const std::size_t mask = detail::bit_mask(n_qubits_, g.qubits[0]);
        const std::size_t dim = amps_.size();
        if (g.kind == GateKind::RZ || g.kind == GateKind::PHASE) {
            const auto m = single_qubit_matrix(g);
            for (std::size_t s = 0; s < dim; ++s) {
                amps_[s] *= (s & mask) ? m[3] : m[0];
            }
            return;
        }
        const auto m = single_qubit_matrix(g);
        for (std::size_t s0 = 0; s0 < dim; ++s0) {
            if (s0 & mask) {
                continue;
            }
            const std::size_t s1 = s0 | mask;
            const Complex a0 = amps_[s0];
            const Complex a1 = amps_[s1];
            amps_[s0] = m[0] * a0 + m[1] * a1;
            amps_[s1] = m[2] * a0 + m[3] * a1;
        }
    }

    void apply_two(const Gate &g) {
        const std::size_t ma = detail::bit_mask(n_qubits_, g.qubits[0]);
        const std::size_t mb = detail::bit_mask(n_qubits_, g.qubits[1]);
        const std::size_t dim = amps_.size();
        if (g.kind == GateKind::CNOT) {
            for (std::size_t s = 0; s < dim; ++s) {
                if ((s & ma) && !(s & mb)) {
                    std::swap(amps_[s], amps_[s | mb]);
                }
            }
        } else {
            for (std::size_t s = 0; s < dim; ++s) {
                if ((s & ma) && (s & mb)) {
                    amps_[s] = -amps_[s];
                }
            }
        }
    }

    std::size_t n_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// Row-major 2^n x 2^n density matrix.
class DensityMatrix {
  public:
    DensityMatrix() = default;

    /// |0...0><0...0|.
    explicit DensityMatrix(std::size_t n_qubits)
        : n_qubits_(n_qubits), dim_(std::size_t{1} << n_qubits),
          data_(dim_ * dim_, Complex{0.0, 0.0}) {
        detail::require(n_qubits > 0 && n_qubits < 15, ErrorKind::Simulation,
                        "density matrix qubit count out of range");
        data_[0] = 1.0;
    }

    DensityMatrix(std::size_t n_qubits, std::vector<Complex> entries)
        : n_qubits_(n_qubits), dim_(std::size_t{1} << n_qubits), data_(std::move(entries)) {
        detail::require(data_.size() == dim_ * dim_, ErrorKind::Sizing,
                        "density matrix needs 4^n_qubits entries");
    }

    static DensityMatrix from_pure(const StateVector &psi) {
        const std::size_t d = psi.dim();
        std::vector<Complex> e(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                e[r * d + c] = psi[r] * std::conj(psi[c]);
            }
        }
        return {psi.n_qubits(), std::move(e)};
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const Complex &operator()(std::size_t r, std::size_t c) const {
        return data_[r * dim_ + c];
    }
    [[nodiscard]] Complex &operator()(std::size_t r, std::size_t c) {
        return data_[r * dim_ + c];
    }
    [[nodiscard]] std::span<const Complex> entries() const { return data_; }
    [[nodiscard]] std::span<Complex> entries() { return data_; }

    [[nodiscard]] Complex trace() const {
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < dim_; ++i) {
            t += data_[i * dim_ + i];
        }
        return t;
    }

    /// Max |rho - rho^dagger| entry.
    [[nodiscard]] double hermiticity_error() const {
        double err = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = r; c < dim_; ++c) {
                err = std::max(err, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
            }
        }
        return err;
    }

  private:
    std::size_t n_qubits_ = 0;
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

struct ProbDist {
    std::size_t n_qubits = 0;
    std::vector<double> probs;
};

/// Local (<= 2 qubit) completely positive map acting on row-major d x d
/// blocks, d = 2^k. Stored as its d^2 x d^2 superoperator on vec(M).
class LocalChannel {
  public:
    using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

    explicit LocalChannel(std::vector<std::size_t> qubits)
        : qubits_(std::move(qubits)), local_dim_(std::size_t{1} << qubits_.size()) {
        const auto n = static_cast<Eigen::Index>(local_dim_ * local_dim_);
        super_ = Mat::Identity(n, n);
    }

    [[nodiscard]] const std::vector<std::size_t> &qubits() const { return qubits_; }
    [[nodiscard]] const Mat &superoperator() const { return super_; }

    /// Position of a global qubit inside this block; local bit 0 is the high bit.
    [[nodiscard]] std::size_t local_index(std::size_t qubit) const {
        for (std::size_t k = 0; k < qubits_.size(); ++k) {
            if (qubits_[k] == qubit) {
                return k;
            }
        }
        detail::fail(ErrorKind::Simulation, "qubit not part of local channel");
    }

    /// Appends gate + its post-gate noise.
    void append_gate(const Gate &g, const NoiseSpec &noise) {
        Mat u = embed_unitary(g);
        compose([&u](const Mat &m) -> Mat { return u * m * u.adjoint(); });
        std::vector<std::size_t> touched;
        for (std::size_t k = 0; k < g.arity(); ++k) {
            touched.push_back(local_index(g.qubits[k]));
        }
        const double p = g.arity() == 2 ? noise.p2 : noise.p1;
        if (p > 0.0) {
            compose([&](const Mat &m) { return depolarize(m, touched, p); });
        }
        const double gamma = noise.damping_gamma(g.arity());
        if (gamma > 0.0) {
            for (std::size_t lq : touched) {
                compose([&](const Mat &m) { return amplitude_damp(m, lq, gamma); });
            }
        }
    }

    /// rho -> (1-p) rho + p * (I/2^k (x) Tr_k rho) on the listed local qubits.
    [[nodiscard]] Mat depolarize(const Mat &m, const std::vector<std::size_t> &local,
                                 double p) const {
        std::size_t sub_mask = 0;
        for (std::size_t lq : local) {
            sub_mask |= local_bit(lq);
        }
        const double k_dim = static_cast<double>(std::size_t{1} << local.size());
        Mat out = (1.0 - p) * m;
        const auto d = static_cast<std::size_t>(m.rows());
        // (I/2^k (x) Tr_sub m)[r, c] = delta(r_sub, c_sub) / 2^k * sum_j m[rest_r | j, rest_c | j]
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                if ((r & sub_mask) != (c & sub_mask)) {
                    continue;
                }
                Complex acc{0.0, 0.0};
                for (std::size_t j = 0; j < d; ++j) {
                    if ((j & ~sub_mask) != 0) {
                        continue;
                    }
                    acc += m(static_cast<Eigen::Index>((r & ~sub_mask) | j),
                             static_cast<Eigen::Index>((c & ~sub_mask) | j));
                }
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
                    p * acc / k_dim;
            }
        }
        return out;
    }

    /// Amplitude damping toward |0> on one local qubit.
    [[nodiscard]] Mat amplitude_damp(const Mat &m, std::size_t local, double gamma) const {
        const std::size_t b = local_bit(local);
        const double keep = std::sqrt(1.0 - gamma);
        const auto d = static_cast<std::size_t>(m.rows());
        Mat out = m;
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                const auto ri = static_cast<Eigen::Index>(r);
                const auto ci = static_cast<Eigen::Index>(c);
                const bool r1 = (r & b) != 0;
                const bool c1 = (c & b) != 0;
                if (r1 && c1) {
                    out(ri, ci) = (1.0 - gamma) * m(ri, ci);
                } else if (r1 || c1) {
                    out(ri, ci) = keep * m(ri, ci);
                } else {
                    out(ri, ci) = m(ri, ci) + gamma * m(static_cast<Eigen::Index>(r | b),
                                                        static_cast<Eigen::Index>(c | b));
                }
            }
        }
        return out;
    }

  private:
    [[nodiscard]] std::size_t local_bit(std::size_t local) const {
        return std::size_t{1} << (qubits_.size() - 1 - local);
    }

    [[nodiscard]] Mat embed_unitary(const Gate &g) const {
        const auto d = static_cast<Eigen::Index>(local_dim_);
        Mat u = Mat::Zero(d, d);
        if (g.arity() == 1) {
            const auto m = single_qubit_matrix(g);
            const std::size_t b = local_bit(local_index(g.qubits[0]));
            for (std::size_t r = 0; r < local_dim_; ++r) {
                for (std::size_t c = 0; c < local_dim_; ++c) {
                    if ((r & ~b) != (c & ~b)) {
                        continue;
                    }
                    const std::size_t ri = (r & b) ? 1 : 0;
                    const std::size_t ci = (c & b) ? 1 : 0;
                    u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        m[ri * 2 + ci];
                }
            }
            return u;
        }
        const auto m = two_qubit_matrix(g);
        const std::size_t b0 = local_bit(local_index(g.qubits[0]));
        const std::size_t b1 = local_bit(local_index(g.qubits[1]));
        auto sub = [&](std::size_t s) {
            return ((s & b0) ? 2U : 0U) | ((s & b1) ? 1U : 0U);
        };
        for (std::size_t r = 0; r < local_dim_; ++r) {
            for (std::size_t c = 0; c < local_dim_; ++c) {
                if ((r & ~(b0 | b1)) != (c & ~(b0 | b1))) {
                    continue;
                }
                u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    m[sub(r) * 4 + sub(c)];
            }
        }
        return u;
    }

    template <typename Map> void compose(Map &&map) {
        const auto d = static_cast<Eigen::Index>(local_dim_);
        const Eigen::Index n = d * d;
        Mat step(n, n);
        for (Eigen::Index col = 0; col < n; ++col) {
            Mat basis = Mat::Zero(d, d);
            basis(col / d, col % d) = 1.0;
            const Mat img = map(basis);
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = 0; c < d; ++c) {
                    step(r * d + c, col) = img(r, c);
                }
            }
        }
        super_ = step * super_;
    }

    std::vector<std::size_t> qubits_;
    std::size_t local_dim_;
    Mat super_;
};

/// Applies a local channel to every matching block of `rho`.
inline void apply_local_channel(DensityMatrix &rho, const LocalChannel &ch) {
    const std::size_t n = rho.n_qubits();
    const std::size_t dim = rho.dim();
    const auto &qs = ch.qubits();
    const std::size_t k = qs.size();
    const std::size_t ld = std::size_t{1} << k;
    std::vector<std::size_t> offsets(ld, 0);
    std::size_t mask = 0;
    for (std::size_t l = 0; l < ld; ++l) {
        for (std::size_t j = 0; j < k; ++j) {
            if (l & (std::size_t{1} << (k - 1 - j))) {
                offsets[l] |= detail::bit_mask(n, qs[j]);
            }
        }
    }
    for (std::size_t q : qs) {
        mask |= detail::bit_mask(n, q);
    }
    const std::vector<std::size_t> rest = detail::indices_with_cleared(n, mask);
    const auto n_rest = static_cast<Eigen::Index>(rest.size());
    const auto nloc = static_cast<Eigen::Index>(ld * ld);
    const LocalChannel::Mat &s = ch.superoperator();
    LocalChannel::Mat block(nloc, n_rest);
    LocalChannel::Mat result(nloc, n_rest);
    auto entries = rho.entries();
    for (std::size_t r0 : rest) {
        for (Eigen::Index ci = 0; ci < n_rest; ++ci) {
            const std::size_t c0 = rest[static_cast<std::size_t>(ci)];
            for (std::size_t lr = 0; lr < ld; ++lr) {
                const std::size_t row = (r0 | offsets[lr]) * dim;
                for (std::size_t lc = 0; lc < ld; ++lc) {
                    block(static_cast<Eigen::Index>(lr * ld + lc), ci) =
                        entries[row + (c0 | offsets[lc])];
                }
            }
        }
        result.noalias() = s * block;
        for (Eigen::Index ci = 0; ci < n_rest; ++ci) {
            const std::size_t c0 = rest[static_cast<std::size_t>(ci)];
            for (std::size_t lr = 0; lr < ld; ++lr) {
                const std::size_t row = (r0 | offsets[lr]) * dim;
                for (std::size_t lc = 0; lc < ld; ++lc) {
                    entries[row + (c0 | offsets[lc])] =
                        result(static_cast<Eigen::Index>(lr * ld + lc), ci);
                }
            }
        }
    }
}

namespace detail {

/// Greedy grouping of consecutive gates whose qubit union stays within two.
inline std::vector<LocalChannel> fuse_gates(std::span<const Gate> gates,
                                            const NoiseSpec &noise) {
    std::vector<LocalChannel> out;
    std::size_t i = 0;
    while (i < gates.size()) {
        std::vector<std::size_t> qs;
        std::size_t j = i;
        for (; j < gates.size(); ++j) {
            std::vector<std::size_t> merged = qs;
            for (std::size_t k = 0; k < gates[j].arity(); ++k) {
                if (std::find(merged.begin(), merged.end(), gates[j].qubits[k]) ==
                    merged.end()) {
                    merged.push_back(gates[j].qubits[k]);
                }
            }
            if (merged.size() > 2) {
                break;
            }
            qs = std::move(merged);
        }
        std::sort(qs.begin(), qs.end());
        LocalChannel ch(qs);
        for (std::size_t g = i; g < j; ++g) {
            ch.append_gate(gates[g], noise);
        }
        out.push_back(std::move(ch));
        i = j;
    }
    return out;
}

inline void apply_gates_noisy(DensityMatrix &rho, std::span<const Gate> gates,
                              const NoiseSpec &noise) {
    for (const LocalChannel &ch : fuse_gates(gates, noise)) {
        apply_local_channel(rho, ch);
    }
}

} // namespace detail

inline StateVector apply_circuit_pure(StateVector state, const Circuit &circuit) {
    detail::require(state.n_qubits() == circuit.n_qubits(), ErrorKind::Sizing,
                    "apply_circuit_pure: qubit-count mismatch");
    for (const Gate &g : circuit.gates()) {
        state.apply(g);
    }
    return state;
}

inline DensityMatrix apply_circuit_noisy(DensityMatrix rho, const Circuit &circuit,
                                         const NoiseSpec &noise) {
    detail::require(rho.n_qubits() == circuit.n_qubits(), ErrorKind::Sizing,
                    "apply_circuit_noisy: qubit-count mismatch");
    noise.validate();
    detail::apply_gates_noisy(rho, circuit.gates(), noise);
    return rho;
}

/// Per-qubit symmetric bit-flip confusion applied in place.
inline void apply_readout_noise(ProbDist &p, double eps) {
    if (eps == 0.0) {
        return;
    }
    const std::size_t dim = p.probs.size();
    for (std::size_t q = 0; q < p.n_qubits; ++q) {
        const std::size_t mask = detail::bit_mask(p.n_qubits, q);
        for (std::size_t s0 = 0; s0 < dim; ++s0) {
            if (s0 & mask) {
                continue;
            }
            const double a = p.probs[s0];
            const double b = p.probs[s0 | mask];
            p.probs[s0] = (1.0 - eps) * a + eps * b;
            p.probs[s0 | mask] = eps * a + (1.0 - eps) * b;
        }
    }
}

inline ProbDist probabilities(const StateVector &psi, const NoiseSpec *noise = nullptr) {
    ProbDist p{psi.n_qubits(), std::vector<double>(psi.dim())};
    for (std::size_t s = 0; s < psi.dim(); ++s) {
        p.probs[s] = std::norm(psi[s]);
    }
    if (noise != nullptr) {
        apply_readout_noise(p, noise->readout_eps);
    }
    return p;
}

inline ProbDist probabilities(const DensityMatrix &rho, const NoiseSpec *noise = nullptr) {
    ProbDist p{rho.n_qubits(), std::vector<double>(rho.dim())};
    for (std::size_t s = 0; s < rho.dim(); ++s) {
        // Tiny negative diagonals can appear from roundoff.
        p.probs[s] = std::max(0.0, rho(s, s).real());
    }
    if (noise != nullptr) {
        apply_readout_noise(p, noise->readout_eps);
    }
    return p;
}

/// <Z_i> = sum_s p(s) (-1)^{s_i}.
inline std::vector<double> z_expectations(const ProbDist &p) {
    std::vector<double> z(p.n_qubits, 0.0);
    for (std::size_t s = 0; s < p.probs.size(); ++s) {
        for (std::size_t q = 0; q < p.n_qubits; ++q) {
            z[q] += (s & detail::bit_mask(p.n_qubits, q)) ? -p.probs[s] : p.probs[s];
        }
    }
    return z;
}

/// Partial trace onto one qubit.
inline DensityMatrix reduced_single_qubit(const StateVector &psi, std::size_t qubit) {
    detail::require(qubit < psi.n_qubits(), ErrorKind::Sizing,
                    "reduced_single_qubit: qubit index out of range");
    const std::size_t mask = detail::bit_mask(psi.n_qubits(), qubit);
    double p0 = 0.0;
    double p1 = 0.0;
    Complex off{0.0, 0.0};
    for (std::size_t s = 0; s < psi.dim(); ++s) {
        if (s & mask) {
            p1 += std::norm(psi[s]);
        } else {
            p0 += std::norm(psi[s]);
            off += psi[s] * std::conj(psi[s | mask]);
        }
    }
    return DensityMatrix(1, {p0, off, std::conj(off), p1});
}

/// von Neumann entropy in bits of a 2x2 density matrix.
inline double single_qubit_entropy(const DensityMatrix &rho) {
    const double a = rho(0, 0).real();
    const double d = rho(1, 1).real();
    const double b = std::abs(rho(0, 1));
    const double mean = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    double h = 0.0;
    for (double lambda : {mean + rad, mean - rad}) {
        lambda = std::clamp(lambda, 0.0, 1.0);
        if (lambda > 0.0) {
            h -= lambda * std::log2(lambda);
        }
    }
    return h;
}

/// Mean single-qubit entanglement entropy (bits) of a pure state.
inline double entanglement_entropy_avg(const StateVector &psi) {
    double acc = 0.0;
    for (std::size_t q = 0; q < psi.n_qubits(); ++q) {
        acc += single_qubit_entropy(reduced_single_qubit(psi, q));
    }
    return acc / static_cast<double>(psi.n_qubits());
}

/// Simulates successive circuits from |0...0>, reusing the evolved state of
/// the longest gate prefix shared with the previous circuit.
///
/// Reservoir circuits start with a data-independent section; caching it
/// removes that cost from every step after the second.
class PrefixCachedSimulator {
  public:
    explicit PrefixCachedSimulator(NoiseSpec noise = {}, bool force_density = false)
        : noise_(noise), density_(force_density || !noise.gates_are_unitary()) {
        noise_.validate();
    }

    [[nodiscard]] bool uses_density_matrix() const { return density_; }
    [[nodiscard]] const NoiseSpec &noise() const { return noise_; }

    /// Outcome distribution (readout noise included). If `pure_out` is given
    /// and the pure path is active, receives the final state.
    ProbDist run(const Circuit &circuit, StateVector *pure_out = nullptr) {
        ++detail::simulation_counter_storage();
        const auto &gates = circuit.gates();
        std::size_t common = 0;
        if (last_.n_qubits() == circuit.n_qubits()) {
            const auto &prev = last_.gates();
            while (common < gates.size() && common < prev.size() &&
                   gates[common] == prev[common]) {
                ++common;
            }
        }
        const bool can_use_cache = cached_len_ > 0 && cached_len_ <= common &&
                                   cached_qubits_ == circuit.n_qubits();
        const std::size_t start = can_use_cache ? cached_len_ : 0;
        const bool snapshot = common > 0 && common != cached_len_ && common >= start;
        ProbDist p;
        if (density_) {
            DensityMatrix rho = can_use_cache ? cached_rho_ : DensityMatrix(circuit.n_qubits());
            if (snapshot) {
                detail::apply_gates_noisy(
                    rho, std::span<const Gate>(gates).subspan(start, common - start), noise_);
                cached_rho_ = rho;
                detail::apply_gates_noisy(rho, std::span<const Gate>(gates).subspan(common),
                                          noise_);
            } else {
                detail::apply_gates_noisy(rho, std::span<const Gate>(gates).subspan(start),
                                          noise_);
            }
            p = probabilities(rho, &noise_);
        } else {
            StateVector psi = can_use_cache ? cached_psi_ : StateVector(circuit.n_qubits());
            for (std::size_t i = start; i < gates.size(); ++i) {
                if (snapshot && i == common) {
                    cached_psi_ = psi;
                }
                psi.apply(gates[i]);
            }
            if (snapshot && common == gates.size()) {
                cached_psi_ = psi;
            }
            p = probabilities(psi, &noise_);
            if (pure_out != nullptr) {
                *pure_out = std::move(psi);
            }
        }
        if (snapshot) {
            cached_len_ = common;
            cached_qubits_ = circuit.n_qubits();
        }
        last_ = circuit;
        return p;
    }

  private:
    NoiseSpec noise_;
    bool density_;
    Circuit last_;
    std::size_t cached_len_ = 0;
    std::size_t cached_qubits_ = 0;
    StateVector cached_psi_;
    DensityMatrix cached_rho_;
};

} // namespace qrc
