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
 * Feedback-driven quantum reservoir: at step t the circuit
 * U^dagger(pad(z_{t-1})) U(x_t) is simulated from |0...0>, the leading
 * floor(lambda 2^n) outcome probabilities become the regression features, and
 * the scaled feedback z_t is derived from the same distribution.
 */
#pragma once

#include "qrc/error.hpp"
#include "qrc/feature_maps.hpp"
#include "qrc/hash.hpp"
#include "qrc/mackey_glass.hpp"
#include "qrc/quantum.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class FeedbackMode {
    Expectation,  ///< z = alpha * <Z_i>, one entry per qubit
    FullState,    ///< z = alpha * (p(s_1), ..., p(s_F)), F = window length
};

inline std::string_view to_string(FeedbackMode m) {
    return m == FeedbackMode::Expectation ? "expectation" : "full_state";
}

inline FeedbackMode feedback_mode_from_string(std::string_view s) {
    if (s == "expectation") return FeedbackMode::Expectation;
    if (s == "full_state") return FeedbackMode::FullState;
    throw ConfigError("reservoir.feedback_mode",
                      "unknown mode '" + std::string(s) + "' (expected expectation or full_state)");
}

struct ReservoirConfig {
    FeatureMapSpec fmap;
    std::size_t horizon = 20;
    double alpha = 0.79;
    double lambda_frac = 1.0;
    FeedbackMode feedback_mode = FeedbackMode::Expectation;
    std::optional<NoiseSpec> noise;
    std::vector<double> initial_feedback;  // empty means zeros
    bool record_entropy = false;

    [[nodiscard]] std::size_t window_len() const { return fmap.n_features; }
    [[nodiscard]] std::size_t n_qubits() const { return fmap.n_qubits(); }

    [[nodiscard]] std::size_t feature_count() const {
        const double full = std::ldexp(1.0, static_cast<int>(n_qubits()));
        return static_cast<std::size_t>(std::floor(lambda_frac * full + 1e-9));
    }

    [[nodiscard]] std::size_t feedback_dim() const {
        return feedback_mode == FeedbackMode::Expectation ? n_qubits() : window_len();
    }

    void validate() const {
        fmap.validate();
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw ConfigError("reservoir.alpha", "must lie in [0, 1]");
        }
        if (!(lambda_frac > 0.0 && lambda_frac <= 1.0)) {
            throw ConfigError("reservoir.lambda", "must lie in (0, 1]");
        }
        if (feature_count() < 1) {
            throw ConfigError("reservoir.lambda", "keeps no features for this qubit count");
        }
        if (horizon < 1) {
            throw ConfigError("reservoir.horizon", "must be positive");
        }
        if (noise) {
            noise->validate();
        }
        if (!initial_feedback.empty() && initial_feedback.size() != feedback_dim()) {
            throw ConfigError("reservoir.initial_feedback",
                              "needs " + std::to_string(feedback_dim()) + " entries");
        }
        if (record_entropy && noise && !noise->gates_are_unitary()) {
            throw ConfigError("reservoir.record_entropy", "only available on the pure path");
        }
    }

    /// Deterministic text form; the cache key is derived from it.
    [[nodiscard]] std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "fmap=" << to_string(fmap.kind) << ";F=" << fmap.n_features
           << ";reps=" << fmap.reps << ";thetas=";
        for (double t : fmap.thetas) os << t << ',';
        os << ";horizon=" << horizon << ";alpha=" << alpha << ";lambda=" << lambda_frac
           << ";mode=" << to_string(feedback_mode) << ";noise=";
        if (noise) {
            os << noise->p1 << ',' << noise->p2 << ',' << noise->readout_eps << ',' << noise->t1
               << ',' << noise->gate_time_1q << ',' << noise->gate_time_2q;
        } else {
            os << "none";
        }
        os << ";z0=";
        for (double z : initial_feedback) os << z << ',';
        os << ";entropy=" << record_entropy;
        return os.str();
    }
};

struct ReservoirTrace {
    Eigen::MatrixXd features;          // T x floor(lambda 2^n)
    Eigen::VectorXd targets;           // T
    Eigen::MatrixXd feedback_history;  // T x feedback_dim, row t = z_t
    std::vector<double> per_step_entropy;

    [[nodiscard]] std::size_t steps() const { return static_cast<std::size_t>(features.rows()); }

    /// Leading `n_cols` feature columns (prefix property of lambda truncation).
    [[nodiscard]] ReservoirTrace truncated(std::size_t n_cols) const {
        ReservoirTrace t = *this;
        t.features = features.leftCols(static_cast<Eigen::Index>(n_cols));
        return t;
    }
};

struct StepResult {
    std::vector<double> features;
    std::vector<double> feedback;
    ProbDist probs;
    std::optional<double> entropy;
};

namespace detail {

inline PrefixCachedSimulator make_simulator(const ReservoirConfig &cfg) {
    return PrefixCachedSimulator(cfg.noise.value_or(NoiseSpec{}));
}

inline StepResult reservoir_step_with(const ReservoirConfig &cfg, PrefixCachedSimulator &sim,
                                      std::span<const double> x_window,
                                      std::span<const double> z_prev) {
    if (z_prev.size() != cfg.feedback_dim()) {
        throw Error(ErrorKind::Sizing, "reservoir_step: feedback has " +
                                           std::to_string(z_prev.size()) + " entries, expected " +
                                           std::to_string(cfg.feedback_dim()));
    }
    const Circuit circuit = composite_circuit(cfg.fmap, x_window, z_prev);
    StepResult out;
    StateVector psi;
    const bool want_state = cfg.record_entropy && !sim.uses_density_matrix();
    out.probs = sim.run(circuit, want_state ? &psi : nullptr);
    if (want_state) {
        out.entropy = entanglement_entropy_avg(psi);
    }
    const std::size_t m = cfg.feature_count();
    out.features.assign(out.probs.probs.begin(),
                        out.probs.probs.begin() + static_cast<std::ptrdiff_t>(m));
    if (cfg.feedback_mode == FeedbackMode::Expectation) {
        out.feedback = z_expectations(out.probs);
    } else {
        out.feedback.assign(out.probs.probs.begin(),
                            out.probs.probs.begin() +
                                static_cast<std::ptrdiff_t>(cfg.window_len()));
    }
    for (double &z : out.feedback) {
        z *= cfg.alpha;
    }
    return out;
}

inline std::vector<double> initial_feedback_of(const ReservoirConfig &cfg) {
    return cfg.initial_feedback.empty() ? std::vector<double>(cfg.feedback_dim(), 0.0)
                                        : cfg.initial_feedback;
}

inline std::vector<double> row_of(const Eigen::MatrixXd &m, Eigen::Index r) {
    std::vector<double> out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out[static_cast<std::size_t>(c)] = m(r, c);
    }
    return out;
}

} // namespace detail

/// One reservoir step from a fresh simulator.
inline StepResult reservoir_step(const ReservoirConfig &cfg, std::span<const double> x_window,
                                 std::span<const double> z_prev) {
    cfg.validate();
    auto sim = detail::make_simulator(cfg);
    return detail::reservoir_step_with(cfg, sim, x_window, z_prev);
}

/// Runs the feedback loop over every row of `ds` in order.
inline ReservoirTrace run_reservoir(const ReservoirConfig &cfg, const WindowedDataset &ds) {
    cfg.validate();
    if (ds.window_len != cfg.window_len() ||
        static_cast<std::size_t>(ds.inputs.cols()) != cfg.window_len()) {
        throw Error(ErrorKind::Sizing, "run_reservoir: dataset window " +
                                           std::to_string(ds.inputs.cols()) +
                                           " does not match feature count " +
                                           std::to_string(cfg.window_len()));
    }
    const auto rows = static_cast<Eigen::Index>(ds.rows());
    ReservoirTrace trace;
    trace.features.resize(rows, static_cast<Eigen::Index>(cfg.feature_count()));
    trace.targets = ds.targets;
    trace.feedback_history.resize(rows, static_cast<Eigen::Index>(cfg.feedback_dim()));
    auto sim = detail::make_simulator(cfg);
    std::vector<double> z = detail::initial_feedback_of(cfg);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const std::vector<double> x = detail::row_of(ds.inputs, t);
        StepResult step = detail::reservoir_step_with(cfg, sim, x, z);
        for (std::size_t j = 0; j < step.features.size(); ++j) {
            trace.features(t, static_cast<Eigen::Index>(j)) = step.features[j];
        }
        for (std::size_t j = 0; j < step.feedback.size(); ++j) {
            trace.feedback_history(t, static_cast<Eigen::Index>(j)) = step.feedback[j];
        }
        if (step.entropy) {
            trace.per_step_entropy.push_back(*step.entropy);
        }
        z = std::move(step.feedback);
    }
    return trace;
}

/// d[0] = |init_a - init_b|, d[t] = |z_t^a - z_t^b| for t = 1..T.
inline std::vector<double> esp_distance_series(ReservoirConfig cfg, const WindowedDataset &ds,
                                               std::span<const double> init_a,
                                               std::span<const double> init_b) {
    if (init_a.size() != cfg.feedback_dim() || init_b.size() != cfg.feedback_dim()) {
        throw Error(ErrorKind::Sizing, "esp_distance_series: initial feedback length must be " +
                                           std::to_string(cfg.feedback_dim()));
    }
    cfg.record_entropy = false;
    cfg.lambda_frac = 1.0;
    ReservoirConfig cfg_a = cfg;
    ReservoirConfig cfg_b = cfg;
    cfg_a.initial_feedback.assign(init_a.begin(), init_a.end());
    cfg_b.initial_feedback.assign(init_b.begin(), init_b.end());
    const ReservoirTrace ta = run_reservoir(cfg_a, ds);
    const ReservoirTrace tb = run_reservoir(cfg_b, ds);
    std::vector<double> d;
    d.reserve(ds.rows() + 1);
    double d0 = 0.0;
    for (std::size_t i = 0; i < init_a.size(); ++i) {
        d0 += (init_a[i] - init_b[i]) * (init_a[i] - init_b[i]);
    }
    d.push_back(std::sqrt(d0));
    for (Eigen::Index t = 0; t < ta.feedback_history.rows(); ++t) {
        d.push_back((ta.feedback_history.row(t) - tb.feedback_history.row(t)).norm());
    }
    return d;
}

} // namespace qrc
