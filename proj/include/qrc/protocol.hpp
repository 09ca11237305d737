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
 * Forecasting protocol shared by the CLI, the analysis drivers and the
 * acceptance suite: seeded Mackey-Glass data, train-only scaling, and the
 * end-to-end reservoir + readout run.
 *
 * Reservoir inputs are scaled to [0, pi]; classical inputs and every target
 * are scaled to [0, 1], so all reported MSEs share one scale.
 */
#pragma once

#include "qrc/error.hpp"
#include "qrc/hash.hpp"
#include "qrc/mackey_glass.hpp"
#include "qrc/readout.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/trace_store.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace qrc {

/// splitmix64 finalizer over (master, component name).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view component) {
    std::uint64_t z = master ^ Fnv1a().update(component).digest();
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Half-width of the seeded perturbation of the Mackey-Glass history value.
inline constexpr double kHistoryJitter = 0.1;

struct ForecastProtocol {
    MGConfig mg;
    std::size_t window_len = 20;
    std::size_t horizon = 20;
    std::size_t n_train = 3000;
    std::size_t n_test = 1000;
    std::size_t reservoir_washout = 0;  // leading train rows left out of the fit
    ReadoutKind readout_kind = ReadoutKind::Ridge;
    double readout_reg = kDefaultReadoutReg;

    void validate() const {
        mg.validate();
        if (window_len < 1) throw ConfigError("data.window_len", "must be positive");
        if (horizon < 1) throw ConfigError("data.horizon", "must be positive");
        if (n_train < 2) throw ConfigError("data.n_train", "must be >= 2");
        if (n_test < 1) throw ConfigError("data.n_test", "must be positive");
        if (reservoir_washout >= n_train) {
            throw ConfigError("readout.washout", "must be smaller than data.n_train");
        }
        if (!(readout_reg >= 0.0)) throw ConfigError("readout.reg", "must be >= 0");
    }
};

struct ForecastData {
    TimeSeries series;
    WindowedDataset quantum;    // inputs in [0, pi], targets in [0, 1]
    WindowedDataset classical;  // inputs and targets in [0, 1]
    std::size_t n_train = 0;

    [[nodiscard]] std::pair<WindowedDataset, WindowedDataset> classical_split() const {
        return split_train_test(classical, n_train);
    }
    [[nodiscard]] std::pair<WindowedDataset, WindowedDataset> quantum_split() const {
        return split_train_test(quantum, n_train);
    }
};

/// The seed perturbs the initial history within +-kHistoryJitter.
inline MGConfig seeded_mg(MGConfig mg, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, "mg.history"));
    mg.history_value += kHistoryJitter * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    return mg;
}

inline ForecastData prepare_forecast(const ForecastProtocol &p, std::uint64_t seed) {
    p.validate();
    ForecastData d;
    d.series = generate_mackey_glass(seeded_mg(p.mg, seed));
    const std::size_t rows = p.n_train + p.n_test;
    const std::size_t needed = rows + p.window_len + p.horizon - 1;
    if (d.series.values.size() < needed) {
        throw ConfigError("mg.n_samples", "series yields " + std::to_string(d.series.values.size()) +
                                              " samples after washout, protocol needs " +
                                              std::to_string(needed));
    }
    const std::span<const double> used(d.series.values.data(), needed);
    // Samples touched by the training rows (inputs and targets).
    const std::span<const double> train_part = used.first(p.n_train + p.window_len + p.horizon - 1);
    const Scaler to_angle = fit_scaler(train_part, 0.0, std::numbers::pi);
    const Scaler to_unit = fit_scaler(train_part, 0.0, 1.0);
    d.quantum = make_windows(used, p.window_len, p.horizon);
    d.classical = d.quantum;
    d.quantum.inputs = d.quantum.inputs.unaryExpr([&](double v) { return to_angle.transform(v); });
    d.classical.inputs = d.classical.inputs.unaryExpr([&](double v) { return to_unit.transform(v); });
    d.quantum.targets = d.quantum.targets.unaryExpr([&](double v) { return to_unit.transform(v); });
    d.classical.targets = d.quantum.targets;
    d.n_train = p.n_train;
    return d;
}

struct ForecastResult {
    Metrics train;
    Metrics test;
    Eigen::VectorXd test_targets;
    Eigen::VectorXd test_predictions;
    ReadoutModel model;
    std::vector<double> per_step_entropy;
};

/// Fits the readout on a trace covering train rows followed by test rows.
inline ForecastResult fit_forecast(const ReservoirTrace &trace, const ForecastProtocol &p,
                                   std::size_t n_train) {
    const auto wo = static_cast<Eigen::Index>(p.reservoir_washout);
    const auto nt = static_cast<Eigen::Index>(n_train);
    const Eigen::Index n_test = trace.features.rows() - nt;
    detail::require(n_test > 0 && nt > wo, ErrorKind::Sizing, "fit_forecast: bad split");
    const Eigen::MatrixXd x_train = trace.features.middleRows(wo, nt - wo);
    const Eigen::VectorXd y_train = trace.targets.segment(wo, nt - wo);
    ForecastResult r;
    r.model = fit(p.readout_kind, x_train, y_train, p.readout_reg);
    r.train = mse(y_train, predict(r.model, x_train));
    r.test_targets = trace.targets.tail(n_test);
    r.test_predictions = predict(r.model, trace.features.bottomRows(n_test));
    r.test = mse(r.test_targets, r.test_predictions);
    r.per_step_entropy = trace.per_step_entropy;
    return r;
}

/// End-to-end reservoir forecast; traces go through `cache` when given.
inline ForecastResult qrc_forecast(ReservoirConfig cfg, const ForecastProtocol &p,
                                   const ForecastData &d, TraceCache *cache = nullptr) {
    cfg.horizon = p.horizon;
    const ReservoirTrace trace =
        cache != nullptr ? cache->get_or_run(cfg, d.quantum) : run_reservoir(cfg, d.quantum);
    return fit_forecast(trace, p, d.n_train);
}

} // namespace qrc
