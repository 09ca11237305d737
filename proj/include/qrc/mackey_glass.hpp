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
 * Mackey-Glass series generation, scaling and supervised windowing.
 */
#pragma once

#include "qrc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qrc {

/// dx/dt = b x(t - delay) / (1 + x(t - delay)^n_exp) - c x(t)
struct MGConfig {
    double b = 0.2;
    double c = 0.1;
    double n_exp = 10.0;
    double mg_delay = 17.0;
    double dt = 0.1;
    std::size_t sample_stride = 10;
    std::size_t n_samples = 6000;
    double history_value = 1.2;
    std::size_t washout_steps = 1000;  // in kept samples

    void validate() const {
        if (!(b > 0.0)) throw ConfigError("mg.b", "must be positive");
        if (!(c > 0.0)) throw ConfigError("mg.c", "must be positive");
        if (!(dt > 0.0)) throw ConfigError("mg.dt", "must be positive");
        if (!(n_exp >= 1.0)) throw ConfigError("mg.n_exp", "must be >= 1");
        if (!(mg_delay >= 0.0)) throw ConfigError("mg.delay", "must be >= 0");
        if (sample_stride == 0) throw ConfigError("mg.sample_stride", "must be positive");
        if (n_samples <= washout_steps) {
            throw ConfigError("mg.n_samples", "must exceed mg.washout_steps");
        }
        const double ratio = mg_delay / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("mg.delay", "must be an integer multiple of mg.dt");
        }
    }
};

struct TimeSeries {
    std::vector<double> values;
    double dt_effective = 1.0;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Classical RK4 with the delayed term frozen at its buffered value across
/// the four stages. A zero delay degenerates to the plain ODE.
inline TimeSeries generate_mackey_glass(const MGConfig &cfg) {
    cfg.validate();
    const auto lag = static_cast<std::size_t>(std::llround(cfg.mg_delay / cfg.dt));
    const std::size_t total_steps = (cfg.n_samples - 1) * cfg.sample_stride;
    auto rhs = [&cfg](double x, double x_lag) {
        return cfg.b * x_lag / (1.0 + std::pow(x_lag, cfg.n_exp)) - cfg.c * x;
    };

    // Ring buffer of the last `lag` states; slot k % lag holds x_k.
    std::vector<double> ring(std::max<std::size_t>(lag, 1), cfg.history_value);
    TimeSeries out;
    out.dt_effective = cfg.dt * static_cast<double>(cfg.sample_stride);
    out.values.reserve(cfg.n_samples - cfg.washout_steps);

    double x = cfg.history_value;
    for (std::size_t step = 0;; ++step) {
        if (step % cfg.sample_stride == 0) {
            const std::size_t sample = step / cfg.sample_stride;
            if (sample >= cfg.washout_steps) {
                out.values.push_back(x);
            }
        }
        if (step == total_steps) {
            break;
        }
        double x_next = 0.0;
        if (lag == 0) {
            const double k1 = rhs(x, x);
            const double x2 = x + 0.5 * cfg.dt * k1;
            const double k2 = rhs(x2, x2);
            const double x3 = x + 0.5 * cfg.dt * k2;
            const double k3 = rhs(x3, x3);
            const double x4 = x + cfg.dt * k3;
            const double k4 = rhs(x4, x4);
            x_next = x + cfg.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            // x_{step - lag}; before t = 0 the buffer still holds the history.
            const double x_lag = ring[step % lag];
            const double k1 = rhs(x, x_lag);
            const double k2 = rhs(x + 0.5 * cfg.dt * k1, x_lag);
            const double k3 = rhs(x + 0.5 * cfg.dt * k2, x_lag);
            const double k4 = rhs(x + cfg.dt * k3, x_lag);
            x_next = x + cfg.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ring[step % lag] = x;
        }
        if (!std::isfinite(x_next)) {
            throw Error(ErrorKind::Diverged,
                        "Mackey-Glass integration diverged at step " + std::to_string(step + 1));
        }
        x = x_next;
    }
    return out;
}

/// Affine map [observed_min, observed_max] -> [target_lo, target_hi].
struct Scaler {
    double observed_min = 0.0;
    double observed_max = 1.0;
    double target_lo = 0.0;
    double target_hi = 1.0;

    [[nodiscard]] double transform(double v) const {
        return target_lo + (v - observed_min) * (target_hi - target_lo) /
                               (observed_max - observed_min);
    }
    [[nodiscard]] double inverse(double v) const {
        return observed_min + (v - target_lo) * (observed_max - observed_min) /
                                  (target_hi - target_lo);
    }
    [[nodiscard]] std::vector<double> transform(std::span<const double> v) const {
        std::vector<double> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [this](double a) { return transform(a); });
        return out;
    }
};

inline Scaler fit_scaler(std::span<const double> values, double target_lo, double target_hi) {
    if (values.size() < 2) {
        throw Error(ErrorKind::Sizing, "fit_scaler needs at least two samples");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > *lo)) {
        throw Error(ErrorKind::DegenerateScale, "fit_scaler: constant series");
    }
    return {*lo, *hi, target_lo, target_hi};
}

inline Scaler fit_scaler(const TimeSeries &series, double target_lo, double target_hi) {
    return fit_scaler(series.values, target_lo, target_hi);
}

/// Row i is samples[i .. i+window_len-1]; target i is
/// samples[i + window_len - 1 + horizon].
struct WindowedDataset {
    Eigen::MatrixXd inputs;
    Eigen::VectorXd targets;
    std::size_t window_len = 0;
    std::size_t horizon = 0;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(inputs.rows()); }
};

inline WindowedDataset make_windows(std::span<const double> samples, std::size_t window_len,
                                    std::size_t horizon) {
    if (window_len == 0 || horizon == 0) {
        throw Error(ErrorKind::Sizing, "make_windows: window and horizon must be positive");
    }
    if (samples.size() <= window_len + horizon - 1) {
        throw Error(ErrorKind::Sizing, "make_windows: series of length " +
                                           std::to_string(samples.size()) +
                                           " too short for window " + std::to_string(window_len) +
                                           " and horizon " + std::to_string(horizon));
    }
    const std::size_t rows = samples.size() - window_len - horizon + 1;
    WindowedDataset ds;
    ds.window_len = window_len;
    ds.horizon = horizon;
    ds.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(window_len));
    ds.targets.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < window_len; ++j) {
            ds.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = samples[i + j];
        }
        ds.targets(static_cast<Eigen::Index>(i)) = samples[i + window_len - 1 + horizon];
    }
    return ds;
}

inline WindowedDataset make_windows(const TimeSeries &series, std::size_t window_len,
                                    std::size_t horizon) {
    return make_windows(series.values, window_len, horizon);
}

/// Rows [begin, begin + count).
inline WindowedDataset slice_rows(const WindowedDataset &ds, std::size_t begin, std::size_t count) {
    WindowedDataset out;
    out.window_len = ds.window_len;
    out.horizon = ds.horizon;
    out.inputs = ds.inputs.middleRows(static_cast<Eigen::Index>(begin),
                                      static_cast<Eigen::Index>(count));
    out.targets = ds.targets.segment(static_cast<Eigen::Index>(begin),
                                     static_cast<Eigen::Index>(count));
    return out;
}

/// Chronological split, no shuffling.
inline std::pair<WindowedDataset, WindowedDataset> split_train_test(const WindowedDataset &ds,
                                                                    std::size_t n_train) {
    if (n_train == 0 || n_train >= ds.rows()) {
        throw Error(ErrorKind::Sizing, "split_train_test: n_train " + std::to_string(n_train) +
                                           " outside (0, " + std::to_string(ds.rows()) + ")");
    }
    return {slice_rows(ds, 0, n_train), slice_rows(ds, n_train, ds.rows() - n_train)};
}

/// `t,value` header then one row per sample, 17 significant digits.
inline void write_series_csv(const std::string &path, const TimeSeries &series) {
    std::ofstream os(path);
    if (!os) {
        throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    }
    os << "t,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        os << static_cast<double>(i) * series.dt_effective << ',' << series.values[i] << '\n';
    }
    if (!os) {
        throw Error(ErrorKind::Io, "failed writing " + path);
    }
}

inline TimeSeries read_series_csv(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(is, line) || line != "t,value") {
        throw Error(ErrorKind::Io, path + ": expected header 't,value'");
    }
    TimeSeries out;
    std::vector<double> times;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": missing comma");
        }
        try {
            times.push_back(std::stod(line.substr(0, comma)));
            out.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception &) {
            throw Error(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    if (times.size() >= 2) {
        out.dt_effective = times[1] - times[0];
    }
    return out;
}

} // namespace qrc
