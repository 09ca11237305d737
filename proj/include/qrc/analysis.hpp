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
 * Diagnostic drivers: linear memory capacity, parameter sweeps (theta,
 * noise, alpha / lambda), the delay x horizon grid, and the classical
 * baseline suite. Sweep points run on a small worker pool and are stored by
 * grid index, so results never depend on completion order.
 */
#pragma once

#include "qrc/baselines.hpp"
#include "qrc/error.hpp"
#include "qrc/protocol.hpp"
#include "qrc/readout.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/trace_store.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qrc {

// ---------------------------------------------------------------------------
// Worker pool

/// Calls fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware count).
/// The first exception thrown by any call is rethrown after all workers stop.
template <typename Fn> void parallel_for_index(std::size_t n, std::size_t jobs, Fn &&fn) {
    if (jobs == 0) {
        jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n && !stop; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        const std::lock_guard lock(error_mutex);
                        if (!first_error) {
                            first_error = std::current_exception();
                        }
                        stop = true;
                    }
                }
            });
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

// ---------------------------------------------------------------------------
// Small statistics helpers

inline double median(std::vector<double> v) {
    detail::require(!v.empty(), ErrorKind::Sizing, "median of an empty list");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Average ranks (ties share the mean rank).
inline std::vector<double> ranks(const std::vector<double> &v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double> &a, const std::vector<double> &b) {
    detail::require(a.size() == b.size() && a.size() >= 2, ErrorKind::Sizing,
                    "pearson: need two equal-length lists of >= 2 values");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double> &a, const std::vector<double> &b) {
    return pearson(ranks(a), ranks(b));
}

// ---------------------------------------------------------------------------
// Memory capacity

struct MemoryCapacityOptions {
    std::size_t seq_len = 4000;
    std::size_t washout = 100;
    std::size_t k_max = 20;
    double train_fraction = 0.7;
    double reg = kDefaultReadoutReg;
    std::uint64_t seed = 1;

    void validate() const {
        if (k_max < 1) throw ConfigError("memory.k_max", "must be positive");
        if (washout < k_max) throw ConfigError("memory.washout", "must be >= memory.k_max");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
            throw ConfigError("memory.train_fraction", "must lie in (0, 1)");
        }
        if (seq_len < 10 * k_max) throw ConfigError("memory.seq_len", "must be >= 10 k_max");
    }
};

struct MemoryCapacityResult {
    std::vector<double> per_delay;  // MC_k for k = 1..k_max
    double total = 0.0;
};

/// cov(a, b)^2 / (var(a) var(b)); zero when either side is constant.
inline double squared_correlation(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double vab = (da * db).sum();
    const double vaa = da.square().sum();
    const double vbb = db.square().sum();
    if (vaa == 0.0 || vbb == 0.0) {
        return 0.0;
    }
    return vab * vab / (vaa * vbb);
}

/// Row t of `features` was driven by input u[t]. Uses rows [skip, T): the
/// first `train_fraction` of them fit one ridge model per delay k, the rest
/// score MC_k = corr^2(u[t-k], prediction), clamped to [0, 1].
inline MemoryCapacityResult memory_capacity_from_features(const Eigen::MatrixXd &features,
                                                          const Eigen::VectorXd &u,
                                                          std::size_t k_max, std::size_t skip,
                                                          double train_fraction, double reg) {
    detail::require(features.rows() == u.size(), ErrorKind::Sizing,
                    "memory capacity: feature rows and inputs differ");
    detail::require(skip >= k_max && static_cast<Eigen::Index>(skip) < u.size(), ErrorKind::Sizing,
                    "memory capacity: skip must cover k_max and leave rows");
    const auto s = static_cast<Eigen::Index>(skip);
    const Eigen::Index used = features.rows() - s;
    const auto n_train = static_cast<Eigen::Index>(std::floor(train_fraction * static_cast<double>(used)));
    const Eigen::Index n_eval = used - n_train;
    detail::require(n_train >= 2 && n_eval >= 2, ErrorKind::Sizing,
                    "memory capacity: too few rows for the split");
    const auto km = static_cast<Eigen::Index>(k_max);
    Eigen::MatrixXd y(used, km);
    for (Eigen::Index k = 1; k <= km; ++k) {
        y.col(k - 1) = u.segment(s - k, used);
    }
    const Eigen::VectorXd probe = u.segment(s, used);
    const double mean = probe.mean();
    if ((probe.array() - mean).square().sum() == 0.0) {
        throw Error(ErrorKind::DegenerateScale, "memory capacity: constant input signal");
    }
    const Eigen::MatrixXd x = features.bottomRows(used);
    const auto models = fit_ridge_multi(x.topRows(n_train), y.topRows(n_train), reg);
    const Eigen::MatrixXd x_eval = x.bottomRows(n_eval);
    MemoryCapacityResult r;
    for (Eigen::Index k = 0; k < km; ++k) {
        const Eigen::VectorXd pred = predict(models[static_cast<std::size_t>(k)], x_eval);
        const double mc = std::clamp(squared_correlation(y.col(k).tail(n_eval), pred), 0.0, 1.0);
        r.per_delay.push_back(mc);
        r.total += mc;
    }
    return r;
}

/// Drives the reservoir with i.i.d. uniform(0, 1) inputs, windowed like the
/// forecasting task and scaled to [0, pi] for the encoder.
inline MemoryCapacityResult memory_capacity(ReservoirConfig cfg, const MemoryCapacityOptions &opt) {
    opt.validate();
    cfg.record_entropy = false;
    const std::size_t w = cfg.window_len();
    const std::size_t rows = opt.washout + opt.seq_len;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> raw(rows + w - 1);
    for (double &v : raw) {
        v = unit(rng);
    }
    WindowedDataset ds;
    ds.window_len = w;
    ds.horizon = cfg.horizon;
    ds.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(w));
    ds.targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
    Eigen::VectorXd u(static_cast<Eigen::Index>(rows));
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t j = 0; j < w; ++j) {
            ds.inputs(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
                std::numbers::pi * raw[t + j];
        }
        u(static_cast<Eigen::Index>(t)) = raw[t + w - 1];
    }
    const ReservoirTrace trace = run_reservoir(cfg, ds);
    return memory_capacity_from_features(trace.features, u, opt.k_max, opt.washout,
                                         opt.train_fraction, opt.reg);
}

// ---------------------------------------------------------------------------
// Sweep results

struct SweepResult {
    std::string axis;
    std::vector<double> grid;
    std::vector<double> mse;
    std::map<std::string, std::vector<double>> aux;
    nlohmann::json config = nlohmann::json::object();

    /// Equal lengths; grid non-decreasing (repeated values are allowed).
    void validate() const {
        detail::require(mse.size() == grid.size(), ErrorKind::Sizing, "sweep: mse length differs");
        for (const auto &[name, values] : aux) {
            detail::require(values.size() == grid.size(), ErrorKind::Sizing,
                            "sweep: aux '" + name + "' length differs");
        }
        detail::require(std::is_sorted(grid.begin(), grid.end()), ErrorKind::Config,
                        "sweep: grid must be ordered");
    }

    [[nodiscard]] std::size_t argmin() const {
        return static_cast<std::size_t>(std::min_element(mse.begin(), mse.end()) - mse.begin());
    }
};

inline nlohmann::json to_json(const SweepResult &r) {
    return {{"config", r.config}, {"axis", r.axis}, {"grid", r.grid}, {"mse", r.mse}, {"aux", r.aux}};
}

inline SweepResult sweep_from_json(const nlohmann::json &j) {
    SweepResult r;
    r.config = j.at("config");
    r.axis = j.at("axis").get<std::string>();
    r.grid = j.at("grid").get<std::vector<double>>();
    r.mse = j.at("mse").get<std::vector<double>>();
    r.aux = j.at("aux").get<std::map<std::string, std::vector<double>>>();
    r.validate();
    return r;
}

/// One row per grid point: axis value, mse, then aux columns by name.
inline std::string to_csv(const SweepResult &r) {
    std::ostringstream os;
    os.precision(17);
    os << r.axis << ",mse";
    for (const auto &kv : r.aux) {
        os << ',' << kv.first;
    }
    os << '\n';
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        os << r.grid[i] << ',' << r.mse[i];
        for (const auto &kv : r.aux) {
            os << ',' << kv.second[i];
        }
        os << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto tmp = detail::temp_sibling(path);
    {
        std::ofstream os(tmp, std::ios::binary);
        os << text;
        if (!os) {
            throw Error(ErrorKind::Io, "failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

/// Writes `<stem>.json` and `<stem>.csv`.
inline void save_sweep(const std::filesystem::path &json_path, const SweepResult &r) {
    write_text_file(json_path, to_json(r).dump(2) + "\n");
    auto csv = json_path;
    csv.replace_extension(".csv");
    write_text_file(csv, to_csv(r));
}

/// Returns the stored result when `json_path` already holds a sweep with the
/// same embedded config; otherwise computes, saves and returns it.
template <typename Compute>
SweepResult resumable_sweep(const std::filesystem::path &json_path, const nlohmann::json &config,
                            Compute &&compute) {
    if (std::filesystem::exists(json_path)) {
        try {
            std::ifstream is(json_path);
            SweepResult stored = sweep_from_json(nlohmann::json::parse(is));
            if (stored.config == config) {
                return stored;
            }
        } catch (const std::exception &) {
            // unreadable or stale, recompute
        }
    }
    SweepResult r = compute();
    r.config = config;
    save_sweep(json_path, r);
    return r;
}

inline nlohmann::json protocol_json(const ForecastProtocol &p, std::uint64_t seed) {
    return {{"mg",
             {{"b", p.mg.b},
              {"c", p.mg.c},
              {"n_exp", p.mg.n_exp},
              {"delay", p.mg.mg_delay},
              {"dt", p.mg.dt},
              {"sample_stride", p.mg.sample_stride},
              {"n_samples", p.mg.n_samples},
              {"history_value", p.mg.history_value},
              {"washout_steps", p.mg.washout_steps}}},
            {"window_len", p.window_len},
            {"horizon", p.horizon},
            {"n_train", p.n_train},
            {"n_test", p.n_test},
            {"reservoir_washout", p.reservoir_washout},
            {"readout", to_string(p.readout_kind)},
            {"readout_reg", p.readout_reg},
            {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepContext {
    ForecastProtocol protocol;
    std::uint64_t seed = 1;
    std::size_t jobs = 0;
    TraceCache *cache = nullptr;
};

inline nlohmann::json sweep_config(const ReservoirConfig &cfg, const SweepContext &ctx) {
    return {{"reservoir", cfg.canonical()}, {"protocol", protocol_json(ctx.protocol, ctx.seed)}};
}

/// Overrides thetas[theta_index] per grid value and records test MSE, mean
/// per-step entanglement entropy and memory capacity.
inline SweepResult theta_sweep(ReservoirConfig cfg, std::size_t theta_index,
                               const std::vector<double> &grid, const SweepContext &ctx,
                               MemoryCapacityOptions mc = {}) {
    if (theta_index >= cfg.fmap.thetas.size()) {
        throw ConfigError("sweep.theta_index", "must lie in 0..5");
    }
    for (double v : grid) {
        if (!(std::abs(v) <= std::numbers::pi / 2.0)) {
            throw ConfigError("sweep.grid", "theta values must lie in [-pi/2, pi/2]");
        }
    }
    cfg.record_entropy = true;
    cfg.validate();
    const ForecastData data = prepare_forecast(ctx.protocol, ctx.seed);
    SweepResult r;
    r.axis = "theta" + std::to_string(theta_index + 1);
    r.grid = grid;
    r.mse.resize(grid.size());
    std::vector<double> entropy(grid.size());
    std::vector<double> capacity(grid.size());
    parallel_for_index(grid.size(), ctx.jobs, [&](std::size_t i) {
        ReservoirConfig c = cfg;
        c.fmap.thetas[theta_index] = grid[i];
        const ForecastResult f = qrc_forecast(c, ctx.protocol, data, ctx.cache);
        r.mse[i] = f.test.mse;
        entropy[i] = std::accumulate(f.per_step_entropy.begin(), f.per_step_entropy.end(), 0.0) /
                     static_cast<double>(f.per_step_entropy.size());
        capacity[i] = memory_capacity(c, mc).total;
    });
    r.aux["entropy"] = std::move(entropy);
    r.aux["mc"] = std::move(capacity);
    r.config = sweep_config(cfg, ctx);
    r.config["theta_index"] = theta_index;
    r.validate();
    return r;
}

enum class NoiseChannel { OneQubit, TwoQubit, Readout, Relaxation, Combined };

inline std::string_view to_string(NoiseChannel c) {
    switch (c) {
    case NoiseChannel::OneQubit: return "one_qubit";
    case NoiseChannel::TwoQubit: return "two_qubit";
    case NoiseChannel::Readout: return "readout";
    case NoiseChannel::Relaxation: return "relaxation";
    case NoiseChannel::Combined: return "combined";
    }
    return "?";
}

inline NoiseChannel noise_channel_from_string(std::string_view s) {
    for (auto c : {NoiseChannel::OneQubit, NoiseChannel::TwoQubit, NoiseChannel::Readout,
                   NoiseChannel::Relaxation, NoiseChannel::Combined}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("sweep.channel", "unknown channel '" + std::string(s) +
                                           "' (expected one_qubit, two_qubit, readout, "
                                           "relaxation or combined)");
}

/// Strengths reached by the Combined channel at scale 1; scale s multiplies
/// the probabilities and divides t1.
struct CombinedNoiseReference {
    double p1 = 1e-3;
    double p2 = 1e-2;
    double readout_eps = 5e-2;
    double t1 = 50.0;
};

inline NoiseSpec noise_point(NoiseChannel channel, double value, NoiseSpec base = {},
                             const CombinedNoiseReference &ref = {}) {
    switch (channel) {
    case NoiseChannel::OneQubit: base.p1 = value; break;
    case NoiseChannel::TwoQubit: base.p2 = value; break;
    case NoiseChannel::Readout: base.readout_eps = value; break;
    case NoiseChannel::Relaxation: base.t1 = value; break;
    case NoiseChannel::Combined:
        if (!(value >= 0.0)) {
            throw ConfigError("sweep.grid", "combined noise scale must be >= 0");
        }
        base.p1 = value * ref.p1;
        base.p2 = value * ref.p2;
        base.readout_eps = value * ref.readout_eps;
        base.t1 = value > 0.0 ? ref.t1 / value : std::numeric_limits<double>::infinity();
        break;
    }
    base.validate();
    return base;
}

inline SweepResult noise_sweep(ReservoirConfig cfg, NoiseChannel channel,
                               const std::vector<double> &grid, const SweepContext &ctx,
                               const CombinedNoiseReference &ref = {}) {
    const NoiseSpec base = cfg.noise.value_or(NoiseSpec{});
    std::vector<NoiseSpec> points;
    for (double v : grid) {
        points.push_back(noise_point(channel, v, base, ref));
    }
    cfg.record_entropy = false;
    const ForecastData data = prepare_forecast(ctx.protocol, ctx.seed);
    SweepResult r;
    r.axis = std::string(to_string(channel));
    r.grid = grid;
    r.mse.resize(grid.size());
    parallel_for_index(grid.size(), ctx.jobs, [&](std::size_t i) {
        ReservoirConfig c = cfg;
        c.noise = points[i];
        r.mse[i] = qrc_forecast(c, ctx.protocol, data, ctx.cache).test.mse;
    });
    r.config = sweep_config(cfg, ctx);
    r.config["channel"] = to_string(channel);
    if (channel == NoiseChannel::Combined) {
        r.config["combined_reference"] = {
            {"p1", ref.p1}, {"p2", ref.p2}, {"readout_eps", ref.readout_eps}, {"t1", ref.t1}};
    }
    r.validate();
    return r;
}

inline SweepResult alpha_sweep(ReservoirConfig cfg, const std::vector<double> &grid,
                               const SweepContext &ctx) {
    const ForecastData data = prepare_forecast(ctx.protocol, ctx.seed);
    SweepResult r;
    r.axis = "alpha";
    r.grid = grid;
    r.mse.resize(grid.size());
    for (double a : grid) {
        ReservoirConfig c = cfg;
        c.alpha = a;
        c.validate();
    }
    parallel_for_index(grid.size(), ctx.jobs, [&](std::size_t i) {
        ReservoirConfig c = cfg;
        c.alpha = grid[i];
        r.mse[i] = qrc_forecast(c, ctx.protocol, data, ctx.cache).test.mse;
    });
    r.config = sweep_config(cfg, ctx);
    r.validate();
    return r;
}

/// Simulates once at lambda = 1 and refits on leading feature columns.
inline SweepResult lambda_sweep(ReservoirConfig cfg, const std::vector<double> &grid,
                                const SweepContext &ctx) {
    for (double l : grid) {
        ReservoirConfig c = cfg;
        c.lambda_frac = l;
        c.validate();
    }
    cfg.lambda_frac = 1.0;
    cfg.horizon = ctx.protocol.horizon;
    const ForecastData data = prepare_forecast(ctx.protocol, ctx.seed);
    const ReservoirTrace full = ctx.cache != nullptr ? ctx.cache->get_or_run(cfg, data.quantum)
                                                     : run_reservoir(cfg, data.quantum);
    SweepResult r;
    r.axis = "lambda";
    r.grid = grid;
    r.mse.resize(grid.size());
    parallel_for_index(grid.size(), ctx.jobs, [&](std::size_t i) {
        ReservoirConfig c = cfg;
        c.lambda_frac = grid[i];
        r.mse[i] = fit_forecast(full.truncated(c.feature_count()), ctx.protocol, data.n_train)
                       .test.mse;
    });
    r.config = sweep_config(cfg, ctx);
    r.validate();
    return r;
}

inline std::pair<SweepResult, SweepResult>
alpha_lambda_sweep(const ReservoirConfig &cfg, const std::vector<double> &alpha_grid,
                   const std::vector<double> &lambda_grid, const SweepContext &ctx) {
    return {alpha_sweep(cfg, alpha_grid, ctx), lambda_sweep(cfg, lambda_grid, ctx)};
}

// ---------------------------------------------------------------------------
// Delay x horizon grid

struct MapVariant {
    FeatureMapKind kind = FeatureMapKind::CPMap;
    std::size_t window_len = 20;
};

struct GridCell {
    MapVariant map;
    double mg_delay = 17.0;
    std::size_t horizon = 20;
    std::uint64_t seed = 1;
    double mse = 0.0;
};

/// Full cross product map x delay x horizon x seed, in that nesting order.
inline std::vector<GridCell> delay_horizon_grid(const ReservoirConfig &base_cfg,
                                                const ForecastProtocol &base_protocol,
                                                const std::vector<MapVariant> &maps,
                                                const std::vector<double> &delays,
                                                const std::vector<std::size_t> &horizons,
                                                const std::vector<std::uint64_t> &seeds,
                                                std::size_t jobs = 0, TraceCache *cache = nullptr) {
    std::vector<GridCell> cells;
    for (const MapVariant &m : maps) {
        for (double d : delays) {
            for (std::size_t h : horizons) {
                for (std::uint64_t s : seeds) {
                    cells.push_back({m, d, h, s, 0.0});
                }
            }
        }
    }
    parallel_for_index(cells.size(), jobs, [&](std::size_t i) {
        GridCell &cell = cells[i];
        ForecastProtocol p = base_protocol;
        p.mg.mg_delay = cell.mg_delay;
        p.window_len = cell.map.window_len;
        p.horizon = cell.horizon;
        ReservoirConfig c = base_cfg;
        c.fmap.kind = cell.map.kind;
        c.fmap.n_features = cell.map.window_len;
        c.horizon = cell.horizon;
        const ForecastData data = prepare_forecast(p, cell.seed);
        cell.mse = qrc_forecast(c, p, data, cache).test.mse;
    });
    return cells;
}

inline std::string grid_to_csv(const std::vector<GridCell> &cells) {
    std::ostringstream os;
    os.precision(17);
    os << "feature_map,window_len,mg_delay,horizon,seed,mse\n";
    for (const GridCell &c : cells) {
        os << to_string(c.map.kind) << ',' << c.map.window_len << ',' << c.mg_delay << ','
           << c.horizon << ',' << c.seed << ',' << c.mse << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Classical baseline suite

struct BaselineOptions {
    ESNConfig esn;
    ESNGrid esn_grid;
    MLPConfig mlp;
    double ridge_reg = kDefaultBaselineRidgeReg;
    double lasso_reg = kDefaultBaselineLassoReg;
};

struct BaselineRow {
    std::string model;
    double mse = 0.0;
};

/// Rows: ridge, lasso, mlp, esn, esn-tuned. Component seeds derive from `seed`.
inline std::vector<BaselineRow> run_baselines(const ForecastData &data, BaselineOptions opt,
                                              std::uint64_t seed) {
    const auto [train, test] = data.classical_split();
    opt.esn.seed = derive_seed(seed, "esn");
    opt.mlp.seed = derive_seed(seed, "mlp");
    std::vector<BaselineRow> rows;
    const auto linear = linear_baselines(train, test, opt.ridge_reg, opt.lasso_reg);
    rows.push_back({"ridge", linear.at("ridge").mse});
    rows.push_back({"lasso", linear.at("lasso").mse});
    rows.push_back({"mlp", mlp_run(opt.mlp, train, test).mse});
    rows.push_back({"esn", esn_run(opt.esn, train, test).metrics.mse});
    rows.push_back({"esn-tuned", esn_grid_search(opt.esn, train, test, opt.esn_grid).test.mse});
    return rows;
}

// ---------------------------------------------------------------------------
// Echo state diagnostics

/// First index t >= 1 with d[t] < factor * d[0], or d.size() if none.
inline std::size_t first_contraction_step(const std::vector<double> &d, double factor) {
    for (std::size_t t = 1; t < d.size(); ++t) {
        if (d[t] < factor * d[0]) {
            return t;
        }
    }
    return d.size();
}

} // namespace qrc
