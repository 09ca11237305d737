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
 * Classical comparison models: leaky echo state network, one-hidden-layer
 * MLP, and ridge / lasso on raw input windows.
 */
#pragma once

#include "qrc/error.hpp"
#include "qrc/mackey_glass.hpp"
#include "qrc/readout.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace qrc {

// ---------------------------------------------------------------------------
// Echo state network

struct ESNConfig {
    std::size_t n_reservoir = 200;
    double spectral_radius = 0.9;
    double input_scaling = 0.5;
    double leak_rate = 0.3;
    double reg = 1e-5;
    double feedback_scaling = 0.0;
    std::uint64_t seed = 1;
    std::size_t washout = 100;

    void validate() const {
        if (n_reservoir < 1) throw ConfigError("esn.n_reservoir", "must be >= 1");
        if (!(spectral_radius >= 0.0)) throw ConfigError("esn.spectral_radius", "must be >= 0");
        if (!(input_scaling > 0.0)) throw ConfigError("esn.input_scaling", "must be positive");
        if (!(leak_rate > 0.0 && leak_rate <= 1.0)) {
            throw ConfigError("esn.leak_rate", "must lie in (0, 1]");
        }
        if (!(reg >= 0.0)) throw ConfigError("esn.reg", "must be >= 0");
    }
};

struct ESNWeights {
    Eigen::MatrixXd w_res;
    Eigen::MatrixXd w_in;
    Eigen::VectorXd w_fb;
};

inline double spectral_radius_of(const Eigen::MatrixXd &w) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(w, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Seeded uniform weights with W_res rescaled to the requested spectral radius.
inline ESNWeights make_esn_weights(const ESNConfig &cfg, std::size_t n_inputs) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(cfg.n_reservoir);
    const auto k = static_cast<Eigen::Index>(n_inputs);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ESNWeights w;
    w.w_res.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            w.w_res(i, j) = u(rng);
        }
    }
    w.w_in.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            w.w_in(i, j) = cfg.input_scaling * u(rng);
        }
    }
    w.w_fb.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w.w_fb(i) = cfg.feedback_scaling * u(rng);
    }
    if (cfg.spectral_radius == 0.0) {
        w.w_res.setZero();
        return w;
    }
    const double rho = spectral_radius_of(w.w_res);
    if (!(rho > 0.0)) {
        throw Error(ErrorKind::Simulation, "ESN spectral rescale: reservoir matrix has zero spectrum");
    }
    w.w_res *= cfg.spectral_radius / rho;
    return w;
}

/// h_{t+1} = (1-a) h_t + a tanh(W_res h_t + W_in x_{t+1} + W_fb y_t).
/// `feedback(t)` supplies y_{t-1} for row t (ignored when W_fb is zero).
template <typename FeedbackFn>
Eigen::MatrixXd esn_states(const ESNConfig &cfg, const ESNWeights &w, const Eigen::MatrixXd &inputs,
                           const Eigen::VectorXd &h0, FeedbackFn &&feedback) {
    const Eigen::Index n = w.w_res.rows();
    Eigen::MatrixXd states(inputs.rows(), n);
    Eigen::VectorXd h = h0;
    const bool use_fb = cfg.feedback_scaling != 0.0;
    for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
        Eigen::VectorXd pre = w.w_res * h + w.w_in * inputs.row(t).transpose();
        if (use_fb) {
            pre += w.w_fb * feedback(t);
        }
        h = (1.0 - cfg.leak_rate) * h + cfg.leak_rate * pre.array().tanh().matrix();
        states.row(t) = h.transpose();
    }
    return states;
}

inline Eigen::MatrixXd esn_states(const ESNConfig &cfg, const ESNWeights &w,
                                  const Eigen::MatrixXd &inputs) {
    return esn_states(cfg, w, inputs, Eigen::VectorXd::Zero(w.w_res.rows()),
                      [](Eigen::Index) { return 0.0; });
}

inline Eigen::MatrixXd hstack(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
    Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

struct ESNResult {
    Metrics metrics;
    Eigen::VectorXd predictions;
};

/// Trains on `train` (after washout) and evaluates on `test`; the state runs
/// continuously from the train rows into the test rows. With output
/// feedback the train phase is teacher-forced and the test phase feeds back
/// its own previous prediction.
inline ESNResult esn_run(const ESNConfig &cfg, const WindowedDataset &train,
                         const WindowedDataset &test) {
    cfg.validate();
    if (train.rows() <= cfg.washout + 1) {
        throw Error(ErrorKind::Sizing, "esn_run: training rows do not exceed washout");
    }
    const ESNWeights w = make_esn_weights(cfg, static_cast<std::size_t>(train.inputs.cols()));
    const Eigen::Index n = w.w_res.rows();
    const Eigen::MatrixXd s_train = esn_states(
        cfg, w, train.inputs, Eigen::VectorXd::Zero(n),
        [&train](Eigen::Index t) { return t == 0 ? 0.0 : train.targets(t - 1); });
    const auto wo = static_cast<Eigen::Index>(cfg.washout);
    const Eigen::Index n_fit = train.inputs.rows() - wo;
    const Eigen::MatrixXd design = hstack(s_train.bottomRows(n_fit), train.inputs.bottomRows(n_fit));
    const ReadoutModel model = fit(ReadoutKind::Ridge, design, train.targets.tail(n_fit), cfg.reg);

    ESNResult out;
    out.predictions.resize(test.inputs.rows());
    Eigen::VectorXd h = s_train.row(s_train.rows() - 1).transpose();
    double y_prev = train.targets(train.targets.size() - 1);
    Eigen::MatrixXd row(1, n + test.inputs.cols());
    for (Eigen::Index t = 0; t < test.inputs.rows(); ++t) {
        Eigen::VectorXd pre = w.w_res * h + w.w_in * test.inputs.row(t).transpose();
        if (cfg.feedback_scaling != 0.0) {
            pre += w.w_fb * y_prev;
        }
        h = (1.0 - cfg.leak_rate) * h + cfg.leak_rate * pre.array().tanh().matrix();
        row << h.transpose(), test.inputs.row(t);
        y_prev = predict(model, row)(0);
        out.predictions(t) = y_prev;
    }
    out.metrics = mse(test.targets, out.predictions);
    return out;
}

struct ESNGrid {
    std::vector<double> spectral_radius{0.7, 0.9, 1.1};
    std::vector<double> input_scaling{0.1, 0.5, 1.0};
    std::vector<double> reg{1e-8, 1e-5, 1e-2};
};

struct ESNGridCell {
    ESNConfig cfg;
    double selection_mse = 0.0;
};

struct ESNGridResult {
    ESNConfig best;
    double best_selection_mse = 0.0;
    Metrics test;  // best config retrained on all of `train`
    std::vector<ESNGridCell> cells;
};

/// Fraction of the training rows held out to score grid cells.
inline constexpr double kEsnValidationFraction = 0.2;

/// Exhaustive search. Cells are scored on the trailing validation part of
/// `train`; ties go to the smaller spectral radius, then the smaller reg.
inline ESNGridResult esn_grid_search(const ESNConfig &base, const WindowedDataset &train,
                                     const WindowedDataset &test, const ESNGrid &grid = {}) {
    const auto n_val = static_cast<std::size_t>(
        std::floor(kEsnValidationFraction * static_cast<double>(train.rows())));
    const auto [fit_part, val_part] = split_train_test(train, train.rows() - n_val);
    ESNGridResult res;
    bool first = true;
    for (double sr : grid.spectral_radius) {
        for (double is : grid.input_scaling) {
            for (double reg : grid.reg) {
                ESNConfig cfg = base;
                cfg.spectral_radius = sr;
                cfg.input_scaling = is;
                cfg.reg = reg;
                const double m = esn_run(cfg, fit_part, val_part).metrics.mse;
                res.cells.push_back({cfg, m});
                const auto key = std::make_tuple(m, sr, reg);
                const auto best_key = std::make_tuple(res.best_selection_mse,
                                                      res.best.spectral_radius, res.best.reg);
                if (first || key < best_key) {
                    res.best = cfg;
                    res.best_selection_mse = m;
                    first = false;
                }
            }
        }
    }
    detail::require(!first, ErrorKind::Config, "esn_grid_search: empty grid");
    res.test = esn_run(res.best, train, test).metrics;
    return res;
}

// ---------------------------------------------------------------------------
// Multilayer perceptron

struct MLPConfig {
    std::size_t hidden_units = 64;
    std::size_t epochs = 2000;
    double learning_rate = 1e-2;
    std::uint64_t seed = 1;
    bool zero_output_init = false;

    void validate() const {
        if (hidden_units < 1) throw ConfigError("mlp.hidden_units", "must be >= 1");
        if (!(learning_rate > 0.0)) throw ConfigError("mlp.learning_rate", "must be positive");
    }
};

/// y = w2 . tanh(W1 x + b1) + b2
struct MLPParams {
    Eigen::MatrixXd w1;  // hidden x inputs
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;  // hidden
    double b2 = 0.0;

    [[nodiscard]] Eigen::VectorXd flatten() const {
        Eigen::VectorXd v(w1.size() + b1.size() + w2.size() + 1);
        v << Eigen::Map<const Eigen::VectorXd>(w1.data(), w1.size()), b1, w2, b2;
        return v;
    }
    void unflatten(const Eigen::VectorXd &v) {
        Eigen::Index o = 0;
        w1 = Eigen::Map<const Eigen::MatrixXd>(v.data(), w1.rows(), w1.cols());
        o += w1.size();
        b1 = v.segment(o, b1.size());
        o += b1.size();
        w2 = v.segment(o, w2.size());
        o += w2.size();
        b2 = v(o);
    }
};

/// Glorot-uniform initialisation.
inline MLPParams mlp_init(const MLPConfig &cfg, std::size_t n_inputs) {
    cfg.validate();
    const auto h = static_cast<Eigen::Index>(cfg.hidden_units);
    const auto k = static_cast<Eigen::Index>(n_inputs);
    std::mt19937_64 rng(cfg.seed);
    const double lim1 = std::sqrt(6.0 / static_cast<double>(h + k));
    const double lim2 = std::sqrt(6.0 / static_cast<double>(h + 1));
    std::uniform_real_distribution<double> u1(-lim1, lim1);
    std::uniform_real_distribution<double> u2(-lim2, lim2);
    MLPParams p;
    p.w1.resize(h, k);
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            p.w1(i, j) = u1(rng);
        }
    }
    p.b1 = Eigen::VectorXd::Zero(h);
    p.w2.resize(h);
    for (Eigen::Index i = 0; i < h; ++i) {
        p.w2(i) = cfg.zero_output_init ? 0.0 : u2(rng);
    }
    return p;
}

inline Eigen::VectorXd mlp_predict(const MLPParams &p, const Eigen::MatrixXd &x) {
    const Eigen::MatrixXd hidden =
        ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh().matrix();
    return (hidden * p.w2).array() + p.b2;
}

/// Mean squared error and its gradient with respect to every parameter.
inline double mlp_loss_and_grad(const MLPParams &p, const Eigen::MatrixXd &x,
                                const Eigen::VectorXd &y, MLPParams *grad) {
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd hidden =
        ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh().matrix();
    const Eigen::VectorXd resid = ((hidden * p.w2).array() + p.b2).matrix() - y;
    const double loss = resid.squaredNorm() / n;
    if (grad != nullptr) {
        const Eigen::VectorXd d_out = 2.0 * resid / n;
        grad->w2 = hidden.transpose() * d_out;
        grad->b2 = d_out.sum();
        const Eigen::MatrixXd d_hidden =
            (d_out * p.w2.transpose()).array() * (1.0 - hidden.array().square());
        grad->w1 = d_hidden.transpose() * x;
        grad->b1 = d_hidden.colwise().sum().transpose();
    }
    return loss;
}

struct MLPTrainResult {
    MLPParams params;
    std::vector<double> loss_history;  // loss before each epoch, then final
};

/// Full-batch gradient descent.
inline MLPTrainResult mlp_train(const MLPConfig &cfg, const Eigen::MatrixXd &x,
                                const Eigen::VectorXd &y) {
    MLPTrainResult r;
    r.params = mlp_init(cfg, static_cast<std::size_t>(x.cols()));
    MLPParams g = r.params;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        r.loss_history.push_back(mlp_loss_and_grad(r.params, x, y, &g));
        r.params.w1 -= cfg.learning_rate * g.w1;
        r.params.b1 -= cfg.learning_rate * g.b1;
        r.params.w2 -= cfg.learning_rate * g.w2;
        r.params.b2 -= cfg.learning_rate * g.b2;
    }
    r.loss_history.push_back(mlp_loss_and_grad(r.params, x, y, nullptr));
    return r;
}

inline Metrics mlp_run(const MLPConfig &cfg, const WindowedDataset &train,
                       const WindowedDataset &test) {
    const MLPTrainResult r = mlp_train(cfg, train.inputs, train.targets);
    return mse(test.targets, mlp_predict(r.params, test.inputs));
}

// ---------------------------------------------------------------------------
// Linear models on raw windows

inline constexpr double kDefaultBaselineRidgeReg = 1e-6;
inline constexpr double kDefaultBaselineLassoReg = 1e-5;

inline std::map<std::string, Metrics> linear_baselines(const WindowedDataset &train,
                                                       const WindowedDataset &test,
                                                       double reg_ridge = kDefaultBaselineRidgeReg,
                                                       double reg_lasso = kDefaultBaselineLassoReg) {
    std::map<std::string, Metrics> out;
    const ReadoutModel ridge = fit(ReadoutKind::Ridge, train.inputs, train.targets, reg_ridge);
    out["ridge"] = mse(test.targets, predict(ridge, test.inputs));
    const ReadoutModel lasso = fit(ReadoutKind::Lasso, train.inputs, train.targets, reg_lasso);
    out["lasso"] = mse(test.targets, predict(lasso, test.inputs));
    return out;
}

} // namespace qrc
