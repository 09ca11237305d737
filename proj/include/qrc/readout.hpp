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
 * Linear readout: ridge, lasso and least squares on standardized features.
 *
 * Every model standardizes its training features (mean / population std,
 * zero-variance columns left unscaled) and fits an intercept through the
 * centered target. Weights are stored in standardized coordinates;
 * `original_weights()` maps them back.
 */
#pragma once

#include "qrc/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class ReadoutKind { Ridge, Lasso, OLS };

inline std::string_view to_string(ReadoutKind k) {
    switch (k) {
    case ReadoutKind::Ridge: return "ridge";
    case ReadoutKind::Lasso: return "lasso";
    case ReadoutKind::OLS: return "ols";
    }
    return "?";
}

inline ReadoutKind readout_kind_from_string(std::string_view s) {
    if (s == "ridge") return ReadoutKind::Ridge;
    if (s == "lasso") return ReadoutKind::Lasso;
    if (s == "ols") return ReadoutKind::OLS;
    throw ConfigError("readout.kind", "unknown readout '" + std::string(s) + "'");
}

/// Default ridge strength for reservoir features.
inline constexpr double kDefaultReadoutReg = 1e-8;

struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardization fit(const Eigen::MatrixXd &x) {
        Standardization s;
        const double n = static_cast<double>(x.rows());
        s.mean = x.colwise().mean().transpose();
        s.scale.resize(x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
            const double sd = std::sqrt(var);
            s.scale(j) = sd > 1e-300 ? sd : 1.0;
        }
        return s;
    }

    [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd &x) const {
        return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    }
};

struct ReadoutModel {
    ReadoutKind kind = ReadoutKind::Ridge;
    double reg_strength = 0.0;
    Eigen::VectorXd weights;  // standardized coordinates
    double bias = 0.0;
    Standardization standardization;
    bool converged = true;
    std::size_t iterations = 0;

    [[nodiscard]] Eigen::Index dim() const { return weights.size(); }

    [[nodiscard]] Eigen::VectorXd original_weights() const {
        return weights.array() / standardization.scale.array();
    }
    [[nodiscard]] double original_bias() const {
        return bias - original_weights().dot(standardization.mean);
    }
};

struct Metrics {
    double mse = 0.0;
    std::vector<double> per_sample_errors;
};

namespace detail {

inline void require_finite(const Eigen::MatrixXd &x, std::string_view what) {
    if (!x.allFinite()) {
        throw Error(ErrorKind::Config, std::string(what) + " contains NaN or Inf");
    }
}

/// Solves min ||y - Z w||^2 + reg ||w||^2 for each column of y; primal or dual
/// form, whichever system is smaller.
inline Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd &z, const Eigen::MatrixXd &y,
                                   double reg) {
    const Eigen::Index n = z.rows();
    const Eigen::Index p = z.cols();
    if (p <= n) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
        gram.diagonal().array() += reg;
        const Eigen::MatrixXd rhs = z.transpose() * y;
        Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
        if (llt.info() == Eigen::Success) {
            return llt.solve(rhs);
        }
        Eigen::MatrixXd full = gram.selfadjointView<Eigen::Lower>();
        return full.completeOrthogonalDecomposition().solve(rhs);
    }
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z);
    gram.diagonal().array() += reg;
    Eigen::LLT<Eigen::MatrixXd> llt(gram.selfadjointView<Eigen::Lower>());
    if (llt.info() == Eigen::Success) {
        return z.transpose() * llt.solve(y);
    }
    Eigen::MatrixXd full = gram.selfadjointView<Eigen::Lower>();
    return z.transpose() * full.completeOrthogonalDecomposition().solve(y);
}

/// Coordinate descent for (1/2n)||y - Z w||^2 + reg ||w||_1.
inline Eigen::VectorXd lasso_solve(const Eigen::MatrixXd &z, const Eigen::VectorXd &y,
                                   double reg, bool &converged, std::size_t &sweeps) {
    constexpr double kTol = 1e-8;
    constexpr std::size_t kMaxSweeps = 10000;
    const double n = static_cast<double>(z.rows());
    const Eigen::Index p = z.cols();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = y;
    const Eigen::VectorXd col_sq = z.colwise().squaredNorm().transpose() / n;
    converged = false;
    for (sweeps = 1; sweeps <= kMaxSweeps; ++sweeps) {
        double max_delta = 0.0;
        double max_w = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) <= 0.0) {
                continue;
            }
            const double old = w(j);
            const double rho = z.col(j).dot(resid) / n + col_sq(j) * old;
            const double mag = std::abs(rho) - reg;
            const double next = mag > 0.0 ? std::copysign(mag, rho) / col_sq(j) : 0.0;
            if (next != old) {
                resid.noalias() -= (next - old) * z.col(j);
                w(j) = next;
            }
            max_delta = std::max(max_delta, std::abs(next - old));
            max_w = std::max(max_w, std::abs(next));
        }
        if (max_delta <= kTol * std::max(1.0, max_w)) {
            converged = true;
            break;
        }
    }
    sweeps = std::min(sweeps, kMaxSweeps);
    return w;
}

} // namespace detail

inline ReadoutModel fit(ReadoutKind kind, const Eigen::MatrixXd &x, const Eigen::VectorXd &y,
                        double reg) {
    if (x.rows() != y.size() || x.rows() < 1) {
        throw Error(ErrorKind::Sizing, "fit: feature rows and targets differ");
    }
    if (!(reg >= 0.0) || !std::isfinite(reg)) {
        throw ConfigError("readout.reg", "must be finite and >= 0");
    }
    detail::require_finite(x, "fit: features");
    detail::require_finite(y, "fit: targets");

    ReadoutModel m;
    m.kind = kind;
    m.reg_strength = kind == ReadoutKind::OLS ? 0.0 : reg;
    m.standardization = Standardization::fit(x);
    const Eigen::MatrixXd z = m.standardization.apply(x);
    m.bias = y.mean();
    const Eigen::VectorXd yc = y.array() - m.bias;

    switch (kind) {
    case ReadoutKind::Ridge:
        if (reg > 0.0) {
            m.weights = detail::ridge_solve(z, yc, reg);
            break;
        }
        [[fallthrough]];
    case ReadoutKind::OLS:
        m.weights = z.completeOrthogonalDecomposition().solve(yc);
        break;
    case ReadoutKind::Lasso:
        m.weights = detail::lasso_solve(z, yc, reg, m.converged, m.iterations);
        break;
    }
    return m;
}

/// Ridge fits sharing one feature matrix (one model per column of `y`).
inline std::vector<ReadoutModel> fit_ridge_multi(const Eigen::MatrixXd &x,
                                                 const Eigen::MatrixXd &y, double reg) {
    if (x.rows() != y.rows()) {
        throw Error(ErrorKind::Sizing, "fit_ridge_multi: row mismatch");
    }
    detail::require_finite(x, "fit: features");
    detail::require_finite(y, "fit: targets");
    ReadoutModel base;
    base.kind = ReadoutKind::Ridge;
    base.reg_strength = reg;
    base.standardization = Standardization::fit(x);
    const Eigen::MatrixXd z = base.standardization.apply(x);
    const Eigen::RowVectorXd means = y.colwise().mean();
    const Eigen::MatrixXd yc = y.rowwise() - means;
    const Eigen::MatrixXd w = reg > 0.0 ? detail::ridge_solve(z, yc, reg)
                                        : Eigen::MatrixXd(z.completeOrthogonalDecomposition().solve(yc));
    std::vector<ReadoutModel> out;
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
        ReadoutModel m = base;
        m.weights = w.col(k);
        m.bias = means(k);
        out.push_back(std::move(m));
    }
    return out;
}

inline Eigen::VectorXd predict(const ReadoutModel &m, const Eigen::MatrixXd &x) {
    if (x.cols() != m.weights.size()) {
        throw Error(ErrorKind::Sizing, "predict: model expects " + std::to_string(m.weights.size()) +
                                           " features, got " + std::to_string(x.cols()));
    }
    return (m.standardization.apply(x) * m.weights).array() + m.bias;
}

inline Metrics mse(const Eigen::VectorXd &y_true, const Eigen::VectorXd &y_pred,
                   bool keep_errors = false) {
    if (y_true.size() != y_pred.size() || y_true.size() == 0) {
        throw Error(ErrorKind::Sizing, "mse: length mismatch or empty input");
    }
    Metrics out;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        const double e = y_pred(i) - y_true(i);
        acc += e * e;
        if (keep_errors) {
            out.per_sample_errors.push_back(e);
        }
    }
    out.mse = acc / static_cast<double>(y_true.size());
    return out;
}

inline nlohmann::json to_json(const ReadoutModel &m) {
    auto vec = [](const Eigen::VectorXd &v) { return std::vector<double>(v.begin(), v.end()); };
    return {{"kind", to_string(m.kind)},
            {"reg", m.reg_strength},
            {"bias", m.bias},
            {"weights", vec(m.weights)},
            {"feature_mean", vec(m.standardization.mean)},
            {"feature_scale", vec(m.standardization.scale)},
            {"converged", m.converged}};
}

inline ReadoutModel readout_from_json(const nlohmann::json &j) {
    auto vec = [](const nlohmann::json &a) {
        const auto v = a.get<std::vector<double>>();
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    ReadoutModel m;
    m.kind = readout_kind_from_string(j.at("kind").get<std::string>());
    m.reg_strength = j.at("reg").get<double>();
    m.bias = j.at("bias").get<double>();
    m.weights = vec(j.at("weights"));
    m.standardization.mean = vec(j.at("feature_mean"));
    m.standardization.scale = vec(j.at("feature_scale"));
    m.converged = j.value("converged", true);
    if (m.standardization.mean.size() != m.weights.size() ||
        m.standardization.scale.size() != m.weights.size()) {
        throw Error(ErrorKind::Io, "readout JSON: inconsistent vector lengths");
    }
    return m;
}

} // namespace qrc
