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
 * Experiment configuration: `dotted.key = value` lines, `#` comments,
 * comma-separated lists. Every key is declared in one schema with its type
 * and default; the resolved echo lists every key and parses back to the
 * same configuration.
 */
#pragma once

#include "qrc/analysis.hpp"
#include "qrc/baselines.hpp"
#include "qrc/error.hpp"
#include "qrc/protocol.hpp"
#include "qrc/reservoir.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class FieldType { Int, Real, Bool, String, RealList, IntList, StringList };

struct FieldSpec {
    std::string_view key;
    FieldType type;
    std::string_view def;
    bool required = false;
};

// clang-format off
inline const std::vector<FieldSpec> &config_schema() {
    using T = FieldType;
    static const std::vector<FieldSpec> schema{
        {"experiment.name", T::String, "", true},
        {"experiment.seed", T::Int, "1"},
        {"experiment.seeds", T::IntList, ""},
        {"output.dir", T::String, "results"},
        {"cache.dir", T::String, ""},

        {"mg.b", T::Real, "0.2"},
        {"mg.c", T::Real, "0.1"},
        {"mg.n_exp", T::Real, "10"},
        {"mg.delay", T::Real, "17"},
        {"mg.dt", T::Real, "0.1"},
        {"mg.sample_stride", T::Int, "10"},
        {"mg.n_samples", T::Int, "6000"},
        {"mg.history_value", T::Real, "1.2"},
        {"mg.washout_steps", T::Int, "1000"},

        {"data.window_len", T::Int, "20"},
        {"data.horizon", T::Int, "20"},
        {"data.n_train", T::Int, "3000"},
        {"data.n_test", T::Int, "1000"},

        {"reservoir.feature_map", T::String, "cpmap"},
        {"reservoir.zz_reps", T::Int, "1"},
        {"reservoir.thetas", T::RealList, "0.35, -0.2, 0.55, 0.1, -0.45, 0.25"},
        {"reservoir.alpha", T::Real, "0.79"},
        {"reservoir.lambda", T::Real, "1"},
        {"reservoir.feedback_mode", T::String, "expectation"},
        {"reservoir.initial_feedback", T::RealList, ""},

        {"noise.p1", T::Real, "0"},
        {"noise.p2", T::Real, "0"},
        {"noise.readout_eps", T::Real, "0"},
        {"noise.t1", T::Real, "inf"},
        {"noise.gate_time_1q", T::Real, "0.05"},
        {"noise.gate_time_2q", T::Real, "0.3"},

        {"readout.kind", T::String, "ridge"},
        {"readout.reg", T::Real, "1e-08"},
        {"readout.washout", T::Int, "0"},

        {"esn.n_reservoir", T::Int, "200"},
        {"esn.spectral_radius", T::Real, "0.9"},
        {"esn.input_scaling", T::Real, "0.5"},
        {"esn.leak_rate", T::Real, "0.3"},
        {"esn.reg", T::Real, "1e-05"},
        {"esn.feedback_scaling", T::Real, "0"},
        {"esn.washout", T::Int, "100"},
        {"esn.grid.spectral_radius", T::RealList, "0.7, 0.9, 1.1"},
        {"esn.grid.input_scaling", T::RealList, "0.1, 0.5, 1"},
        {"esn.grid.reg", T::RealList, "1e-08, 1e-05, 0.01"},
        {"mlp.hidden_units", T::Int, "64"},
        {"mlp.epochs", T::Int, "2000"},
        {"mlp.learning_rate", T::Real, "0.01"},
        {"baselines.ridge_reg", T::Real, "1e-06"},
        {"baselines.lasso_reg", T::Real, "1e-05"},

        {"memory.seq_len", T::Int, "4000"},
        {"memory.washout", T::Int, "100"},
        {"memory.k_max", T::Int, "20"},
        {"memory.train_fraction", T::Real, "0.7"},
        {"memory.reg", T::Real, "1e-08"},
        {"memory.window_lens", T::IntList, ""},

        {"sweep.axis", T::String, "alpha"},
        {"sweep.grid", T::RealList, "0, 0.2, 0.4, 0.6, 0.8, 1"},
        {"sweep.theta_index", T::Int, "0"},
        {"sweep.channel", T::String, "two_qubit"},
        {"sweep.combined.p1", T::Real, "0.001"},
        {"sweep.combined.p2", T::Real, "0.01"},
        {"sweep.combined.readout_eps", T::Real, "0.05"},
        {"sweep.combined.t1", T::Real, "50"},
        {"sweep.feature_maps", T::StringList, "cpmap:20, zz:8"},
        {"sweep.delays", T::RealList, "12, 17, 30, 50"},
        {"sweep.horizons", T::IntList, "1, 5, 10, 20"},

        {"esp.steps", T::Int, "200"},
        {"esp.init_a", T::RealList, ""},
        {"esp.init_b", T::RealList, ""},
    };
    return schema;
}
// clang-format on

inline const std::vector<std::string_view> &sweep_axes() {
    static const std::vector<std::string_view> axes{"alpha", "lambda", "theta", "noise", "grid"};
    return axes;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    if (trim(s).empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline double parse_real(const std::string &key, const std::string &v) {
    if (v == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    errno = 0;
    char *end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
        throw ConfigError(key, "expected a real number, got '" + v + "'");
    }
    return d;
}

inline std::int64_t parse_int(const std::string &key, const std::string &v) {
    errno = 0;
    char *end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
    return i;
}

inline std::string format_real(double d) {
    if (std::isinf(d)) {
        return "inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
}

/// Normalized text for one value; also type-checks it.
inline std::string normalize(const FieldSpec &f, const std::string &raw) {
    const std::string key(f.key);
    switch (f.type) {
    case FieldType::Int: return std::to_string(parse_int(key, raw));
    case FieldType::Real: return format_real(parse_real(key, raw));
    case FieldType::Bool:
        if (raw == "true" || raw == "false") return raw;
        throw ConfigError(key, "expected true or false, got '" + raw + "'");
    case FieldType::String: return raw;
    case FieldType::RealList:
    case FieldType::IntList:
    case FieldType::StringList: {
        std::string out;
        for (const std::string &item : split_list(raw)) {
            if (!out.empty()) out += ", ";
            if (f.type == FieldType::RealList) {
                out += format_real(parse_real(key, item));
            } else if (f.type == FieldType::IntList) {
                out += std::to_string(parse_int(key, item));
            } else {
                out += item;
            }
        }
        return out;
    }
    }
    return raw;
}

} // namespace detail

/// Validated key -> normalized value map covering every schema key.
class ConfigTree {
  public:
    /// Parses `text`, applies `overrides` on top, fills defaults and checks
    /// required keys.
    static ConfigTree parse(std::string_view text,
                            const std::map<std::string, std::string> &overrides = {}) {
        std::map<std::string, std::string> given;
        std::istringstream is{std::string(text)};
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line)) {
            ++line_no;
            const auto hash = line.find('#');
            const std::string body = detail::trim(std::string_view(line).substr(0, hash));
            if (body.empty()) {
                continue;
            }
            const auto eq = body.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
            }
            const std::string key = detail::trim(std::string_view(body).substr(0, eq));
            if (given.count(key) != 0) {
                throw ConfigError(key, "set twice (line " + std::to_string(line_no) + ")");
            }
            given[key] = detail::trim(std::string_view(body).substr(eq + 1));
        }
        for (const auto &[k, v] : overrides) {
            given[k] = v;
        }
        ConfigTree t;
        for (const auto &[k, v] : given) {
            if (find(k) == nullptr) {
                throw ConfigError(k, "unknown key");
            }
        }
        for (const FieldSpec &f : config_schema()) {
            const std::string key(f.key);
            const auto it = given.find(key);
            if (it == given.end() || (f.required && it->second.empty())) {
                if (f.required) {
                    throw ConfigError(key, "required field missing");
                }
                t.values_[key] = detail::normalize(f, std::string(f.def));
            } else {
                t.values_[key] = detail::normalize(f, it->second);
            }
        }
        return t;
    }

    static ConfigTree load(const std::string &path,
                           const std::map<std::string, std::string> &overrides = {}) {
        std::ifstream is(path);
        if (!is) {
            throw Error(ErrorKind::Io, "cannot open config " + path);
        }
        std::stringstream ss;
        ss << is.rdbuf();
        return parse(ss.str(), overrides);
    }

    /// Every key in schema order; parses back to an equal tree.
    [[nodiscard]] std::string echo() const {
        std::string out;
        for (const FieldSpec &f : config_schema()) {
            out += std::string(f.key) + " = " + values_.at(std::string(f.key)) + "\n";
        }
        return out;
    }

    /// Schema defaults with required keys marked.
    static std::string defaults_text() {
        std::string out;
        for (const FieldSpec &f : config_schema()) {
            out += std::string(f.key) + " = " +
                   (f.required ? std::string("<required>") : detail::normalize(f, std::string(f.def))) +
                   "\n";
        }
        return out;
    }

    [[nodiscard]] const std::string &raw(const std::string &key) const { return values_.at(key); }
    [[nodiscard]] double real(const std::string &key) const {
        return detail::parse_real(key, raw(key));
    }
    [[nodiscard]] std::int64_t integer(const std::string &key) const {
        return detail::parse_int(key, raw(key));
    }
    [[nodiscard]] std::size_t count(const std::string &key) const {
        const std::int64_t v = integer(key);
        if (v < 0) {
            throw ConfigError(key, "must be >= 0");
        }
        return static_cast<std::size_t>(v);
    }
    [[nodiscard]] std::vector<double> reals(const std::string &key) const {
        std::vector<double> out;
        for (const auto &s : detail::split_list(raw(key))) out.push_back(detail::parse_real(key, s));
        return out;
    }
    [[nodiscard]] std::vector<std::int64_t> integers(const std::string &key) const {
        std::vector<std::int64_t> out;
        for (const auto &s : detail::split_list(raw(key))) out.push_back(detail::parse_int(key, s));
        return out;
    }
    [[nodiscard]] std::vector<std::string> strings(const std::string &key) const {
        return detail::split_list(raw(key));
    }

    friend bool operator==(const ConfigTree &, const ConfigTree &) = default;

  private:
    static const FieldSpec *find(const std::string &key) {
        for (const FieldSpec &f : config_schema()) {
            if (f.key == key) return &f;
        }
        return nullptr;
    }
    std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::string cache_dir;
    ForecastProtocol protocol;
    ReservoirConfig reservoir;
    BaselineOptions baselines;
    MemoryCapacityOptions memory;
    std::vector<std::size_t> memory_windows;
    std::string sweep_axis;
    std::vector<double> sweep_grid;
    std::size_t theta_index = 0;
    NoiseChannel channel = NoiseChannel::TwoQubit;
    CombinedNoiseReference combined;
    std::vector<MapVariant> grid_maps;
    std::vector<double> grid_delays;
    std::vector<std::size_t> grid_horizons;
    std::size_t esp_steps = 200;
    std::vector<double> esp_init_a;
    std::vector<double> esp_init_b;
    std::string echo;
};

inline MapVariant parse_map_variant(const std::string &s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("sweep.feature_maps", "entries look like cpmap:20, got '" + s + "'");
    }
    MapVariant m;
    m.kind = feature_map_kind_from_string(s.substr(0, colon));
    const std::int64_t w = detail::parse_int("sweep.feature_maps", s.substr(colon + 1));
    if (w < 1) {
        throw ConfigError("sweep.feature_maps", "window must be positive in '" + s + "'");
    }
    m.window_len = static_cast<std::size_t>(w);
    return m;
}

/// Builds and validates every component before anything runs.
inline ExperimentConfig resolve(const ConfigTree &t) {
    ExperimentConfig e;
    e.name = t.raw("experiment.name");
    e.seed = static_cast<std::uint64_t>(t.integer("experiment.seed"));
    for (auto s : t.integers("experiment.seeds")) e.seeds.push_back(static_cast<std::uint64_t>(s));
    if (e.seeds.empty()) e.seeds.push_back(e.seed);
    e.out_dir = t.raw("output.dir");
    e.cache_dir = t.raw("cache.dir");

    MGConfig &mg = e.protocol.mg;
    mg.b = t.real("mg.b");
    mg.c = t.real("mg.c");
    mg.n_exp = t.real("mg.n_exp");
    mg.mg_delay = t.real("mg.delay");
    mg.dt = t.real("mg.dt");
    mg.sample_stride = t.count("mg.sample_stride");
    mg.n_samples = t.count("mg.n_samples");
    mg.history_value = t.real("mg.history_value");
    mg.washout_steps = t.count("mg.washout_steps");
    e.protocol.window_len = t.count("data.window_len");
    e.protocol.horizon = t.count("data.horizon");
    e.protocol.n_train = t.count("data.n_train");
    e.protocol.n_test = t.count("data.n_test");
    e.protocol.readout_kind = readout_kind_from_string(t.raw("readout.kind"));
    e.protocol.readout_reg = t.real("readout.reg");
    e.protocol.reservoir_washout = t.count("readout.washout");
    e.protocol.validate();

    ReservoirConfig &r = e.reservoir;
    r.fmap.kind = feature_map_kind_from_string(t.raw("reservoir.feature_map"));
    r.fmap.n_features = e.protocol.window_len;
    r.fmap.reps = t.count("reservoir.zz_reps");
    const auto thetas = t.reals("reservoir.thetas");
    if (thetas.size() != r.fmap.thetas.size()) {
        throw ConfigError("reservoir.thetas", "needs exactly 6 angles");
    }
    std::copy(thetas.begin(), thetas.end(), r.fmap.thetas.begin());
    r.horizon = e.protocol.horizon;
    r.alpha = t.real("reservoir.alpha");
    r.lambda_frac = t.real("reservoir.lambda");
    r.feedback_mode = feedback_mode_from_string(t.raw("reservoir.feedback_mode"));
    r.initial_feedback = t.reals("reservoir.initial_feedback");
    NoiseSpec n;
    n.p1 = t.real("noise.p1");
    n.p2 = t.real("noise.p2");
    n.readout_eps = t.real("noise.readout_eps");
    n.t1 = t.real("noise.t1");
    n.gate_time_1q = t.real("noise.gate_time_1q");
    n.gate_time_2q = t.real("noise.gate_time_2q");
    if (!(n == NoiseSpec{})) r.noise = n;
    r.validate();

    ESNConfig &esn = e.baselines.esn;
    esn.n_reservoir = t.count("esn.n_reservoir");
    esn.spectral_radius = t.real("esn.spectral_radius");
    esn.input_scaling = t.real("esn.input_scaling");
    esn.leak_rate = t.real("esn.leak_rate");
    esn.reg = t.real("esn.reg");
    esn.feedback_scaling = t.real("esn.feedback_scaling");
    esn.washout = t.count("esn.washout");
    esn.validate();
    e.baselines.esn_grid.spectral_radius = t.reals("esn.grid.spectral_radius");
    e.baselines.esn_grid.input_scaling = t.reals("esn.grid.input_scaling");
    e.baselines.esn_grid.reg = t.reals("esn.grid.reg");
    e.baselines.mlp.hidden_units = t.count("mlp.hidden_units");
    e.baselines.mlp.epochs = t.count("mlp.epochs");
    e.baselines.mlp.learning_rate = t.real("mlp.learning_rate");
    e.baselines.mlp.validate();
    e.baselines.ridge_reg = t.real("baselines.ridge_reg");
    e.baselines.lasso_reg = t.real("baselines.lasso_reg");

    e.memory.seq_len = t.count("memory.seq_len");
    e.memory.washout = t.count("memory.washout");
    e.memory.k_max = t.count("memory.k_max");
    e.memory.train_fraction = t.real("memory.train_fraction");
    e.memory.reg = t.real("memory.reg");
    e.memory.seed = derive_seed(e.seed, "memory");
    e.memory.validate();
    for (auto w : t.integers("memory.window_lens")) {
        if (w < 2) throw ConfigError("memory.window_lens", "windows must be >= 2");
        e.memory_windows.push_back(static_cast<std::size_t>(w));
    }

    e.sweep_axis = t.raw("sweep.axis");
    if (std::find(sweep_axes().begin(), sweep_axes().end(), e.sweep_axis) == sweep_axes().end()) {
        throw ConfigError("sweep.axis", "unknown axis '" + e.sweep_axis +
                                            "' (valid: alpha, lambda, theta, noise, grid)");
    }
    e.sweep_grid = t.reals("sweep.grid");
    e.theta_index = t.count("sweep.theta_index");
    e.channel = noise_channel_from_string(t.raw("sweep.channel"));
    e.combined.p1 = t.real("sweep.combined.p1");
    e.combined.p2 = t.real("sweep.combined.p2");
    e.combined.readout_eps = t.real("sweep.combined.readout_eps");
    e.combined.t1 = t.real("sweep.combined.t1");
    for (const auto &s : t.strings("sweep.feature_maps")) e.grid_maps.push_back(parse_map_variant(s));
    e.grid_delays = t.reals("sweep.delays");
    for (auto h : t.integers("sweep.horizons")) {
        if (h < 1) throw ConfigError("sweep.horizons", "horizons must be positive");
        e.grid_horizons.push_back(static_cast<std::size_t>(h));
    }

    e.esp_steps = t.count("esp.steps");
    e.esp_init_a = t.reals("esp.init_a");
    e.esp_init_b = t.reals("esp.init_b");
    if (e.esp_init_a.size() != e.esp_init_b.size()) {
        throw ConfigError("esp.init_b", "must have the same length as esp.init_a");
    }
    e.echo = t.echo();
    return e;
}

} // namespace qrc
