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

// qrc: command-line driver for data generation, reservoir runs, sweeps,
// baselines, memory capacity and echo-state checks.
//
// Exit codes: 0 success, 2 configuration / usage error, 3 runtime error.
// Errors are reported on stderr as one JSON object.

#include "qrc/analysis.hpp"
#include "qrc/config.hpp"
#include "qrc/protocol.hpp"
#include "qrc/quantum.hpp"
#include "qrc/trace_store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string cache;
    std::string axis;
    std::size_t jobs = 0;
    std::optional<std::int64_t> seed;
    bool print_defaults = false;
};

struct Context {
    qrc::ExperimentConfig cfg;
    fs::path out;
    std::unique_ptr<qrc::TraceCache> cache;
    std::size_t jobs = 0;
};

Context load(const Options &o, const std::map<std::string, std::string> &extra = {}) {
    if (o.config.empty()) {
        throw qrc::ConfigError("--config", "a config file is required");
    }
    std::map<std::string, std::string> overrides = extra;
    if (!o.out.empty()) overrides["output.dir"] = o.out;
    if (!o.cache.empty()) overrides["cache.dir"] = o.cache;
    if (o.seed) overrides["experiment.seed"] = std::to_string(*o.seed);
    const auto tree = qrc::ConfigTree::load(o.config, overrides);
    Context c{qrc::resolve(tree), {}, nullptr, o.jobs};
    c.out = c.cfg.out_dir;
    fs::create_directories(c.out);
    if (!c.cfg.cache_dir.empty()) {
        c.cache = std::make_unique<qrc::TraceCache>(c.cfg.cache_dir);
    }
    qrc::write_text_file(c.out / "config.txt", c.cfg.echo);
    return c;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

qrc::SweepContext sweep_context(const Context &c) {
    return {c.cfg.protocol, c.cfg.seed, c.jobs, c.cache.get()};
}

void cmd_generate(const Context &c) {
    const auto mg = qrc::seeded_mg(c.cfg.protocol.mg, c.cfg.seed);
    const qrc::TimeSeries s = qrc::generate_mackey_glass(mg);
    qrc::write_series_csv((c.out / "series.csv").string(), s);
    std::cout << "wrote " << s.values.size() << " samples to " << (c.out / "series.csv").string()
              << "\n";
}

void cmd_run(const Context &c) {
    const std::uint64_t sims_before = qrc::simulation_count();
    const qrc::ForecastData data = qrc::prepare_forecast(c.cfg.protocol, c.cfg.seed);
    const qrc::ForecastResult r =
        qrc::qrc_forecast(c.cfg.reservoir, c.cfg.protocol, data, c.cache.get());
    std::string csv = "index,true,predicted\n";
    for (Eigen::Index i = 0; i < r.test_targets.size(); ++i) {
        csv += std::to_string(i) + "," + fmt(r.test_targets(i)) + "," + fmt(r.test_predictions(i)) + "\n";
    }
    qrc::write_text_file(c.out / "predictions.csv", csv);
    json m{{"experiment", c.cfg.name},
           {"seed", c.cfg.seed},
           {"mse_test", r.test.mse},
           {"mse_train", r.train.mse},
           {"n_train", c.cfg.protocol.n_train},
           {"n_test", c.cfg.protocol.n_test},
           {"features", r.model.dim()},
           {"simulations", qrc::simulation_count() - sims_before},
           {"readout", qrc::to_json(r.model)},
           {"config", c.cfg.echo}};
    if (c.cache) {
        m["cache"] = {{"hits", c.cache->hits()}, {"misses", c.cache->misses()}};
    }
    qrc::write_text_file(c.out / "metrics.json", m.dump(2) + "\n");
    std::cout << "test mse " << fmt(r.test.mse) << "\n";
}

template <typename Compute>
qrc::SweepResult sweep_file(const Context &c, const std::string &axis, Compute &&compute) {
    const json config{{"axis", axis}, {"resolved", c.cfg.echo}};
    return qrc::resumable_sweep(c.out / ("sweep-" + axis + ".json"), config,
                                std::forward<Compute>(compute));
}

void cmd_sweep(const Context &c, const std::string &axis) {
    const auto ctx = sweep_context(c);
    const auto &e = c.cfg;
    if (axis == "grid") {
        const auto path = c.out / "sweep-grid.json";
        const json config{{"axis", axis}, {"resolved", e.echo}};
        if (fs::exists(path)) {
            std::ifstream is(path);
            const json stored = json::parse(is, nullptr, false);
            if (!stored.is_discarded() && stored.value("config", json()) == config) {
                std::cout << "up to date: " << path.string() << "\n";
                return;
            }
        }
        const auto cells = qrc::delay_horizon_grid(e.reservoir, e.protocol, e.grid_maps,
                                                   e.grid_delays, e.grid_horizons, e.seeds,
                                                   c.jobs, c.cache.get());
        json rows = json::array();
        for (const auto &cell : cells) {
            rows.push_back({{"feature_map", qrc::to_string(cell.map.kind)},
                            {"window_len", cell.map.window_len},
                            {"mg_delay", cell.mg_delay},
                            {"horizon", cell.horizon},
                            {"seed", cell.seed},
                            {"mse", cell.mse}});
        }
        qrc::write_text_file(c.out / "sweep-grid.csv", qrc::grid_to_csv(cells));
        qrc::write_text_file(path, json{{"config", config}, {"cells", rows}}.dump(2) + "\n");
        std::cout << "wrote " << cells.size() << " cells\n";
        return;
    }
    qrc::SweepResult r;
    if (axis == "alpha") {
        r = sweep_file(c, axis, [&] { return qrc::alpha_sweep(e.reservoir, e.sweep_grid, ctx); });
    } else if (axis == "lambda") {
        r = sweep_file(c, axis, [&] { return qrc::lambda_sweep(e.reservoir, e.sweep_grid, ctx); });
    } else if (axis == "theta") {
        r = sweep_file(c, axis, [&] {
            return qrc::theta_sweep(e.reservoir, e.theta_index, e.sweep_grid, ctx, e.memory);
        });
    } else if (axis == "noise") {
        const std::string name = "noise-" + std::string(qrc::to_string(e.channel));
        r = sweep_file(c, name, [&] {
            return qrc::noise_sweep(e.reservoir, e.channel, e.sweep_grid, ctx, e.combined);
        });
    } else {
        throw qrc::ConfigError("sweep.axis",
                               "unknown axis '" + axis + "' (valid: alpha, lambda, theta, noise, grid)");
    }
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        std::cout << r.axis << " " << fmt(r.grid[i]) << " mse " << fmt(r.mse[i]) << "\n";
    }
}

void cmd_baselines(const Context &c) {
    std::map<std::string, std::vector<double>> by_model;
    std::vector<std::string> order;
    json per_seed = json::array();
    for (std::uint64_t seed : c.cfg.seeds) {
        const qrc::ForecastData data = qrc::prepare_forecast(c.cfg.protocol, seed);
        for (const auto &row : qrc::run_baselines(data, c.cfg.baselines, seed)) {
            if (by_model.count(row.model) == 0) order.push_back(row.model);
            by_model[row.model].push_back(row.mse);
            per_seed.push_back({{"seed", seed}, {"model", row.model}, {"mse", row.mse}});
        }
    }
    std::string csv = "model,mse\n";
    json medians = json::object();
    for (const auto &m : order) {
        const double med = qrc::median(by_model[m]);
        csv += m + "," + fmt(med) + "\n";
        medians[m] = med;
        std::cout << m << " " << fmt(med) << "\n";
    }
    qrc::write_text_file(c.out / "baselines.csv", csv);
    qrc::write_text_file(c.out / "baselines.json",
                         json{{"config", c.cfg.echo}, {"median_mse", medians}, {"runs", per_seed}}
                                 .dump(2) + "\n");
}

void cmd_memory(const Context &c) {
    std::vector<std::size_t> windows = c.cfg.memory_windows;
    if (windows.empty()) windows.push_back(c.cfg.protocol.window_len);
    std::vector<qrc::MemoryCapacityResult> results(windows.size());
    qrc::parallel_for_index(windows.size(), c.jobs, [&](std::size_t i) {
        qrc::ReservoirConfig r = c.cfg.reservoir;
        r.fmap.n_features = windows[i];
        r.initial_feedback.clear();
        results[i] = qrc::memory_capacity(r, c.cfg.memory);
    });
    std::string csv = "window_len,total";
    for (std::size_t k = 1; k <= c.cfg.memory.k_max; ++k) csv += ",mc_" + std::to_string(k);
    csv += "\n";
    json rows = json::array();
    for (std::size_t i = 0; i < windows.size(); ++i) {
        csv += std::to_string(windows[i]) + "," + fmt(results[i].total);
        for (double v : results[i].per_delay) csv += "," + fmt(v);
        csv += "\n";
        rows.push_back({{"window_len", windows[i]},
                        {"total", results[i].total},
                        {"per_delay", results[i].per_delay}});
        std::cout << "window " << windows[i] << " mc " << fmt(results[i].total) << "\n";
    }
    qrc::write_text_file(c.out / "memory.csv", csv);
    qrc::write_text_file(c.out / "memory.json",
                         json{{"config", c.cfg.echo}, {"results", rows}}.dump(2) + "\n");
}

void cmd_esp(const Context &c) {
    const auto &e = c.cfg;
    const qrc::ForecastData data = qrc::prepare_forecast(e.protocol, e.seed);
    const std::size_t steps = std::min(e.esp_steps, data.quantum.rows());
    const qrc::WindowedDataset ds = qrc::slice_rows(data.quantum, 0, steps);
    std::vector<double> a = e.esp_init_a;
    std::vector<double> b = e.esp_init_b;
    if (a.empty()) {
        std::mt19937_64 rng(qrc::derive_seed(e.seed, "esp"));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t i = 0; i < e.reservoir.feedback_dim(); ++i) {
            a.push_back(u(rng));
            b.push_back(u(rng));
        }
    }
    const auto d = qrc::esp_distance_series(e.reservoir, ds, a, b);
    std::string csv = "t,distance\n";
    for (std::size_t t = 0; t < d.size(); ++t) csv += std::to_string(t) + "," + fmt(d[t]) + "\n";
    qrc::write_text_file(c.out / "esp.csv", csv);
    std::cout << "d0 " << fmt(d.front()) << " d_end " << fmt(d.back()) << "\n";
}

int report(int code, const std::string &kind, const std::string &message, const std::string &path = {}) {
    json err{{"kind", kind}, {"message", message}};
    if (!path.empty()) err["path"] = path;
    std::cerr << json{{"error", err}}.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Feedback-driven quantum reservoir computing experiments"};
    app.require_subcommand(1);
    Options o;
    const std::map<std::string, std::string> descriptions{
        {"generate", "Integrate Mackey-Glass and write the series CSV"},
        {"run", "End-to-end reservoir forecast: metrics JSON and prediction CSV"},
        {"sweep", "Parameter sweep (alpha, lambda, theta, noise, grid)"},
        {"baselines", "Ridge, lasso, MLP, ESN and grid-tuned ESN on the same data"},
        {"memory", "Linear memory capacity, optionally over several window lengths"},
        {"esp", "Feedback distance between two runs from different initial feedback"},
    };
    std::map<std::string, CLI::App *> subs;
    for (const auto &[name, desc] : descriptions) {
        CLI::App *s = app.add_subcommand(name, desc);
        s->add_option("--config", o.config, "Experiment config file");
        s->add_option("--out", o.out, "Output directory (overrides output.dir)");
        s->add_option("--cache", o.cache, "Trace cache directory (overrides cache.dir)");
        s->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
        s->add_option("--seed", o.seed, "Master seed (overrides experiment.seed)");
        s->add_flag("--print-defaults", o.print_defaults, "Print every config key with its default");
        subs[name] = s;
    }
    subs["sweep"]->add_option("--axis", o.axis, "alpha | lambda | theta | noise | grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return report(2, "usage", e.what());
    }

    if (o.print_defaults) {
        std::cout << qrc::ConfigTree::defaults_text();
        return 0;
    }
    try {
        std::map<std::string, std::string> extra;
        if (subs["sweep"]->parsed() && !o.axis.empty()) extra["sweep.axis"] = o.axis;
        const Context c = load(o, extra);
        if (subs["generate"]->parsed()) cmd_generate(c);
        else if (subs["run"]->parsed()) cmd_run(c);
        else if (subs["sweep"]->parsed()) cmd_sweep(c, c.cfg.sweep_axis);
        else if (subs["baselines"]->parsed()) cmd_baselines(c);
        else if (subs["memory"]->parsed()) cmd_memory(c);
        else if (subs["esp"]->parsed()) cmd_esp(c);
        return 0;
    } catch (const qrc::ConfigError &e) {
        return report(2, "config", e.what(), e.path());
    } catch (const qrc::Error &e) {
        return report(3, std::string(qrc::to_string(e.kind())), e.what());
    } catch (const std::exception &e) {
        return report(3, "runtime", e.what());
    }
}
