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

#include "qrc/mackey_glass.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <random>

using namespace qrc;

namespace {

MGConfig chaotic(std::size_t n_samples, std::size_t washout = 0) {
    MGConfig c;
    c.n_samples = n_samples;
    c.washout_steps = washout;
    return c;
}

// Plain scalar RK4 for dx/dt = 0.2 x / (1 + x^10) - 0.1 x.
double ode_rk4(double x, double dt, std::size_t steps) {
    auto f = [](double v) { return 0.2 * v / (1.0 + std::pow(v, 10.0)) - 0.1 * v; };
    for (std::size_t i = 0; i < steps; ++i) {
        const double a = f(x);
        const double b = f(x + dt / 2 * a);
        const double c = f(x + dt / 2 * b);
        const double d = f(x + dt * c);
        x += dt * (a + 2 * b + 2 * c + d) / 6;
    }
    return x;
}

} // namespace

TEST_CASE("constant history at the fixed point stays constant", "[mackey_glass][property]") {
    MGConfig c = chaotic(10001);
    c.history_value = 1.0;
    c.sample_stride = 1;
    const TimeSeries s = generate_mackey_glass(c);
    REQUIRE(s.size() == 10001);
    for (double v : s.values) {
        REQUIRE(std::abs(v - 1.0) < 1e-9);
    }
}

TEST_CASE("chaotic parameters give a bounded aperiodic series", "[mackey_glass]") {
    const TimeSeries s = generate_mackey_glass(chaotic(11000, 1000));
    REQUIRE(s.size() == 10000);
    for (double v : s.values) {
        REQUIRE(v >= 0.2);
        REQUIRE(v <= 1.5);
    }
    for (std::size_t p = 1; p <= 500; ++p) {
        double max_diff = 0.0;
        for (std::size_t i = 0; i + p < s.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(s.values[i + p] - s.values[i]));
        }
        INFO("period " << p);
        REQUIRE(max_diff > 1e-6);
    }
}

TEST_CASE("zero delay matches an independent scalar RK4", "[mackey_glass]") {
    MGConfig c = chaotic(200);
    c.mg_delay = 0.0;
    c.sample_stride = 1;
    const TimeSeries s = generate_mackey_glass(c);
    double x = c.history_value;
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(std::abs(s.values[i] - x) < 1e-10);
        x = ode_rk4(x, c.dt, 1);
    }
}

TEST_CASE("integrator converges at fourth order", "[mackey_glass][property]") {
    const double h = 0.5;
    auto endpoint = [](double dt, std::size_t steps) {
        MGConfig c = chaotic(steps + 1);
        c.mg_delay = 0.0;
        c.dt = dt;
        c.sample_stride = 1;
        return generate_mackey_glass(c).values.back();
    };
    const double ref = ode_rk4(1.2, h / 100.0, 1000);
    const double e1 = std::abs(endpoint(h, 10) - ref);
    const double e2 = std::abs(endpoint(h / 2, 20) - ref);
    INFO("e(h) = " << e1 << ", e(h/2) = " << e2);
    REQUIRE(e1 / e2 >= 8.0);
}

TEST_CASE("trajectories from a range of histories stay bounded", "[mackey_glass][property]") {
    for (double h0 : {0.5, 0.75, 1.0, 1.25, 1.5}) {
        MGConfig c = chaotic(4000);
        c.history_value = h0;
        for (double v : generate_mackey_glass(c).values) {
            REQUIRE(v >= 0.1);
            REQUIRE(v <= 1.6);
        }
    }
}

TEST_CASE("generator rejects invalid configurations", "[mackey_glass]") {
    MGConfig c;
    c.mg_delay = 17.05;
    REQUIRE_THROWS_AS(generate_mackey_glass(c), ConfigError);
    c = MGConfig{};
    c.n_samples = c.washout_steps;
    REQUIRE_THROWS_AS(generate_mackey_glass(c), ConfigError);
    c = MGConfig{};
    c.dt = 0.0;
    REQUIRE_THROWS_AS(generate_mackey_glass(c), ConfigError);
}

TEST_CASE("overflow is reported with the step index", "[mackey_glass]") {
    MGConfig c = chaotic(10);
    c.b = 1e307;
    c.n_exp = 1.0;
    c.mg_delay = 0.0;
    c.dt = 100.0;
    c.sample_stride = 1;
    try {
        generate_mackey_glass(c);
        FAIL("expected divergence");
    } catch (const Error &e) {
        REQUIRE(e.kind() == ErrorKind::Diverged);
        REQUIRE(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("scaler maps endpoints and inverts", "[mackey_glass]") {
    const std::vector<double> a{0.0, 2.0};
    REQUIRE(fit_scaler(a, 0.0, 1.0).transform(1.0) == Catch::Approx(0.5));
    const std::vector<double> b{0.2, 1.4};
    REQUIRE(std::abs(fit_scaler(b, 0.0, std::numbers::pi).transform(1.4) - std::numbers::pi) <
            1e-15);

    const Scaler s = fit_scaler(b, 0.0, std::numbers::pi);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 1.4);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        REQUIRE(std::abs(s.inverse(s.transform(x)) - x) < 1e-12);
    }
    const std::vector<double> flat{0.3, 0.3, 0.3};
    try {
        fit_scaler(flat, 0.0, 1.0);
        FAIL("expected degenerate scale");
    } catch (const Error &e) {
        REQUIRE(e.kind() == ErrorKind::DegenerateScale);
    }
}

TEST_CASE("windows follow the row and target layout", "[mackey_glass]") {
    const std::vector<double> s{1, 2, 3, 4, 5};
    const WindowedDataset h1 = make_windows(s, 2, 1);
    REQUIRE(h1.rows() == 3);
    Eigen::MatrixXd in1(3, 2);
    in1 << 1, 2, 2, 3, 3, 4;
    REQUIRE(h1.inputs == in1);
    REQUIRE(h1.targets == Eigen::Vector3d(3, 4, 5));

    const WindowedDataset h2 = make_windows(s, 2, 2);
    Eigen::MatrixXd in2(2, 2);
    in2 << 1, 2, 2, 3;
    REQUIRE(h2.inputs == in2);
    REQUIRE(h2.targets == Eigen::Vector2d(4, 5));

    REQUIRE_THROWS_AS(make_windows(s, 3, 3), Error);
}

TEST_CASE("row count matches explicit enumeration", "[mackey_glass]") {
    std::vector<double> s(5000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 19 + 20 < s.size()) ++count;
    }
    const WindowedDataset ds = make_windows(s, 20, 20);
    REQUIRE(count == 4961);
    REQUIRE(ds.rows() == count);
}

TEST_CASE("windowing is lossless", "[mackey_glass][property]") {
    const TimeSeries s = generate_mackey_glass(chaotic(2000, 100));
    const WindowedDataset ds = make_windows(s, 20, 7);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            const double a = ds.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            REQUIRE(std::memcmp(&a, &s.values[i + j], sizeof a) == 0);
        }
        const double t = ds.targets(static_cast<Eigen::Index>(i));
        REQUIRE(std::memcmp(&t, &s.values[i + 19 + 7], sizeof t) == 0);
    }
}

TEST_CASE("chronological split", "[mackey_glass]") {
    std::vector<double> s(12);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
    const WindowedDataset ds = make_windows(s, 2, 1);
    REQUIRE(ds.rows() == 10);
    const auto [train, test] = split_train_test(ds, 8);
    REQUIRE(train.rows() == 8);
    REQUIRE(test.rows() == 2);
    Eigen::MatrixXd joined(10, 2);
    joined << train.inputs, test.inputs;
    REQUIRE(joined == ds.inputs);
    Eigen::VectorXd jt(10);
    jt << train.targets, test.targets;
    REQUIRE(jt == ds.targets);
    REQUIRE_THROWS_AS(split_train_test(ds, 0), Error);
    REQUIRE_THROWS_AS(split_train_test(ds, 10), Error);
}

TEST_CASE("80/20 split of the noisy-run protocol", "[mackey_glass]") {
    const TimeSeries s = generate_mackey_glass(chaotic(6000, 1000));
    REQUIRE(s.size() == 5000);
    const WindowedDataset ds = make_windows(s, 20, 20);
    const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(ds.rows())));
    const auto [train, test] = split_train_test(ds, n_train);
    const auto a = static_cast<long long>(train.rows());
    const auto b = static_cast<long long>(4 * test.rows());
    REQUIRE(std::llabs(a - b) <= 4);
    REQUIRE(std::llabs(a / 4 - static_cast<long long>(test.rows())) <= 1);
}

TEST_CASE("series CSV round-trips at full precision", "[mackey_glass]") {
    const TimeSeries s = generate_mackey_glass(chaotic(1500, 1000));
    const auto path = std::filesystem::temp_directory_path() / "qrc_series_roundtrip.csv";
    write_series_csv(path.string(), s);
    const TimeSeries back = read_series_csv(path.string());
    REQUIRE(back.values == s.values);
    REQUIRE(back.dt_effective == Catch::Approx(s.dt_effective));
    std::filesystem::remove(path);
}
