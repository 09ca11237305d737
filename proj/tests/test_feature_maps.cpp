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

#include "oracles.hpp"
#include "qrc/feature_maps.hpp"
#include "qrc/quantum.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace qrc;

namespace {

FeatureMapSpec cpmap(std::size_t f) {
    FeatureMapSpec s;
    s.kind = FeatureMapKind::CPMap;
    s.n_features = f;
    return s;
}

FeatureMapSpec zz(std::size_t f, std::size_t reps = 1) {
    FeatureMapSpec s;
    s.kind = FeatureMapKind::ZZFeatureMap;
    s.n_features = f;
    s.reps = reps;
    return s;
}

std::string read_golden(const std::string &name) {
    std::ifstream in(std::string(QRC_GOLDEN_DIR) + "/" + name);
    REQUIRE(in.good());
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') out += line + "\n";
    }
    return out;
}

// Closed-form CNOT count of the brick pattern: each layer touches every
// adjacent pair once, three CNOTs per block.
std::size_t brick_cnots(std::size_t n_qubits) {
    std::size_t blocks = 0;
    for (int layer = 0; layer < 3; ++layer)
        for (std::size_t a = 0; a + 1 < n_qubits; ++a) ++blocks;
    return 3 * blocks;
}

} // namespace

TEST_CASE("CPMap with two features has no entangling blocks", "[feature_maps]") {
    const std::vector<double> x{0.3, 0.7};
    const Circuit c = build_cpmap(cpmap(2), x);
    REQUIRE(c.n_qubits() == 1);
    REQUIRE(c.size() == 2);
    REQUIRE(c.gates()[0] == Gate::ry(0, 0.3));
    REQUIRE(c.gates()[1] == Gate::rz(0, 0.7));
    REQUIRE(c.count(GateKind::CNOT) == 0);
}

TEST_CASE("CPMap on ten qubits uses 81 CNOTs", "[feature_maps]") {
    const std::vector<double> x(20, 0.4);
    const Circuit c = build_cpmap(cpmap(20), x);
    REQUIRE(c.n_qubits() == 10);
    REQUIRE(c.count(GateKind::CNOT) == 81);
    REQUIRE(c.count(GateKind::CNOT) <= 90);
}

TEST_CASE("CPMap with zero angles fixes |0...0>", "[feature_maps]") {
    FeatureMapSpec s = cpmap(8);
    s.thetas = {0, 0, 0, 0, 0, 0};
    const std::vector<double> x(8, 0.0);
    const StateVector psi = apply_circuit_pure(StateVector(4), build_cpmap(s, x));
    REQUIRE(std::norm(psi[0]) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("CPMap odd feature count gives only RY on the last qubit", "[feature_maps]") {
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
    const Circuit c = build_cpmap(cpmap(5), x);
    REQUIRE(c.n_qubits() == 3);
    REQUIRE(c.gates().back() == Gate::ry(2, 0.5));
}

TEST_CASE("qubit counts and CNOT budget", "[feature_maps][property]") {
    for (std::size_t f = 2; f <= 24; ++f) {
        const std::vector<double> x(f, 0.2);
        const Circuit c = build_cpmap(cpmap(f), x);
        REQUIRE(c.n_qubits() == (f + 1) / 2);
        REQUIRE(c.count(GateKind::CNOT) == brick_cnots((f + 1) / 2));
        if (f % 2 == 0) REQUIRE(c.count(GateKind::CNOT) == 9 * (f / 2 - 1));
        REQUIRE(build_zz(zz(f), x).n_qubits() == f);
    }
}

TEST_CASE("ZZ examples", "[feature_maps]") {
    const Circuit one = build_zz(zz(1), std::vector<double>{0.0});
    REQUIRE(one.size() == 2);
    REQUIRE(one.gates()[0] == Gate::h(0));
    REQUIRE(one.gates()[1] == Gate::phase(0, 0.0));
    const ProbDist p1 = probabilities(apply_circuit_pure(StateVector(1), one));
    REQUIRE(p1.probs[0] == Catch::Approx(0.5).margin(1e-14));

    // x = (pi, pi): oracle state from dense 4x4 products.
    const std::vector<double> x{std::numbers::pi, std::numbers::pi};
    const Circuit two = build_zz(zz(2), x);
    const oracle::Vec ref = oracle::circuit_unitary(two) * oracle::zero_state(2);
    const StateVector psi = apply_circuit_pure(StateVector(2), two);
    for (std::size_t s = 0; s < 4; ++s) {
        REQUIRE(std::abs(psi[s] - ref(static_cast<Eigen::Index>(s))) < 1e-12);
    }
    const auto z = z_expectations(probabilities(psi));
    REQUIRE(std::abs(z[0]) < 1e-12);
    REQUIRE(std::abs(z[1]) < 1e-12);

    const std::vector<double> x3{0.1, 0.2, 0.3};
    REQUIRE(build_zz(zz(3, 2), x3).size() == 2 * build_zz(zz(3, 1), x3).size());
}

TEST_CASE("padding", "[feature_maps]") {
    REQUIRE(pad_feedback(std::vector<double>{0.5}, 3) == std::vector<double>{0.5, 0, 0});
    const std::vector<double> z(10, 0.1);
    const auto padded = pad_feedback(z, 20);
    REQUIRE(padded.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) REQUIRE(padded[i] == (i < 10 ? 0.1 : 0.0));
    REQUIRE(pad_feedback(std::vector<double>{1.0, 2.0}, 2) == std::vector<double>{1.0, 2.0});
    REQUIRE_THROWS_AS(pad_feedback(std::vector<double>{1, 2, 3}, 2), Error);
}

TEST_CASE("composite examples", "[feature_maps]") {
    const std::vector<double> x{0.3, 1.1, 2.0, 0.4};
    const Circuit c = composite_circuit(cpmap(4), x, x);
    const ProbDist p = probabilities(apply_circuit_pure(StateVector(2), c));
    REQUIRE(p.probs[0] == Catch::Approx(1.0).margin(1e-10));

    FeatureMapSpec s = cpmap(4);
    s.thetas = {0, 0, 0, 0, 0, 0};
    const std::vector<double> zeros(2, 0.0);
    const Circuit zc = composite_circuit(s, x, zeros);
    const Circuit left = build_cpmap(s, x);
    for (std::size_t i = left.size(); i < zc.size(); ++i) {
        const Gate &g = zc.gates()[i];
        REQUIRE((g.kind == GateKind::CNOT || g.angle == 0.0));
    }

    // H P(pi) P(0) H = X
    const Circuit x1 = composite_circuit(zz(1), std::vector<double>{std::numbers::pi / 2},
                                         std::vector<double>{0.0});
    const oracle::Mat u = oracle::circuit_unitary(x1);
    REQUIRE((u - oracle::pauli('X')).cwiseAbs().maxCoeff() < 1e-12);
    const ProbDist px = probabilities(apply_circuit_pure(StateVector(1), x1));
    REQUIRE(px.probs[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("inverse identity for random inputs", "[feature_maps][property]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ang(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> th(-std::numbers::pi / 2, std::numbers::pi / 2);
    for (int trial = 0; trial < 100; ++trial) {
        const bool use_zz = trial % 2 == 1;
        const std::size_t f = use_zz ? 1 + static_cast<std::size_t>(trial % 6)
                                     : 2 + static_cast<std::size_t>(trial % 9);
        FeatureMapSpec s = use_zz ? zz(f, 1 + static_cast<std::size_t>(trial % 3)) : cpmap(f);
        for (double &t : s.thetas) t = th(rng);
        std::vector<double> x(f);
        for (double &v : x) v = ang(rng);
        const Circuit c = composite_circuit(s, x, x);
        const ProbDist p = probabilities(apply_circuit_pure(StateVector(s.n_qubits()), c));
        REQUIRE(p.probs[0] == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("builders are deterministic and do not wrap angles", "[feature_maps][property]") {
    const std::vector<double> x{0.1, 7.5, -3.0, 12.0};
    REQUIRE(build_cpmap(cpmap(4), x) == build_cpmap(cpmap(4), x));
    REQUIRE(build_zz(zz(4), x) == build_zz(zz(4), x));
    const Circuit c = build_cpmap(cpmap(4), x);
    REQUIRE(c.gates()[c.size() - 3].angle == 7.5);
    REQUIRE(c.gates()[c.size() - 1].angle == 12.0);
}

TEST_CASE("feature map errors", "[feature_maps]") {
    REQUIRE_THROWS_AS(build_cpmap(cpmap(1), std::vector<double>{0.1}), Error);
    REQUIRE_THROWS_AS(build_zz(zz(3), std::vector<double>{0.1, 0.2}), Error);
    FeatureMapSpec bad = cpmap(4);
    bad.thetas[2] = 2.0;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    REQUIRE_THROWS_AS(feature_map_kind_from_string("qaoa"), ConfigError);
}

TEST_CASE("printed circuits match golden files", "[feature_maps]") {
    FeatureMapSpec s = cpmap(4);
    s.thetas = {0.5, -0.25, 0.75, 0.125, -0.5, 0.25};
    REQUIRE(to_string(build_cpmap(s, std::vector<double>{0.5, 1.0, 1.5, 2.0})) ==
            read_golden("cpmap_f4.txt"));
    REQUIRE(to_string(build_zz(zz(2), std::vector<double>{0.5, 1.0})) ==
            read_golden("zz_f2.txt"));
}
