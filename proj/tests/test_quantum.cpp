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
#include "qrc/quantum.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace qrc;

namespace {

oracle::Vec to_eigen(const StateVector &psi) {
    oracle::Vec v(static_cast<Eigen::Index>(psi.dim()));
    for (std::size_t i = 0; i < psi.dim(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
    return v;
}

oracle::Mat to_eigen(const DensityMatrix &rho) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    oracle::Mat m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = rho(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return m;
}

StateVector from_eigen(std::size_t n, const oracle::Vec &v) {
    return {n, std::vector<Complex>(v.begin(), v.end())};
}

DensityMatrix from_eigen(std::size_t n, const oracle::Mat &m) {
    std::vector<Complex> e(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            e[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    return {n, std::move(e)};
}

double max_abs(const oracle::Mat &m) { return m.cwiseAbs().maxCoeff(); }

/// Gate-by-gate reference for the noisy channel.
oracle::Mat noisy_reference(oracle::Mat rho, const Circuit &c, const NoiseSpec &noise) {
    const std::size_t n = c.n_qubits();
    for (const Gate &g : c.gates()) {
        const oracle::Mat u = oracle::full_operator(n, g);
        rho = u * rho * u.adjoint();
        std::vector<std::size_t> qs{g.qubits[0]};
        if (g.arity() == 2) qs.push_back(g.qubits[1]);
        const double p = g.arity() == 2 ? noise.p2 : noise.p1;
        rho = oracle::depolarize_kraus(rho, n, qs, p);
        const double t = g.arity() == 2 ? noise.gate_time_2q : noise.gate_time_1q;
        const double gamma = std::isinf(noise.t1) ? 0.0 : 1.0 - std::exp(-t / noise.t1);
        for (std::size_t q : qs) rho = oracle::damp_kraus(rho, n, q, gamma);
    }
    return rho;
}

} // namespace

TEST_CASE("Hadamard examples", "[quantum]") {
    StateVector psi(1);
    psi.apply(Gate::h(0));
    const double s = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(psi[0] - Complex(s, 0)) < 1e-15);
    REQUIRE(std::abs(psi[1] - Complex(s, 0)) < 1e-15);

    // H Z H = X, with Z = RZ(pi) up to global phase -i.
    Circuit c(1);
    c.add(Gate::h(0)).add(Gate::rz(0, M_PI)).add(Gate::h(0));
    const oracle::Mat u = oracle::circuit_unitary(c);
    const oracle::Mat x = oracle::C(0, -1) * oracle::pauli('X');
    REQUIRE(max_abs(u - x) < 1e-12);
    const StateVector out = apply_circuit_pure(StateVector(1), c);
    REQUIRE(std::abs(out[0]) < 1e-12);
    REQUIRE(std::abs(std::abs(out[1]) - 1.0) < 1e-12);
}

TEST_CASE("Bell state", "[quantum]") {
    Circuit c(2);
    c.add(Gate::h(0)).add(Gate::cnot(0, 1));
    const StateVector psi = apply_circuit_pure(StateVector(2), c);
    const ProbDist p = probabilities(psi);
    REQUIRE(p.probs[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(p.probs[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(p.probs[2] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(p.probs[3] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("pure simulation matches dense unitaries", "[quantum][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        const Circuit c = oracle::random_circuit(n, 40, rng);
        const oracle::Vec psi0 = oracle::random_state(n, rng);
        const StateVector out = apply_circuit_pure(from_eigen(n, psi0), c);
        const oracle::Vec ref = oracle::circuit_unitary(c) * psi0;
        REQUIRE((to_eigen(out) - ref).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE(std::abs(out.norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("noiseless channel reproduces pure simulation", "[quantum][property]") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> width(1, 6), len(1, 40);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = width(rng);
        const Circuit c = oracle::random_circuit(n, len(rng), rng);
        const oracle::Vec psi0 = oracle::random_state(n, rng);
        const StateVector pure = apply_circuit_pure(from_eigen(n, psi0), c);
        const DensityMatrix rho =
            apply_circuit_noisy(DensityMatrix::from_pure(from_eigen(n, psi0)), c, NoiseSpec{});
        const oracle::Vec v = to_eigen(pure);
        REQUIRE(max_abs(to_eigen(rho) - v * v.adjoint()) < 1e-10);
    }
}

TEST_CASE("damping with gamma one sends |1> to |0>", "[quantum]") {
    LocalChannel ch({0});
    LocalChannel::Mat one(2, 2);
    one << 0, 0, 0, 1;
    const LocalChannel::Mat out = ch.amplitude_damp(one, 0, 1.0);
    LocalChannel::Mat zero(2, 2);
    zero << 1, 0, 0, 0;
    REQUIRE(max_abs(out - zero) < 1e-15);
}

TEST_CASE("depolarizing |+> against the Kraus sum and full mixing", "[quantum]") {
    // RZ(0) is the identity, so only the post-gate channel acts.
    Circuit c(1);
    c.add(Gate::rz(0, 0.0));
    StateVector plus(1);
    plus.apply(Gate::h(0));
    const oracle::Mat rho = to_eigen(DensityMatrix::from_pure(plus));
    NoiseSpec noise;
    noise.p1 = 0.75;
    const DensityMatrix out = apply_circuit_noisy(DensityMatrix::from_pure(plus), c, noise);
    // p = 3/4 leaves a quarter of the coherence: (1 - p) rho + p I/2.
    REQUIRE(max_abs(to_eigen(out) - oracle::depolarize_kraus(rho, 1, {0}, 0.75)) < 1e-12);
    REQUIRE(std::abs(out(0, 1) - Complex(0.125, 0.0)) < 1e-12);
    noise.p1 = 1.0;
    const DensityMatrix mixed = apply_circuit_noisy(DensityMatrix::from_pure(plus), c, noise);
    REQUIRE(max_abs(to_eigen(mixed) - 0.5 * oracle::Mat::Identity(2, 2)) < 1e-12);
}

TEST_CASE("local channels match Kraus sums", "[quantum][property]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double p = u(rng);
        const double gamma = u(rng);
        const oracle::Mat rho1 = oracle::random_density(1, rng);
        LocalChannel one({0});
        REQUIRE(max_abs(one.depolarize(rho1, {0}, p) -
                        oracle::depolarize_kraus(rho1, 1, {0}, p)) < 1e-10);
        REQUIRE(max_abs(one.amplitude_damp(rho1, 0, gamma) -
                        oracle::damp_kraus(rho1, 1, 0, gamma)) < 1e-10);

        const oracle::Mat rho2 = oracle::random_density(2, rng);
        LocalChannel two({0, 1});
        REQUIRE(max_abs(two.depolarize(rho2, {0, 1}, p) -
                        oracle::depolarize_kraus(rho2, 2, {0, 1}, p)) < 1e-10);
        REQUIRE(max_abs(two.amplitude_damp(rho2, 1, gamma) -
                        oracle::damp_kraus(rho2, 2, 1, gamma)) < 1e-10);
    }
}

TEST_CASE("fused noisy circuits match the gate-by-gate reference", "[quantum][property]") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    std::uniform_real_distribution<double> t1(0.5, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        NoiseSpec noise;
        noise.p1 = u(rng);
        noise.p2 = u(rng);
        noise.t1 = t1(rng);
        const Circuit c = oracle::random_circuit(n, 25, rng);
        const oracle::Mat rho0 = oracle::random_density(n, rng);
        const DensityMatrix out = apply_circuit_noisy(from_eigen(n, rho0), c, noise);
        REQUIRE(max_abs(to_eigen(out) - noisy_reference(rho0, c, noise)) < 1e-10);
        REQUIRE(std::abs(out.trace() - 1.0) < 1e-10);
        REQUIRE(out.hermiticity_error() < 1e-10);
        const Eigen::SelfAdjointEigenSolver<oracle::Mat> es(to_eigen(out));
        REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("depolarizing has the maximally mixed state as a fixed point", "[quantum][property]") {
    NoiseSpec noise;
    noise.p1 = 0.3;
    noise.p2 = 0.2;
    Circuit c(3);
    c.add(Gate::rz(0, 0.0)).add(Gate::cz(1, 2)).add(Gate::rz(2, 0.0));
    const DensityMatrix out =
        apply_circuit_noisy(from_eigen(3, oracle::Mat(oracle::Mat::Identity(8, 8) / 8.0)), c, noise);
    REQUIRE(max_abs(to_eigen(out) - oracle::Mat::Identity(8, 8) / 8.0) < 1e-12);
}

TEST_CASE("damping never lowers the ground-state population", "[quantum][property]") {
    std::mt19937_64 rng(15);
    NoiseSpec noise;
    noise.t1 = 1.0;
    Circuit idle(1);
    idle.add(Gate::rz(0, 0.0));
    for (int trial = 0; trial < 20; ++trial) {
        DensityMatrix rho = from_eigen(1, oracle::random_density(1, rng));
        double p0 = rho(0, 0).real();
        for (int k = 0; k < 10; ++k) {
            rho = apply_circuit_noisy(rho, idle, noise);
            REQUIRE(rho(0, 0).real() >= p0 - 1e-14);
            p0 = rho(0, 0).real();
        }
    }
}

TEST_CASE("readout confusion on |10>", "[quantum]") {
    ProbDist p{2, {0.0, 0.0, 1.0, 0.0}};
    apply_readout_noise(p, 0.1);
    REQUIRE(p.probs[0] == Catch::Approx(0.09).margin(1e-15));
    REQUIRE(p.probs[1] == Catch::Approx(0.01).margin(1e-15));
    REQUIRE(p.probs[2] == Catch::Approx(0.81).margin(1e-15));
    REQUIRE(p.probs[3] == Catch::Approx(0.09).margin(1e-15));
}

TEST_CASE("readout confusion equals the Kronecker confusion matrix", "[quantum][property]") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        const double eps = 0.5 * u(rng);
        const std::size_t d = std::size_t{1} << n;
        std::vector<double> probs(d);
        double sum = 0.0;
        for (double &x : probs) sum += (x = u(rng));
        for (double &x : probs) x /= sum;
        Eigen::MatrixXd m1(2, 2);
        m1 << 1 - eps, eps, eps, 1 - eps;
        Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
        for (std::size_t q = 0; q < n; ++q) {
            Eigen::MatrixXd k(m.rows() * 2, m.cols() * 2);
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = m(i, j) * m1;
            m = k;
        }
        const Eigen::VectorXd ref =
            m * Eigen::Map<const Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(d));
        ProbDist p{n, probs};
        apply_readout_noise(p, eps);
        for (std::size_t s = 0; s < d; ++s) {
            REQUIRE(std::abs(p.probs[s] - ref(static_cast<Eigen::Index>(s))) < 1e-14);
        }
    }
}

TEST_CASE("Z expectations match bitstring sums and operator application", "[quantum][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        const oracle::Vec v = oracle::random_state(n, rng);
        const ProbDist p = probabilities(from_eigen(n, v));
        const std::vector<double> z = z_expectations(p);
        for (std::size_t q = 0; q < n; ++q) {
            double sum = 0.0;
            for (std::size_t s = 0; s < p.probs.size(); ++s) {
                // bit of qubit q when the bitstring is read left to right
                const int bit = static_cast<int>((s >> (n - 1 - q)) & 1U);
                sum += (bit == 0 ? 1.0 : -1.0) * p.probs[s];
            }
            REQUIRE(std::abs(z[q] - sum) < 1e-12);
            REQUIRE(std::abs(z[q] - oracle::z_direct(v, n, q)) < 1e-12);
        }
    }
}

TEST_CASE("dagger is an involution and inverts circuits", "[quantum][property]") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        const Circuit c = oracle::random_circuit(n, 30, rng);
        REQUIRE(dagger(dagger(c)) == c);
        Circuit both = c;
        both.append(dagger(c));
        const StateVector out = apply_circuit_pure(StateVector(n), both);
        REQUIRE(std::abs(std::norm(out[0]) - 1.0) < 1e-10);
    }
}

TEST_CASE("reduced states match projector sums", "[quantum][property]") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        const oracle::Vec v = oracle::random_state(n, rng);
        const StateVector psi = from_eigen(n, v);
        for (std::size_t q = 0; q < n; ++q) {
            const DensityMatrix r = reduced_single_qubit(psi, q);
            REQUIRE(max_abs(to_eigen(r) - oracle::partial_trace_projectors(v, n, q)) < 1e-12);
        }
    }
    REQUIRE_THROWS_AS(reduced_single_qubit(StateVector(2), 2), Error);
}

TEST_CASE("entanglement entropy examples and bounds", "[quantum][property]") {
    StateVector basis(3);
    basis.apply(Gate::rx(1, M_PI));
    REQUIRE(entanglement_entropy_avg(basis) == Catch::Approx(0.0).margin(1e-12));

    Circuit bell(2);
    bell.add(Gate::h(0)).add(Gate::cnot(0, 1));
    REQUIRE(entanglement_entropy_avg(apply_circuit_pure(StateVector(2), bell)) ==
            Catch::Approx(1.0).margin(1e-12));

    Circuit ghz(4);
    ghz.add(Gate::h(0)).add(Gate::cnot(0, 1)).add(Gate::cnot(1, 2)).add(Gate::cnot(2, 3));
    REQUIRE(entanglement_entropy_avg(apply_circuit_pure(StateVector(4), ghz)) ==
            Catch::Approx(1.0).margin(1e-12));

    std::mt19937_64 rng(20);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        const double s = entanglement_entropy_avg(from_eigen(n, oracle::random_state(n, rng)));
        REQUIRE(s >= -1e-12);
        REQUIRE(s <= 1.0 + 1e-12);
        if (n == 1) REQUIRE(s < 1e-6);
    }
}

TEST_CASE("prefix-cached simulation equals uncached simulation", "[quantum][property]") {
    std::mt19937_64 rng(21);
    for (bool noisy : {false, true}) {
        NoiseSpec noise;
        if (noisy) {
            noise.p1 = 1e-2;
            noise.p2 = 2e-2;
            noise.t1 = 30.0;
            noise.readout_eps = 0.03;
        }
        PrefixCachedSimulator sim(noise);
        REQUIRE(sim.uses_density_matrix() == noisy);
        const Circuit prefix = oracle::random_circuit(4, 20, rng);
        for (int step = 0; step < 8; ++step) {
            Circuit c = prefix;
            c.append(oracle::random_circuit(4, 10, rng));
            const ProbDist cached = sim.run(c);
            ProbDist direct = noisy ? probabilities(apply_circuit_noisy(DensityMatrix(4), c, noise),
                                                    &noise)
                                    : probabilities(apply_circuit_pure(StateVector(4), c));
            for (std::size_t s = 0; s < direct.probs.size(); ++s) {
                REQUIRE(std::abs(cached.probs[s] - direct.probs[s]) < 1e-12);
            }
        }
    }
}

TEST_CASE("invalid inputs are rejected", "[quantum]") {
    Circuit c(2);
    REQUIRE_THROWS_AS(c.add(Gate::h(2)), Error);
    REQUIRE_THROWS_AS(c.add(Gate::cnot(1, 1)), Error);
    REQUIRE_THROWS_AS(StateVector(2, std::vector<Complex>(3)), Error);
    NoiseSpec bad;
    bad.p1 = 1.5;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = NoiseSpec{};
    bad.t1 = 0.0;
    REQUIRE_THROWS_AS(PrefixCachedSimulator(bad), ConfigError);
    Circuit three(3);
    REQUIRE_THROWS_AS(c.append(three), Error);
}
