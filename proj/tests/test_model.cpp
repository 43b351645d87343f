#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>

#include "nmgle/errors.hpp"
#include "nmgle/model.hpp"
#include "test_helpers.hpp"

using namespace nmgle;
using nmgle::testing::kTwoPi;

TEST_SUITE_BEGIN("model");

TEST_CASE("lattice n_max=1 holds the six axis wave vectors") {
    const ModeLattice lattice = testing::unit_lattice(1);
    CHECK(lattice.modes.size() == 12);  // 6 wave vectors x 2 polarizations
    for (const Mode& m : lattice.modes) {
        CHECK(m.omega == doctest::Approx(1.0).epsilon(1e-14));
        // axis vectors only: exactly one nonzero component
        int nonzero = (m.k.x != 0.0) + (m.k.y != 0.0) + (m.k.z != 0.0);
        CHECK(nonzero == 1);
    }
}

TEST_CASE("lattice point count matches brute-force enumeration") {
    // independent oracle: count integer vectors with 0 < |n| <= n_max
    for (int n_max : {1, 2, 3}) {
        std::size_t count = 0;
        for (int nx = -n_max; nx <= n_max; ++nx) {
            for (int ny = -n_max; ny <= n_max; ++ny) {
                for (int nz = -n_max; nz <= n_max; ++nz) {
                    const int nsq = nx * nx + ny * ny + nz * nz;
                    if (nsq > 0 && nsq <= n_max * n_max) ++count;
                }
            }
        }
        const ModeLattice lattice = testing::unit_lattice(n_max);
        CHECK(lattice.modes.size() == 2 * count);
    }
    CHECK(testing::unit_lattice(2).modes.size() == 64);
}

TEST_CASE("degenerate lattice configs are rejected") {
    ParticleParams params;
    CHECK_THROWS_AS(build_lattice(kTwoPi, 0, UnitsConfig{}, params), ConfigError);
    CHECK_THROWS_AS(build_lattice(0.0, 1, UnitsConfig{}, params), ConfigError);
    CHECK_THROWS_AS(build_lattice(-1.0, 1, UnitsConfig{}, params), ConfigError);
}

TEST_CASE("polarization basis convention at z-hat") {
    const auto [e1, e2] = polarization_basis({0.0, 0.0, 1.0});
    CHECK(e1.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e1.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e1.z == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e2.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e2.y == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e2.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("polarization basis is orthonormal-transverse for arbitrary directions") {
    // Gram-Schmidt-style oracle: unit length, mutual orthogonality,
    // transversality, right-handedness
    RngStream stream = derive_stream(11, 0);
    auto check_frame = [](const Vec3& k) {
        const auto [e1, e2] = polarization_basis(k);
        CHECK(std::abs(norm(e1) - 1.0) < 1e-12);
        CHECK(std::abs(norm(e2) - 1.0) < 1e-12);
        CHECK(std::abs(dot(e1, k) / norm(k)) < 1e-12);
        CHECK(std::abs(dot(e2, k) / norm(k)) < 1e-12);
        CHECK(std::abs(dot(e1, e2)) < 1e-12);
        const Vec3 khat = normalized(k);
        CHECK(norm(cross(e1, e2) - khat) < 1e-12);
    };
    check_frame(normalized({1.0, 1.0, 1.0}));
    for (int i = 0; i < 200; ++i) {
        const Vec3 k{stream.gaussian(), stream.gaussian(), stream.gaussian()};
        if (norm(k) < 1e-6) continue;
        check_frame(k);
    }
    CHECK_THROWS_AS(polarization_basis({0.0, 0.0, 0.0}), DegenerateDirectionError);
}

TEST_CASE("coupling amplitude formula") {
    ModeLattice lattice;
    lattice.quantization_volume = 1.0;
    lattice.units = UnitsConfig{};
    Mode mode;
    mode.omega = 2.0;
    ParticleParams params{1.0, 1.0, 1.0};
    CHECK(coupling_v0(mode, params, lattice, lattice.units) == doctest::Approx(-0.5).epsilon(1e-15));

    params.charge = 0.0;
    CHECK(coupling_v0(mode, params, lattice, lattice.units) == 0.0);

    mode.omega = 0.5;
    params = ParticleParams{0.5, 1.0, 1.0};  // e/m = 2
    CHECK(coupling_v0(mode, params, lattice, lattice.units) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("lattice modes store the box coupling") {
    const ModeLattice lattice = testing::unit_lattice(2);
    const ParticleParams params{1.0, 1.0, 1.0};
    for (const Mode& m : lattice.modes) {
        CHECK(m.v0 == coupling_v0(m, params, lattice, lattice.units));
        CHECK(m.v0 < 0.0);  // positive charge-to-mass ratio
    }
}

TEST_CASE("free-state Hamiltonian is kinetic only") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{2.0, 1.0, 1.0};
    SystemState state{0.0, {0.3, -0.7, 0.2}, {1.0, 2.0, -2.0}, {}};
    state.alphas.assign(lattice.modes.size(), Complex{0.0, 0.0});
    const double expected = dot(state.p, state.p) / (2.0 * params.mass);
    CHECK(hamiltonian(state, lattice, params, Approximation::Dipole) ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(hamiltonian(state, lattice, params, Approximation::Quadrupole) ==
          doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("single excited mode carries hbar omega |alpha|^2") {
    const ModeLattice lattice = testing::single_mode_lattice(2.0, -0.5);
    ParticleParams params{1.0, 1.0, 1.0};
    SystemState state{0.0, {}, {}, {Complex{1.0, 0.0}}};
    CHECK(hamiltonian(state, lattice, params, Approximation::Dipole) ==
          doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("Hamiltonian matches an independent term-by-term oracle") {
    const ModeLattice lattice = testing::unit_lattice(2);
    const ParticleParams params{1.3, 0.8, 0.9};
    const ModeLattice lat = build_lattice(kTwoPi, 2, UnitsConfig{}, params);
    SystemState state{0.0, {0.21, -0.4, 0.05}, {0.9, -1.1, 0.35}, testing::random_amplitudes(lat, 5)};

    // oracle: real-arithmetic expressions, separate code path
    double dip = dot(state.p, state.p) / (2.0 * params.mass);
    double quad = dip;
    for (std::size_t m = 0; m < lat.modes.size(); ++m) {
        const Mode& mode = lat.modes[m];
        const double occ = std::norm(state.alphas[m]);
        dip += mode.omega * occ;
        quad += mode.omega * occ;
        dip += 2.0 * mode.v0 * dot(mode.eps(), state.p) * state.alphas[m].real();
        quad += -2.0 * mode.v0 * dot(mode.eps(), state.p) * dot(mode.k, state.x) *
                state.alphas[m].imag();
    }
    const double h_dip = hamiltonian(state, lat, params, Approximation::Dipole);
    const double h_quad = hamiltonian(state, lat, params, Approximation::Quadrupole);
    CHECK(testing::rel_diff(h_dip, dip) < 1e-12);
    CHECK(testing::rel_diff(h_quad, quad) < 1e-12);
}

TEST_CASE("quadrupole interaction term is real") {
    const ParticleParams params{1.0, 1.0, 1.0};
    const ModeLattice lat = build_lattice(kTwoPi, 2, UnitsConfig{}, params);
    SystemState state{0.0, {0.4, 0.2, -0.3}, {1.2, -0.5, 0.8}, testing::random_amplitudes(lat, 9)};
    const HamiltonianParts parts = hamiltonian_parts(state, lat, params, Approximation::Quadrupole);
    const double scale = std::max(1.0, std::abs(parts.interaction.real()));
    CHECK(std::abs(parts.interaction.imag()) < 1e-12 * scale);
}

TEST_CASE("modes are ordered lexicographically in n, then polarization") {
    const ModeLattice lattice = testing::unit_lattice(2);
    const double k_unit = 2.0 * 3.14159265358979323846 / lattice.box_length;
    auto key = [&](const Mode& m) {
        const long nx = std::lround(m.k.x / k_unit);
        const long ny = std::lround(m.k.y / k_unit);
        const long nz = std::lround(m.k.z / k_unit);
        return std::array<long, 4>{nx, ny, nz, static_cast<long>(m.polarization)};
    };
    for (std::size_t i = 1; i < lattice.modes.size(); ++i) {
        CHECK(key(lattice.modes[i - 1]) < key(lattice.modes[i]));
    }
}

TEST_CASE("lattice construction is bit-deterministic") {
    const ModeLattice a = testing::unit_lattice(2);
    const ModeLattice b = testing::unit_lattice(2);
    REQUIRE(a.modes.size() == b.modes.size());
    CHECK(std::memcmp(a.modes.data(), b.modes.data(), a.modes.size() * sizeof(Mode)) == 0);
}

TEST_CASE("every mode has a mirror at -k with equal omega and coupling") {
    const ModeLattice lattice = testing::unit_lattice(2);
    for (const Mode& m : lattice.modes) {
        bool found = false;
        for (const Mode& other : lattice.modes) {
            if (other.polarization != m.polarization) continue;
            if (norm(other.k + m.k) < 1e-14) {
                CHECK(other.omega == m.omega);
                CHECK(other.v0 == m.v0);
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("amplitude count mismatch is a shape error") {
    const ModeLattice lattice = testing::unit_lattice(1);
    SystemState state{0.0, {}, {}, std::vector<Complex>(3)};
    CHECK_THROWS_AS(hamiltonian(state, lattice, ParticleParams{}, Approximation::Dipole),
                    StateShapeError);
}

TEST_SUITE_END();
