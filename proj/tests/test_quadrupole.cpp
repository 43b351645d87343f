#include <doctest.h>

#include <cmath>
#include <vector>

#include "nmgle/errors.hpp"
#include "nmgle/quadrupole.hpp"
#include "test_helpers.hpp"

using namespace nmgle;

TEST_SUITE_BEGIN("quadrupole");

TEST_CASE("position-linear coupling values") {
    ModeLattice lattice = testing::single_mode_lattice(1.0, 1.0);
    Mode& mode = lattice.modes[0];
    // transverse momentum factor vanishes
    const Vec3 p_transverse = mode.k * 2.0;
    CHECK(coupling_vq(mode, p_transverse, {1.0, 2.0, 3.0}) == Complex{0.0, 0.0});
    // direct product: v0 = 1, eps.p = 2, k.x = 3 -> 6i
    const Vec3 p = mode.eps() * 2.0;
    const Vec3 x = normalized(mode.k) * (3.0 / norm(mode.k));
    const Complex v = coupling_vq(mode, p, x);
    CHECK(v.real() == 0.0);
    CHECK(v.imag() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("coupling is always pure imaginary") {
    const ModeLattice lattice = testing::unit_lattice(2);
    RngStream stream = derive_stream(31, 0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 p{stream.gaussian(), stream.gaussian(), stream.gaussian()};
        const Vec3 x{stream.gaussian(), stream.gaussian(), stream.gaussian()};
        for (const Mode& m : lattice.modes) CHECK(coupling_vq(m, p, x).real() == 0.0);
    }
}

TEST_CASE("real amplitudes exert no quadrupole force") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{2.0, 1.0, 1.0};
    std::vector<Complex> alphas(lattice.size(), Complex{0.7, 0.0});  // Im = 0
    SystemState state{0.0, {0.3, -0.2, 0.5}, {1.0, 0.4, -0.1}, alphas};
    const StateDerivative d = eom_quadrupole_local(state, lattice, params, Vec3{});
    CHECK(norm(d.dx - state.p * 0.5) < 1e-15);
    CHECK(norm(d.dp) == 0.0);
}

TEST_CASE("chargeless particle decouples") {
    const ModeLattice lattice = testing::unit_lattice(1, 1.0, 0.0);
    const ParticleParams params{1.0, 0.0, 1.0};
    SystemState state{0.0, {0.1, 0.1, 0.1}, {2.0, 0.0, 0.0},
                      testing::random_amplitudes(lattice, 4)};
    const StateDerivative d = eom_quadrupole_local(state, lattice, params, Vec3{});
    CHECK(norm(d.dx - Vec3{2.0, 0.0, 0.0}) < 1e-15);
    CHECK(norm(d.dp) == 0.0);
}

TEST_CASE("one-mode rates match a hand evaluation") {
    // omega = 2, v0 = -0.5, k = 2 z-hat, eps = x-hat; x = (0,0,0.75) so
    // k.x = 1.5; p = (2,0,0) so eps.p = 2; alpha = 0.3 + 0.4i; m = 1:
    //   W  = v0 (eps.p)(k.x) = -1.5
    //   dx = p/m - 2 v0 (k.x)(Im a) eps = (2,0,0) + 0.6 x-hat = (2.6,0,0)
    //   dp = 2 v0 (eps.p)(Im a) k = 2(-0.5)(2)(0.4)(0,0,2) = (0,0,-1.6)
    //   da = -i w a - W = (1.5 + 0.8) + (-0.6) i
    const ModeLattice lattice = testing::single_mode_lattice(2.0, -0.5);
    const ParticleParams params{1.0, 1.0, 1.0};
    SystemState state{0.0, {0.0, 0.0, 0.75}, {2.0, 0.0, 0.0}, {Complex{0.3, 0.4}}};
    const StateDerivative d = eom_quadrupole_local(state, lattice, params, Vec3{});
    CHECK(d.dx.x == doctest::Approx(2.6).epsilon(1e-14));
    CHECK(std::abs(d.dx.y) < 1e-15);
    CHECK(std::abs(d.dx.z) < 1e-15);
    CHECK(std::abs(d.dp.x) < 1e-15);
    CHECK(d.dp.z == doctest::Approx(-1.6).epsilon(1e-14));
    CHECK(d.dalphas[0].real() == doctest::Approx(2.3).epsilon(1e-14));
    CHECK(d.dalphas[0].imag() == doctest::Approx(-0.6).epsilon(1e-14));
}

TEST_CASE("free flight without charge is exact") {
    const ModeLattice lattice = testing::unit_lattice(1, 1.0, 0.0);
    const ParticleParams params{1.0, 0.0, 1.0};
    SystemState s0{0.0, {}, {0.5, -1.0, 0.25}, std::vector<Complex>(lattice.size())};
    const Trajectory traj =
        integrate_quadrupole_local(s0, lattice, params, TimeGrid{0.0, 0.01, 300});
    for (std::size_t i = 0; i <= 300; ++i) {
        const double t = 0.01 * static_cast<double>(i);
        CHECK(norm(traj.states[i].x - s0.p * t) < 1e-12);
    }
}

TEST_CASE("local energy drift stays below 1e-6 over ten periods") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    SystemState s0{0.0, {0.2, 0.1, -0.15}, {1.0, 0.3, -0.2},
                   testing::random_amplitudes(lattice, 12, 0.7)};
    const TimeGrid grid{0.0, 1e-3, 10000};
    const Trajectory traj = integrate_quadrupole_local(s0, lattice, params, grid);
    const double e0 = traj.energies.front();
    double drift = 0.0;
    for (double e : traj.energies) drift = std::max(drift, std::abs(e - e0));
    CHECK(drift / std::abs(e0) < 1e-6);
}

TEST_CASE("independently evolved conjugate amplitudes track conj(alpha)") {
    // dual-integration oracle: integrate (x, p, abar) with the conjugate
    // amplitude equation dabar = +i w abar - W/hbar and the forces written in
    // terms of Im(alpha) = -Im(abar); compare against the standard system
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 19, 0.6);
    SystemState s0{0.0, {0.2, -0.1, 0.3}, {0.9, 0.2, -0.4}, alphas0};
    const TimeGrid grid{0.0, 1e-3, 2000};
    const Trajectory traj = integrate_quadrupole_local(s0, lattice, params, grid);

    const std::size_t nm = lattice.size();
    Vec3 x = s0.x, p = s0.p;
    std::vector<Complex> abar(nm);
    for (std::size_t m = 0; m < nm; ++m) abar[m] = std::conj(alphas0[m]);

    auto deriv = [&](const Vec3& xx, const Vec3& pp, const std::vector<Complex>& ab, Vec3& dx,
                     Vec3& dp, std::vector<Complex>& dab) {
        dx = pp * (1.0 / params.mass);
        dp = Vec3{};
        for (std::size_t m = 0; m < nm; ++m) {
            const Mode& mode = lattice.modes[m];
            const double im_alpha = -ab[m].imag();
            const double w_sig = mode.v0 * dot(mode.eps(), pp) * dot(mode.k, xx);
            dx += (-2.0 * mode.v0 * dot(mode.k, xx) * im_alpha) * mode.eps();
            dp += (2.0 * mode.v0 * dot(mode.eps(), pp) * im_alpha) * mode.k;
            dab[m] = Complex{0.0, mode.omega} * ab[m] - Complex{w_sig, 0.0};
        }
    };

    Vec3 k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
    std::vector<Complex> k1a(nm), k2a(nm), k3a(nm), k4a(nm), tmp(nm);
    const double dt = grid.dt;
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        deriv(x, p, abar, k1x, k1p, k1a);
        for (std::size_t m = 0; m < nm; ++m) tmp[m] = abar[m] + 0.5 * dt * k1a[m];
        deriv(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, tmp, k2x, k2p, k2a);
        for (std::size_t m = 0; m < nm; ++m) tmp[m] = abar[m] + 0.5 * dt * k2a[m];
        deriv(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, tmp, k3x, k3p, k3a);
        for (std::size_t m = 0; m < nm; ++m) tmp[m] = abar[m] + dt * k3a[m];
        deriv(x + dt * k3x, p + dt * k3p, tmp, k4x, k4p, k4a);
        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        for (std::size_t m = 0; m < nm; ++m) {
            abar[m] += (dt / 6.0) * (k1a[m] + 2.0 * k2a[m] + 2.0 * k3a[m] + k4a[m]);
        }
    }

    CHECK(norm(x - traj.states.back().x) < 1e-10);
    CHECK(norm(p - traj.states.back().p) < 1e-10);
    for (std::size_t m = 0; m < nm; ++m) {
        CHECK(std::abs(std::conj(abar[m]) - traj.states.back().alphas[m]) < 1e-10);
    }
}

TEST_CASE("initial-condition forces vanish for vacuum amplitudes") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const std::vector<Complex> zeros(lattice.size());
    const RandomForceRealization f =
        random_forces(1.3, {0.4, 0.1, -0.2}, {1.0, 0.0, 0.5}, zeros, lattice, ParticleParams{});
    CHECK(norm(f.f_q) == 0.0);
    CHECK(norm(f.f_p) == 0.0);
}

TEST_CASE("single-mode force directions follow the mode geometry") {
    const ModeLattice lattice = testing::single_mode_lattice(1.5, -0.3);
    const Mode& mode = lattice.modes[0];
    const std::vector<Complex> alphas0{Complex{0.8, -0.5}};
    const RandomForceRealization f = random_forces(0.7, {0.3, -0.4, 0.6}, {1.2, 0.5, -0.9},
                                                   alphas0, lattice, ParticleParams{});
    CHECK(norm(cross(f.f_q, mode.eps())) < 1e-12 * std::max(1.0, norm(f.f_q)));
    CHECK(norm(cross(f.f_p, mode.k)) < 1e-12 * std::max(1.0, norm(f.f_p)));
}

TEST_CASE("uniform-phase initial conditions average to zero force") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const Vec3 x{0.3, -0.2, 0.5};
    const Vec3 p{1.0, 0.4, -0.3};
    const std::size_t n_draws = 10000;
    const double t = 1.7;

    Vec3 mean_q{}, mean_p{};
    std::vector<Vec3> qs(n_draws), ps(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
        RngStream stream = derive_stream(99, i);
        const auto alphas0 =
            sample_initial_modes(lattice, InitialModeDist::fixed_occupation(1.0), stream);
        const RandomForceRealization f = random_forces(t, x, p, alphas0, lattice, ParticleParams{});
        qs[i] = f.f_q;
        ps[i] = f.f_p;
        mean_q += f.f_q;
        mean_p += f.f_p;
    }
    mean_q *= 1.0 / static_cast<double>(n_draws);
    mean_p *= 1.0 / static_cast<double>(n_draws);

    auto stderr_of = [&](const std::vector<Vec3>& vs, const Vec3& mean, double Vec3::*c) {
        double ss = 0.0;
        for (const Vec3& v : vs) ss += (v.*c - mean.*c) * (v.*c - mean.*c);
        return std::sqrt(ss / (static_cast<double>(n_draws) * (static_cast<double>(n_draws) - 1)));
    };
    for (double Vec3::*c : {&Vec3::x, &Vec3::y, &Vec3::z}) {
        CHECK(std::abs(mean_q.*c) <= 3.0 * stderr_of(qs, mean_q, c) + 1e-14);
        CHECK(std::abs(mean_p.*c) <= 3.0 * stderr_of(ps, mean_p, c) + 1e-14);
    }
}

TEST_CASE("reduced equals free flight for vacuum initial data and no charge") {
    const ModeLattice lattice = testing::unit_lattice(1, 1.0, 0.0);
    const ParticleParams params{1.0, 0.0, 1.0};
    const std::vector<Complex> zeros(lattice.size());
    const Trajectory traj =
        integrate_quadrupole_reduced({0.0, 0.0, 0.0}, {1.0, 0.5, 0.0}, zeros, lattice, params,
                                     TimeGrid{0.0, 0.01, 200}, ConvolutionMethod::Incremental);
    for (std::size_t i = 0; i <= 200; ++i) {
        const double t = 0.01 * static_cast<double>(i);
        CHECK(norm(traj.states[i].x - Vec3{t, 0.5 * t, 0.0}) < 1e-12);
    }
}

TEST_CASE("reduced and local formulations generate the same trajectory") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 23, 0.7);
    const Vec3 x0{0.2, 0.1, -0.15};
    const Vec3 p0{1.0, 0.3, -0.2};
    const TimeGrid grid{0.0, 1e-3, 4000};

    const Trajectory local =
        integrate_quadrupole_local({0.0, x0, p0, alphas0}, lattice, params, grid);
    const Trajectory reduced = integrate_quadrupole_reduced(x0, p0, alphas0, lattice, params, grid,
                                                            ConvolutionMethod::Incremental);
    double scale_x = 0.0, scale_p = 0.0, div_x = 0.0, div_p = 0.0;
    for (std::size_t i = 0; i <= grid.n_steps; ++i) {
        scale_x = std::max(scale_x, norm_inf(local.states[i].x));
        scale_p = std::max(scale_p, norm_inf(local.states[i].p));
        div_x = std::max(div_x, norm_inf(local.states[i].x - reduced.states[i].x));
        div_p = std::max(div_p, norm_inf(local.states[i].p - reduced.states[i].p));
    }
    CHECK(div_x / scale_x < 1e-4);
    CHECK(div_p / scale_p < 1e-4);

    // reconstructed amplitudes track the local ones
    double amp_err = 0.0;
    for (std::size_t m = 0; m < lattice.size(); ++m) {
        amp_err = std::max(amp_err, std::abs(local.states.back().alphas[m] -
                                             reduced.states.back().alphas[m]));
    }
    CHECK(amp_err < 1e-4);
}

TEST_CASE("the formulations stay matched under external noise") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 29, 0.5);
    const TimeGrid grid{0.0, 1e-3, 2000};
    RngStream stream = derive_stream(3, 7);
    const NoisePath path = ou_noise_path(NoiseConfig{0.5, 1.0, true}, grid, stream);

    const Trajectory local = integrate_quadrupole_local(
        {0.0, {0.1, 0.0, 0.2}, {1.0, -0.2, 0.0}, alphas0}, lattice, params, grid, &path);
    const Trajectory reduced =
        integrate_quadrupole_reduced({0.1, 0.0, 0.2}, {1.0, -0.2, 0.0}, alphas0, lattice, params,
                                     grid, ConvolutionMethod::Incremental, &path);
    double div = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= grid.n_steps; ++i) {
        div = std::max(div, norm_inf(local.states[i].x - reduced.states[i].x));
        div = std::max(div, norm_inf(local.states[i].p - reduced.states[i].p));
        scale = std::max(scale, norm_inf(local.states[i].p));
    }
    CHECK(div / scale < 1e-3);
}

TEST_CASE("naive and incremental reduced trajectories are identical to rounding") {
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 41, 0.7);
    const Vec3 x0{0.15, -0.1, 0.2};
    const Vec3 p0{0.9, 0.4, -0.3};
    const TimeGrid grid{0.0, 2e-3, 1500};

    const Trajectory a = integrate_quadrupole_reduced(x0, p0, alphas0, lattice, params, grid,
                                                      ConvolutionMethod::Naive);
    const Trajectory b = integrate_quadrupole_reduced(x0, p0, alphas0, lattice, params, grid,
                                                      ConvolutionMethod::Incremental);
    double div = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= grid.n_steps; ++i) {
        div = std::max(div, norm_inf(a.states[i].x - b.states[i].x));
        div = std::max(div, norm_inf(a.states[i].p - b.states[i].p));
        scale = std::max(scale, std::max(norm_inf(a.states[i].x), norm_inf(a.states[i].p)));
    }
    CHECK(div / scale < 1e-9);

    // the recorded observables must match too, including the reconstructed
    // amplitudes behind them
    for (std::size_t i = 0; i <= grid.n_steps; i += 100) {
        CHECK(testing::rel_diff(a.energies[i], b.energies[i]) < 1e-9);
        CHECK(testing::rel_diff(a.photon_numbers[i], b.photon_numbers[i]) < 1e-9);
    }
}

TEST_CASE("one-mode trajectories match a frozen independent reference") {
    // reference values from a separate NumPy implementation of the same
    // equations and steppers (RK4 for the local system, Heun + trapezoid for
    // the reduced one), frozen at t = 1
    const ModeLattice lattice = testing::single_mode_lattice(2.0, -0.5);
    const ParticleParams params{1.0, 1.0, 1.0};
    const Vec3 x0{0.0, 0.0, 0.75};
    const Vec3 p0{2.0, 0.0, 0.0};
    const std::vector<Complex> a0{Complex{0.3, 0.4}};
    const TimeGrid grid{0.0, 1e-3, 1000};

    const Trajectory local = integrate_quadrupole_local({0.0, x0, p0, a0}, lattice, params, grid);
    const SystemState& ql = local.states.back();
    CHECK(std::abs(ql.x.x - 1.3943101408631831) < 1e-11);
    CHECK(std::abs(ql.x.y) < 1e-15);
    CHECK(std::abs(ql.x.z - 0.92893198471662775) < 1e-11);
    CHECK(std::abs(ql.p.x - 2.0) < 1e-15);
    CHECK(std::abs(ql.p.z - 1.6618795330782055) < 1e-11);
    CHECK(std::abs(ql.alphas[0] - Complex{0.88353010320188252, -1.4206923870972794}) < 1e-11);

    const Trajectory reduced = integrate_quadrupole_reduced(x0, p0, a0, lattice, params, grid,
                                                            ConvolutionMethod::Incremental);
    const SystemState& qr = reduced.states.back();
    CHECK(std::abs(qr.x.x - 1.3943115280202016) < 1e-11);
    CHECK(std::abs(qr.x.z - 0.92893098886172543) < 1e-11);
    CHECK(std::abs(qr.p.z - 1.6618790406631885) < 1e-11);
}

TEST_CASE("formulation equivalence holds for a nonzero start time") {
    // the reduced memory integral and free-evolution phases run on elapsed
    // time; shifting the grid origin must not break the match
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 53, 0.6);
    const TimeGrid grid{-2.5, 1e-3, 2000};
    const Vec3 x0{0.1, 0.2, -0.1};
    const Vec3 p0{0.8, -0.3, 0.5};
    const Trajectory local =
        integrate_quadrupole_local({grid.t0, x0, p0, alphas0}, lattice, params, grid);
    const Trajectory reduced = integrate_quadrupole_reduced(x0, p0, alphas0, lattice, params, grid,
                                                            ConvolutionMethod::Incremental);
    double div = 0.0, scale = 0.0;
    for (std::size_t i = 0; i <= grid.n_steps; ++i) {
        div = std::max(div, norm_inf(local.states[i].x - reduced.states[i].x));
        div = std::max(div, norm_inf(local.states[i].p - reduced.states[i].p));
        scale = std::max(scale, norm_inf(local.states[i].x));
    }
    CHECK(div / scale < 1e-4);
}

TEST_CASE("reduced rates are real: recorded trajectories carry no imaginary leak") {
    // the history integrals are assembled from complex accumulators; the
    // dynamics must stay on the real slice
    const ModeLattice lattice = testing::unit_lattice(1);
    const ParticleParams params{1.0, 1.0, 1.0};
    const auto alphas0 = testing::random_amplitudes(lattice, 47, 0.6);
    const Trajectory traj =
        integrate_quadrupole_reduced({0.2, 0.0, 0.0}, {1.0, 0.0, 0.1}, alphas0, lattice, params,
                                     TimeGrid{0.0, 1e-2, 500}, ConvolutionMethod::Incremental);
    for (const SystemState& s : traj.states) {
        CHECK(is_finite(s.x));
        CHECK(is_finite(s.p));
    }
    for (const Vec3& v : traj.velocities) CHECK(is_finite(v));
}

TEST_SUITE_END();
