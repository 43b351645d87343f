#pragma once

// Shared fixed-step RK4 loop over the (x, p, alphas) phase state, with
// per-grid-point recording of state, velocity, energy and photon number.
// Internal to the integrator translation units.

#include <cmath>
#include <vector>

#include "nmgle/errors.hpp"
#include "nmgle/model.hpp"
#include "nmgle/observables.hpp"
#include "nmgle/stochastic.hpp"
#include "nmgle/time_grid.hpp"

namespace nmgle::detail {

struct PhaseDeriv {
    Vec3 dx;
    Vec3 dp;
    std::vector<Complex> da;
};

inline bool finite_state(const Vec3& x, const Vec3& p, const std::vector<Complex>& a) {
    if (!is_finite(x) || !is_finite(p)) return false;
    for (const Complex& c : a) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

// Derivs signature:
//   void derivs(double t, const Vec3& x, const Vec3& p,
//               const std::vector<Complex>& a, const Vec3& f_ext, PhaseDeriv& out)
template <typename Derivs>
Trajectory integrate_phase_rk4(const SystemState& state0, const ModeLattice& lattice,
                               const ParticleParams& params, const TimeGrid& grid,
                               const NoisePath* noise, Approximation approx, Derivs&& derivs) {
    check_grid(grid);
    check_state_shape(state0, lattice);

    const std::size_t n_modes = lattice.modes.size();
    const std::size_t n_pts = grid.n_points();
    const double dt = grid.dt;

    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(n_pts);
    traj.velocities.resize(n_pts);
    traj.energies.resize(n_pts);
    traj.photon_numbers.resize(n_pts);

    Vec3 x = state0.x;
    Vec3 p = state0.p;
    std::vector<Complex> a = state0.alphas;

    PhaseDeriv k1, k2, k3, k4;
    k1.da.resize(n_modes);
    k2.da.resize(n_modes);
    k3.da.resize(n_modes);
    k4.da.resize(n_modes);
    std::vector<Complex> a_tmp(n_modes);

    auto force_at = [&](double t) { return noise ? noise->at(t) : Vec3{}; };

    auto record = [&](std::size_t i, const Vec3& vel) {
        SystemState s{grid.time_at(i), x, p, a};
        traj.energies[i] = hamiltonian(s, lattice, params, approx);
        traj.photon_numbers[i] = photon_number(s, lattice);
        traj.velocities[i] = vel;
        traj.states.push_back(std::move(s));
    };

    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time_at(i);
        if (!finite_state(x, p, a)) throw DivergenceError("non-finite state", i);

        derivs(t, x, p, a, force_at(t), k1);
        record(i, k1.dx);

        const double th = t + 0.5 * dt;
        Vec3 xs = x + 0.5 * dt * k1.dx;
        Vec3 ps = p + 0.5 * dt * k1.dp;
        for (std::size_t m = 0; m < n_modes; ++m) a_tmp[m] = a[m] + 0.5 * dt * k1.da[m];
        derivs(th, xs, ps, a_tmp, force_at(th), k2);

        xs = x + 0.5 * dt * k2.dx;
        ps = p + 0.5 * dt * k2.dp;
        for (std::size_t m = 0; m < n_modes; ++m) a_tmp[m] = a[m] + 0.5 * dt * k2.da[m];
        derivs(th, xs, ps, a_tmp, force_at(th), k3);

        const double t1 = t + dt;
        xs = x + dt * k3.dx;
        ps = p + dt * k3.dp;
        for (std::size_t m = 0; m < n_modes; ++m) a_tmp[m] = a[m] + dt * k3.da[m];
        derivs(t1, xs, ps, a_tmp, force_at(t1), k4);

        const double w = dt / 6.0;
        x += w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        p += w * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        for (std::size_t m = 0; m < n_modes; ++m) {
            a[m] += w * (k1.da[m] + 2.0 * k2.da[m] + 2.0 * k3.da[m] + k4.da[m]);
        }
    }

    const double t_final = grid.t_final();
    if (!finite_state(x, p, a)) throw DivergenceError("non-finite state", grid.n_steps);
    derivs(t_final, x, p, a, force_at(t_final), k1);
    record(grid.n_steps, k1.dx);

    return traj;
}

}  // namespace nmgle::detail
