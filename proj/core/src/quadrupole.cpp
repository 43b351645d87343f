#include "nmgle/quadrupole.hpp"

#include <cmath>

#include "integrate_detail.hpp"
#include "nmgle/errors.hpp"
#include "nmgle/observables.hpp"

namespace nmgle {

Complex coupling_vq(const Mode& mode, const Vec3& p, const Vec3& x) {
    return Complex{0.0, mode.v0 * dot(mode.eps(), p) * dot(mode.k, x)};
}

namespace {

inline void quadrupole_derivs(const ModeLattice& lattice, const ParticleParams& params,
                              const Vec3& x, const Vec3& p, const std::vector<Complex>& a,
                              const Vec3& f_ext, detail::PhaseDeriv& out) {
    const double hbar = lattice.units.hbar;
    Vec3 dx = p * (1.0 / params.mass);
    Vec3 dp = f_ext;
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        const Mode& mode = lattice.modes[m];
        const double kx = dot(mode.k, x);
        const double ep = dot(mode.eps(), p);
        const double im = a[m].imag();
        dx += (-2.0 * mode.v0 * kx * im) * mode.eps();
        dp += (2.0 * mode.v0 * ep * im) * mode.k;
        // d alpha = -i w alpha + (i/hbar) V with V = i v0 (eps.p)(k.x)
        out.da[m] = Complex{0.0, -mode.omega} * a[m] - Complex{mode.v0 * ep * kx / hbar, 0.0};
    }
    out.dx = dx;
    out.dp = dp;
}

}  // namespace

StateDerivative eom_quadrupole_local(const SystemState& state, const ModeLattice& lattice,
                                     const ParticleParams& params, const Vec3& external_force) {
    check_state_shape(state, lattice);
    detail::PhaseDeriv d;
    d.da.resize(lattice.modes.size());
    quadrupole_derivs(lattice, params, state.x, state.p, state.alphas, external_force, d);
    return StateDerivative{d.dx, d.dp, std::move(d.da)};
}

Trajectory integrate_quadrupole_local(const SystemState& state0, const ModeLattice& lattice,
                                      const ParticleParams& params, const TimeGrid& grid,
                                      const NoisePath* noise) {
    return detail::integrate_phase_rk4(
        state0, lattice, params, grid, noise, Approximation::Quadrupole,
        [&lattice, &params](double, const Vec3& x, const Vec3& p, const std::vector<Complex>& a,
                            const Vec3& f_ext, detail::PhaseDeriv& out) {
            quadrupole_derivs(lattice, params, x, p, a, f_ext, out);
        });
}

RandomForceRealization random_forces(double t, const Vec3& x, const Vec3& p,
                                     const std::vector<Complex>& alphas0,
                                     const ModeLattice& lattice, const ParticleParams& params) {
    (void)params;
    if (alphas0.size() != lattice.modes.size()) {
        throw StateShapeError("initial amplitude count does not match the lattice");
    }
    RandomForceRealization forces;
    forces.t = t;
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        const Mode& mode = lattice.modes[m];
        const double free_im = (alphas0[m] * std::polar(1.0, -mode.omega * t)).imag();
        forces.f_q += (-2.0 * mode.v0 * dot(mode.k, x) * free_im) * mode.eps();
        forces.f_p += (2.0 * mode.v0 * dot(mode.eps(), p) * free_im) * mode.k;
    }
    return forces;
}

namespace {

struct ReducedWork {
    const ModeLattice& lattice;
    const ParticleParams& params;
    const std::vector<Complex>& alphas0;
    ConvolutionMethod method;
    double dt;
    HistoryBuffer history;
    std::vector<ConvolutionAccumulator> accums;  // in Naive runs: reconstruction only
    std::vector<double> memory_terms;            // scratch: S_m at the evaluated time

    ReducedWork(const ModeLattice& lat, const ParticleParams& par,
                const std::vector<Complex>& a0, ConvolutionMethod met, double step)
        : lattice(lat),
          params(par),
          alphas0(a0),
          method(met),
          dt(step),
          history(lat.modes.size()),
          accums(lat.modes.size()),
          memory_terms(lat.modes.size(), 0.0) {}

    // S_m(t) = Im integral_0^t sin(w (t-s)) V_m(s) ds over the stored prefix.
    // `predicted` evaluates with the buffer's provisional last record without
    // committing panels to the live accumulators. The live accumulators are
    // maintained under both methods (amplitude reconstruction reads them);
    // only the history evaluation itself switches between the naive sum and
    // the accumulator.
    void evaluate_memory(bool predicted) {
        for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
            const double omega = lattice.modes[m].omega;
            Complex r;
            if (predicted) {
                ConvolutionAccumulator probe = accums[m];
                r = memory_convolution(history.mode(m), omega, dt, ConvolutionMethod::Incremental,
                                       &probe);
            } else {
                r = memory_convolution(history.mode(m), omega, dt, ConvolutionMethod::Incremental,
                                       &accums[m]);
            }
            if (method == ConvolutionMethod::Naive) {
                r = memory_convolution(history.mode(m), omega, dt, ConvolutionMethod::Naive);
            }
            memory_terms[m] = r.imag();
        }
    }

    void rhs(double t, const Vec3& x, const Vec3& p, const Vec3& f_ext, Vec3& dx, Vec3& dp) const {
        const double hbar = lattice.units.hbar;
        dx = p * (1.0 / params.mass);
        dp = f_ext;
        for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
            const Mode& mode = lattice.modes[m];
            const double s = memory_terms[m];
            dx += (-2.0 / hbar * mode.v0 * dot(mode.k, x) * s) * mode.eps();
            dp += (2.0 / hbar * mode.v0 * dot(mode.eps(), p) * s) * mode.k;
        }
        const RandomForceRealization f = random_forces(t, x, p, alphas0, lattice, params);
        dx += f.f_q;
        dp += f.f_p;
    }

    // alpha_m(t) from the eliminated-mode solution: the driven part is the
    // conjugate of the accumulated e^{-iws} prefix of the real signal Im V.
    std::vector<Complex> reconstruct_alphas(double t) const {
        std::vector<Complex> alphas(lattice.modes.size());
        const double hbar = lattice.units.hbar;
        for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
            const Complex a_v = accums[m].a;  // integral of e^{-iws} (i W)
            const Complex a_w{a_v.imag(), -a_v.real()};
            alphas[m] = std::polar(1.0, -lattice.modes[m].omega * t) *
                        (alphas0[m] - std::conj(a_w) / hbar);
        }
        return alphas;
    }
};

}  // namespace

Trajectory integrate_quadrupole_reduced(const Vec3& x0, const Vec3& p0,
                                        const std::vector<Complex>& alphas0,
                                        const ModeLattice& lattice, const ParticleParams& params,
                                        const TimeGrid& grid, ConvolutionMethod method,
                                        const NoisePath* noise) {
    check_grid(grid);
    if (alphas0.size() != lattice.modes.size()) {
        throw StateShapeError("initial amplitude count does not match the lattice");
    }

    const std::size_t n_modes = lattice.modes.size();
    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.n_points());
    traj.velocities.resize(grid.n_points());
    traj.energies.resize(grid.n_points());
    traj.photon_numbers.resize(grid.n_points());

    ReducedWork work(lattice, params, alphas0, method, grid.dt);

    Vec3 x = x0;
    Vec3 p = p0;
    std::vector<Complex> v_now(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m) v_now[m] = coupling_vq(lattice.modes[m], p, x);
    work.history.append(v_now);

    auto force_at = [&](double t) { return noise ? noise->at(t) : Vec3{}; };

    auto record = [&](std::size_t i, const Vec3& vel) {
        // local time inside the memory integral starts at the first sample
        const double elapsed = static_cast<double>(i) * grid.dt;
        SystemState s{grid.time_at(i), x, p, work.reconstruct_alphas(elapsed)};
        traj.energies[i] = hamiltonian(s, lattice, params, Approximation::Quadrupole);
        traj.photon_numbers[i] = photon_number(s, lattice);
        traj.velocities[i] = vel;
        traj.states.push_back(std::move(s));
    };

    Vec3 dx0, dp0, dx1, dp1;
    std::vector<Complex> v_pred(n_modes);

    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time_at(i);
        const double t_loc = static_cast<double>(i) * grid.dt;
        if (!is_finite(x) || !is_finite(p)) throw DivergenceError("non-finite state", i);

        work.evaluate_memory(false);
        work.rhs(t_loc, x, p, force_at(t), dx0, dp0);
        record(i, dx0);

        // predictor
        const Vec3 xp = x + grid.dt * dx0;
        const Vec3 pp = p + grid.dt * dp0;
        for (std::size_t m = 0; m < n_modes; ++m) v_pred[m] = coupling_vq(lattice.modes[m], pp, xp);
        work.history.append(v_pred);
        work.evaluate_memory(true);
        const double t1 = grid.time_at(i + 1);
        const double t1_loc = t_loc + grid.dt;
        work.rhs(t1_loc, xp, pp, force_at(t1), dx1, dp1);

        // corrector, then overwrite the provisional history record
        x += 0.5 * grid.dt * (dx0 + dx1);
        p += 0.5 * grid.dt * (dp0 + dp1);
        for (std::size_t m = 0; m < n_modes; ++m) v_now[m] = coupling_vq(lattice.modes[m], p, x);
        work.history.replace_last(v_now);
    }

    const std::size_t n = grid.n_steps;
    if (!is_finite(x) || !is_finite(p)) throw DivergenceError("non-finite state", n);
    work.evaluate_memory(false);
    work.rhs(static_cast<double>(n) * grid.dt, x, p, force_at(grid.t_final()), dx0, dp0);
    record(n, dx0);

    return traj;
}

}  // namespace nmgle
