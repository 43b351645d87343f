#include "nmgle/dipole.hpp"

#include <cmath>

#include "integrate_detail.hpp"
#include "nmgle/errors.hpp"

namespace nmgle {

namespace {

inline void dipole_derivs(const ModeLattice& lattice, const ParticleParams& params, const Vec3& p,
                          const std::vector<Complex>& a, const Vec3& f_ext, detail::PhaseDeriv& out) {
    const double hbar = lattice.units.hbar;
    Vec3 dx = p * (1.0 / params.mass);
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        const Mode& mode = lattice.modes[m];
        const double v = dipole_coupling(mode, p);
        dx += (2.0 * mode.v0 * a[m].real()) * mode.eps();
        out.da[m] = Complex{0.0, -1.0} * (mode.omega * a[m] + Complex{v / hbar, 0.0});
    }
    out.dx = dx;
    out.dp = f_ext;  // the coupling is position-independent: no force on p
}

}  // namespace

StateDerivative eom_dipole(const SystemState& state, const ModeLattice& lattice,
                           const ParticleParams& params, const Vec3& external_force) {
    check_state_shape(state, lattice);
    detail::PhaseDeriv d;
    d.da.resize(lattice.modes.size());
    dipole_derivs(lattice, params, state.p, state.alphas, external_force, d);
    return StateDerivative{d.dx, d.dp, std::move(d.da)};
}

Complex mode_closed_form_dipole(Complex alpha_bar_0, double coupling, double omega, double hbar,
                                double t) {
    if (!(omega > 0.0)) throw ConfigError("mode frequency must be positive");
    const Complex rot = std::polar(1.0, -omega * t);
    return alpha_bar_0 * rot + (coupling / (hbar * omega)) * (1.0 - rot);
}

Complex dipole_mode_amplitude(Complex alpha_0, double coupling, double omega, double hbar,
                              double t) {
    return mode_closed_form_dipole(alpha_0, -coupling, omega, hbar, t);
}

Vec3 velocity_dipole_closed(double t, const Vec3& p, const std::vector<Complex>& alphas0,
                            const ModeLattice& lattice, const ParticleParams& params) {
    if (alphas0.size() != lattice.modes.size()) {
        throw StateShapeError("initial amplitude count does not match the lattice");
    }
    Vec3 v = p * (1.0 / params.mass);
    const double hbar = lattice.units.hbar;
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        const Mode& mode = lattice.modes[m];
        const Complex alpha_t =
            dipole_mode_amplitude(alphas0[m], dipole_coupling(mode, p), mode.omega, hbar, t);
        v += (2.0 * mode.v0 * alpha_t.real()) * mode.eps();
    }
    return v;
}

Trajectory integrate_dipole(const SystemState& state0, const ModeLattice& lattice,
                            const ParticleParams& params, const TimeGrid& grid,
                            const NoisePath* noise) {
    return detail::integrate_phase_rk4(
        state0, lattice, params, grid, noise, Approximation::Dipole,
        [&lattice, &params](double, const Vec3&, const Vec3& p, const std::vector<Complex>& a,
                            const Vec3& f_ext, detail::PhaseDeriv& out) {
            dipole_derivs(lattice, params, p, a, f_ext, out);
        });
}

}  // namespace nmgle
