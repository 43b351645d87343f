#pragma once

#include "nmgle/model.hpp"
#include "nmgle/stochastic.hpp"
#include "nmgle/time_grid.hpp"

namespace nmgle {

/// Equations of motion in the position-independent (dipole) approximation:
///   dx/dt     = p/m + sum_modes v0 (eps . unit-gradient) (alpha + conj alpha)
///             = p/m + 2 sum_modes v0 Re(alpha) eps
///   dp/dt     = external_force          (the coupling exerts no force on p)
///   dalpha/dt = -i w alpha - (i/hbar) v0 (eps . p)
/// Throws StateShapeError on amplitude-count mismatch.
StateDerivative eom_dipole(const SystemState& state, const ModeLattice& lattice,
                           const ParticleParams& params, const Vec3& external_force);

/// Closed-form conjugate-amplitude evolution for a constant coupling V:
///   abar(t) = abar(0) e^{-i w t} + (V / (hbar w)) (1 - e^{-i w t}).
/// The amplitude itself is the complex conjugate. Throws ConfigError for
/// omega <= 0.
///
/// Note the sign convention: this form solves dy/dt = -i w y + (i/hbar) V.
/// The amplitude equation of eom_dipole carries -(i/hbar) V, so the amplitude
/// alpha(t) equals mode_closed_form_dipole(alpha(0), -V, w, hbar, t); see
/// dipole_mode_amplitude().
Complex mode_closed_form_dipole(Complex alpha_bar_0, double coupling, double omega, double hbar,
                                double t);

/// Exact amplitude alpha(t) of the eom_dipole mode equation for constant V:
///   alpha(t) = alpha(0) e^{-i w t} - (V / (hbar w)) (1 - e^{-i w t}).
Complex dipole_mode_amplitude(Complex alpha_0, double coupling, double omega, double hbar,
                              double t);

/// Velocity at time t computed from (t, p, alpha(0)) alone, with each mode
/// amplitude replaced by its closed form. Valid in the constant-momentum
/// regime (no external force). The signature is the point: no history enters,
/// so this dynamics is memoryless.
Vec3 velocity_dipole_closed(double t, const Vec3& p, const std::vector<Complex>& alphas0,
                            const ModeLattice& lattice, const ParticleParams& params);

/// Classical fixed-step RK4 integration of eom_dipole. The external force is
/// read from the noise path (zero when absent). Records energy, photon number
/// and the evaluated velocity at every grid point.
/// Throws DivergenceError with the step index if the state leaves the finite
/// range.
Trajectory integrate_dipole(const SystemState& state0, const ModeLattice& lattice,
                            const ParticleParams& params, const TimeGrid& grid,
                            const NoisePath* noise = nullptr);

}  // namespace nmgle
