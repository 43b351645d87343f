#pragma once

#include "nmgle/convolution.hpp"
#include "nmgle/model.hpp"
#include "nmgle/stochastic.hpp"
#include "nmgle/time_grid.hpp"

namespace nmgle {

/// Position-linear coupling of one mode:
///   V(p, x) = i v0 (eps . p) (k . x).
/// Pure imaginary; the real part is exactly zero.
Complex coupling_vq(const Mode& mode, const Vec3& p, const Vec3& x);

/// Equations of motion of the position-linear (quadrupole) approximation in
/// the local formulation, with all mode amplitudes kept as state:
///   dx/dt     = p/m - 2 sum v0 (k . x) Im(alpha) eps
///   dp/dt     =       2 sum v0 (eps . p) Im(alpha) k + external_force
///   dalpha/dt = -i w alpha - (1/hbar) v0 (eps . p) (k . x)
/// The amplitude equation and its conjugate are consistent: evolving the
/// conjugate amplitude independently reproduces conj(alpha(t)).
StateDerivative eom_quadrupole_local(const SystemState& state, const ModeLattice& lattice,
                                     const ParticleParams& params, const Vec3& external_force);

/// RK4 integration of eom_quadrupole_local; same recording and error
/// contract as integrate_dipole.
Trajectory integrate_quadrupole_local(const SystemState& state0, const ModeLattice& lattice,
                                      const ParticleParams& params, const TimeGrid& grid,
                                      const NoisePath* noise = nullptr);

/// The two random forces of the reduced particle-only equations at time t.
/// Their randomness comes entirely from the sampled initial amplitudes.
struct RandomForceRealization {
    Vec3 f_q;  ///< coordinate-equation force, parallel to the polarizations
    Vec3 f_p;  ///< momentum-equation force, parallel to the wave vectors
    double t = 0.0;
};

/// Initial-condition forces obtained by eliminating the modes:
///   F_q(t) = -2 sum v0 (k . x) Im[alpha(0) e^{-i w t}] eps
///   F_p(t) = +2 sum v0 (eps . p) Im[alpha(0) e^{-i w t}] k
/// Both are real by construction. The free-evolution phase e^{-i w t} is the
/// one generated by the amplitude equation above, which is what makes the
/// reduced and local formulations agree trajectory-by-trajectory.
RandomForceRealization random_forces(double t, const Vec3& x, const Vec3& p,
                                     const std::vector<Complex>& alphas0,
                                     const ModeLattice& lattice, const ParticleParams& params);

/// Integrates the reduced particle-only system obtained by exact elimination
/// of the mode amplitudes:
///   dx/dt = p/m - (2/hbar) sum v0 (k . x(t)) S_m(t) eps + F_q(t)
///   dp/dt =       (2/hbar) sum v0 (eps . p(t)) S_m(t) k + F_p(t) + noise
/// where S_m(t) = integral_0^t sin(w (t-s)) W_m(s) ds is the sin-kernel
/// history integral over the real coupling signal W_m(s) = Im V_m(p(s), x(s)).
///
/// Stepping is a Heun predictor-corrector matched to the trapezoidal history
/// quadrature; `method` selects whether each history integral is recomputed
/// from scratch (Naive, O(n) per step) or maintained incrementally (O(1) per
/// step). Both produce the same trapezoid sums up to rounding.
///
/// Mode amplitudes are reconstructed from the history prefix at every grid
/// point, so the trajectory records the same observables as the local
/// integrator.
Trajectory integrate_quadrupole_reduced(const Vec3& x0, const Vec3& p0,
                                        const std::vector<Complex>& alphas0,
                                        const ModeLattice& lattice, const ParticleParams& params,
                                        const TimeGrid& grid, ConvolutionMethod method,
                                        const NoisePath* noise = nullptr);

}  // namespace nmgle
