#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "nmgle/vec3.hpp"

namespace nmgle {

using Complex = std::complex<double>;

/// Global scales. Defaults put the system in natural units.
struct UnitsConfig {
    double hbar = 1.0;
    double c = 1.0;
};

struct ParticleParams {
    double mass = 1.0;
    double charge = 1.0;
    /// Dimensionless multiplier on every field-particle coupling. Stands in
    /// for the per-term coefficients of the nonlocal part of the Hamiltonian,
    /// which are not fixed by the model.
    double coupling_scale = 1.0;
};

/// One transverse field mode: a (wave vector, polarization) pair. Each entry
/// carries the full orthonormal polarization frame (eps1, eps2) of its wave
/// vector plus the index selecting which member it represents.
struct Mode {
    Vec3 k;
    double omega = 0.0;  ///< c * |k|
    Vec3 eps1;
    Vec3 eps2;
    int polarization = 1;  ///< 1 or 2
    double v0 = 0.0;       ///< real coupling amplitude, see coupling_v0()

    const Vec3& eps() const { return polarization == 1 ? eps1 : eps2; }
};

/// Truncated mode set of a cubic box: k = 2*pi*n/L for integer n with
/// 0 < |n| <= n_max, two polarizations per k. Ordering is lexicographic in n,
/// then polarization index, and is bit-reproducible.
struct ModeLattice {
    double box_length = 0.0;
    int n_max = 0;
    double quantization_volume = 0.0;  ///< L^3
    UnitsConfig units;
    std::vector<Mode> modes;

    std::size_t size() const { return modes.size(); }
    double min_omega() const;
    double max_omega() const;
};

/// Particle plus field amplitudes at one time instant. The complex amplitudes
/// are classical (c-number) mode coordinates, one per lattice entry, in
/// lattice order.
struct SystemState {
    double t = 0.0;
    Vec3 x;
    Vec3 p;
    std::vector<Complex> alphas;
};

enum class Approximation { Dipole, Quadrupole };

/// Deterministic transverse orthonormal pair for a wave vector. eps1 is the
/// normalized cross product a x k, where a is the coordinate axis least
/// aligned with k (ties resolved toward the higher axis index, which makes
/// eps1(z-hat) = x-hat); eps2 = normalize(k x eps1).
/// Throws DegenerateDirectionError for k = 0.
std::pair<Vec3, Vec3> polarization_basis(const Vec3& k);

/// Real coupling amplitude of one mode:
///   v0 = g * (-e/m) * sqrt(hbar c^2 / (2 V omega)).
double coupling_v0(const Mode& mode, const ParticleParams& params,
                   const ModeLattice& lattice, const UnitsConfig& units);

/// Builds the truncated lattice and fills per-mode couplings.
/// Throws ConfigError for L <= 0 or n_max < 1.
ModeLattice build_lattice(double box_length, int n_max, const UnitsConfig& units,
                          const ParticleParams& params);

/// Linear-in-momentum coupling of the position-independent interaction:
///   V(p) = v0 * (eps . p)   (real).
double dipole_coupling(const Mode& mode, const Vec3& p);

/// Energy split into kinetic, free-field, and interaction parts. The
/// interaction is accumulated in complex arithmetic; its imaginary part is a
/// rounding residue in both approximations.
struct HamiltonianParts {
    double kinetic = 0.0;
    double field = 0.0;
    Complex interaction{0.0, 0.0};

    double total() const { return kinetic + field + interaction.real(); }
};

HamiltonianParts hamiltonian_parts(const SystemState& state, const ModeLattice& lattice,
                                   const ParticleParams& params, Approximation approx);

/// Total energy of a state under the chosen approximation. The stochastic
/// external force is not part of this value; it enters the dynamics as a
/// force on the momentum. Throws StateShapeError on amplitude-count mismatch.
double hamiltonian(const SystemState& state, const ModeLattice& lattice,
                   const ParticleParams& params, Approximation approx);

/// Throws StateShapeError unless state.alphas matches the lattice size and
/// all components are finite-checkable shapes.
void check_state_shape(const SystemState& state, const ModeLattice& lattice);

}  // namespace nmgle
