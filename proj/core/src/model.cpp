#include "nmgle/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nmgle/errors.hpp"

namespace nmgle {

std::pair<Vec3, Vec3> polarization_basis(const Vec3& k) {
    const double kn = norm(k);
    if (!(kn > 0.0)) {
        throw DegenerateDirectionError("polarization basis requires a nonzero wave vector");
    }
    const Vec3 khat = normalized(k);
    const std::array<double, 3> align = {std::abs(khat.x), std::abs(khat.y), std::abs(khat.z)};
    // least-aligned coordinate axis; ties resolve toward the higher index
    int axis = 0;
    for (int i = 1; i < 3; ++i) {
        if (align[static_cast<std::size_t>(i)] <= align[static_cast<std::size_t>(axis)]) axis = i;
    }
    Vec3 a{0.0, 0.0, 0.0};
    if (axis == 0) a.x = 1.0;
    if (axis == 1) a.y = 1.0;
    if (axis == 2) a.z = 1.0;

    const Vec3 eps1 = normalized(cross(a, khat));
    const Vec3 eps2 = normalized(cross(khat, eps1));
    return {eps1, eps2};
}

double coupling_v0(const Mode& mode, const ParticleParams& params, const ModeLattice& lattice,
                   const UnitsConfig& units) {
    return params.coupling_scale * (-params.charge / params.mass) *
           std::sqrt(units.hbar * units.c * units.c /
                     (2.0 * lattice.quantization_volume * mode.omega));
}

ModeLattice build_lattice(double box_length, int n_max, const UnitsConfig& units,
                          const ParticleParams& params) {
    if (!(box_length > 0.0)) throw ConfigError("box_length must be positive");
    if (n_max < 1) throw ConfigError("n_max must be at least 1");
    if (!(units.hbar > 0.0) || !(units.c > 0.0)) throw ConfigError("hbar and c must be positive");
    if (!(params.mass > 0.0)) throw ConfigError("mass must be positive");
    if (params.coupling_scale < 0.0) throw ConfigError("coupling_scale must be non-negative");

    ModeLattice lattice;
    lattice.box_length = box_length;
    lattice.n_max = n_max;
    lattice.quantization_volume = box_length * box_length * box_length;
    lattice.units = units;

    const double k_unit = 2.0 * std::numbers::pi / box_length;
    const long r2 = static_cast<long>(n_max) * n_max;
    // ascending loops give the lexicographic (nx, ny, nz) order directly
    for (int nx = -n_max; nx <= n_max; ++nx) {
        for (int ny = -n_max; ny <= n_max; ++ny) {
            for (int nz = -n_max; nz <= n_max; ++nz) {
                const long nsq = static_cast<long>(nx) * nx + static_cast<long>(ny) * ny +
                                 static_cast<long>(nz) * nz;
                if (nsq == 0 || nsq > r2) continue;
                Mode base;
                base.k = Vec3{k_unit * nx, k_unit * ny, k_unit * nz};
                base.omega = units.c * norm(base.k);
                auto [e1, e2] = polarization_basis(base.k);
                base.eps1 = e1;
                base.eps2 = e2;
                base.v0 = coupling_v0(base, params, lattice, units);
                for (int r = 1; r <= 2; ++r) {
                    Mode m = base;
                    m.polarization = r;
                    lattice.modes.push_back(m);
                }
            }
        }
    }
    return lattice;
}

double ModeLattice::min_omega() const {
    double w = 0.0;
    for (const Mode& m : modes) w = (w == 0.0) ? m.omega : std::min(w, m.omega);
    return w;
}

double ModeLattice::max_omega() const {
    double w = 0.0;
    for (const Mode& m : modes) w = std::max(w, m.omega);
    return w;
}

double dipole_coupling(const Mode& mode, const Vec3& p) { return mode.v0 * dot(mode.eps(), p); }

void check_state_shape(const SystemState& state, const ModeLattice& lattice) {
    if (state.alphas.size() != lattice.modes.size()) {
        throw StateShapeError("state carries " + std::to_string(state.alphas.size()) +
                              " amplitudes for a lattice of " +
                              std::to_string(lattice.modes.size()) + " modes");
    }
}

HamiltonianParts hamiltonian_parts(const SystemState& state, const ModeLattice& lattice,
                                   const ParticleParams& params, Approximation approx) {
    check_state_shape(state, lattice);
    HamiltonianParts parts;
    parts.kinetic = dot(state.p, state.p) / (2.0 * params.mass);

    const double hbar = lattice.units.hbar;
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        const Mode& mode = lattice.modes[m];
        const Complex alpha = state.alphas[m];
        parts.field += hbar * mode.omega * std::norm(alpha);
        if (approx == Approximation::Dipole) {
            // real V times (alpha + conj alpha)
            const double v = dipole_coupling(mode, state.p);
            parts.interaction += v * (alpha + std::conj(alpha));
        } else {
            // pure-imaginary V times (alpha - conj alpha): real product
            const Complex v{0.0, mode.v0 * dot(mode.eps(), state.p) * dot(mode.k, state.x)};
            parts.interaction += v * (alpha - std::conj(alpha));
        }
    }
    return parts;
}

double hamiltonian(const SystemState& state, const ModeLattice& lattice,
                   const ParticleParams& params, Approximation approx) {
    return hamiltonian_parts(state, lattice, params, approx).total();
}

}  // namespace nmgle
