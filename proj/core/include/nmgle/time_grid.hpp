#pragma once

#include <cstddef>
#include <vector>

#include "nmgle/model.hpp"
#include "nmgle/vec3.hpp"

namespace nmgle {

/// Uniform time grid with n_steps + 1 sample points.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    std::size_t n_points() const { return n_steps + 1; }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double t_final() const { return time_at(n_steps); }
};

/// Throws GridError for dt <= 0 or n_steps < 1.
void check_grid(const TimeGrid& grid);

bool same_grid(const TimeGrid& a, const TimeGrid& b);

/// Instantaneous time derivative of a SystemState.
struct StateDerivative {
    Vec3 dx;
    Vec3 dp;
    std::vector<Complex> dalphas;
};

/// Time-gridded record of one integrated realization. `velocities` stores the
/// evaluated right-hand side dx at each grid point (not a finite difference),
/// `energies` the Hamiltonian and `photon_numbers` the energy-weighted
/// occupation sum at each grid point.
struct Trajectory {
    TimeGrid grid;
    std::vector<SystemState> states;
    std::vector<Vec3> velocities;
    std::vector<double> energies;
    std::vector<double> photon_numbers;
};

}  // namespace nmgle
