#include "nmgle/time_grid.hpp"

#include "nmgle/errors.hpp"

namespace nmgle {

void check_grid(const TimeGrid& grid) {
    if (!(grid.dt > 0.0)) throw GridError("time step must be positive");
    if (grid.n_steps < 1) throw GridError("grid needs at least one step");
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
    return a.t0 == b.t0 && a.dt == b.dt && a.n_steps == b.n_steps;
}

}  // namespace nmgle
