#pragma once

#include <cstdint>
#include <vector>

#include "nmgle/model.hpp"
#include "nmgle/time_grid.hpp"
#include "nmgle/vec3.hpp"

namespace nmgle {

/// Deterministic per-trajectory random stream (splitmix64 core with explicit
/// Box-Muller Gaussians, so draws are identical across platforms and
/// standard-library versions). All randomness in the library flows through
/// instances of this class; there is no ambient global source.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw (Box-Muller, one spare cached).
    double gaussian();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Counter-based stream derivation: statistically separated streams for
/// (seed, index) pairs, identical on every call with the same inputs.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Stationary exponentially correlated (Ornstein-Uhlenbeck) force:
///   <F> = 0,  <F_i(t) F_j(t')> = delta_ij sigma^2 exp(-|t - t'| / tau_c).
struct NoiseConfig {
    double sigma = 1.0;
    double tau_c = 1.0;
    bool enabled = false;
};

/// Throws ConfigError for sigma < 0 or tau_c <= 0.
void check_noise_config(const NoiseConfig& config);

/// Force realization sampled on a grid. Between grid points the force is
/// linearly interpolated, so integrators see one consistent signal at
/// substage times.
struct NoisePath {
    TimeGrid grid;
    std::vector<Vec3> values;

    Vec3 at(double t) const;
    static NoisePath zero(const TimeGrid& grid);
};

/// Initial distribution of the complex mode amplitudes. The phase is uniform
/// on [0, 2*pi) in every non-vacuum variant.
struct InitialModeDist {
    enum class Kind { Vacuum, FixedOccupation, Thermal };
    Kind kind = Kind::Vacuum;
    double occupation = 1.0;   ///< n-bar for FixedOccupation
    double temperature = 1.0;  ///< T for Thermal

    static InitialModeDist vacuum() { return {Kind::Vacuum, 1.0, 1.0}; }
    static InitialModeDist fixed_occupation(double n_bar) { return {Kind::FixedOccupation, n_bar, 1.0}; }
    static InitialModeDist thermal(double temperature) { return {Kind::Thermal, 1.0, temperature}; }
};

/// Throws ConfigError for negative occupation or temperature.
void check_initial_dist(const InitialModeDist& dist);

/// Per-mode amplitude draw:
///   Vacuum           -> 0
///   FixedOccupation  -> |alpha| = sqrt(n_bar), uniform phase
///   Thermal          -> complex Gaussian, mean 0, <|alpha|^2> = 1/(e^{hbar w/T} - 1)
std::vector<Complex> sample_initial_modes(const ModeLattice& lattice, const InitialModeDist& dist,
                                          RngStream& stream);

/// Exact-discretization OU path on the grid: F_{n+1} = rho F_n +
/// sigma sqrt(1 - rho^2) xi with rho = exp(-dt/tau_c), started from the
/// stationary distribution. The update is distribution-exact for any dt.
/// Disabled config yields the all-zero path.
NoisePath ou_noise_path(const NoiseConfig& config, const TimeGrid& grid, RngStream& stream);

}  // namespace nmgle
