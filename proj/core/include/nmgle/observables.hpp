#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nmgle/model.hpp"
#include "nmgle/time_grid.hpp"

namespace nmgle {

/// Real-valued series on a time grid, optionally with per-point standard
/// errors from ensemble scatter.
struct TimeSeries {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<double> stderrs;  ///< empty when the series is deterministic

    bool has_stderr() const { return !stderrs.empty(); }
};

/// Symmetric two-time correlation table C(t_i, t_j) on a trajectory grid.
struct TwoTimeCorrelation {
    TimeGrid grid;
    std::vector<double> values;  ///< row-major (n_points x n_points)

    double at(std::size_t i, std::size_t j) const { return values[i * grid.n_points() + j]; }
};

/// Ensemble-mean two-time velocity correlation <v(t1) . v(t2)>.
/// Throws EmptyInputError on an empty ensemble, GridError on mixed grids.
TwoTimeCorrelation vacf_two_time(const std::vector<Trajectory>& trajectories);

/// Stationary-reduced velocity autocorrelation C(tau): per trajectory the
/// product v(t1) . v(t1 + tau) is averaged over all admissible t1, then the
/// ensemble supplies mean and standard error. Lags must lie on the
/// trajectory grid.
TimeSeries vacf(const std::vector<Trajectory>& trajectories, const TimeGrid& lags);

/// Mean square displacement <|x(t) - x(0)|^2> with ensemble standard errors.
TimeSeries msd_direct(const std::vector<Trajectory>& trajectories);

/// Mean square displacement via the double time integral of the two-time
/// velocity correlation,
///   MSD(t) = integral_0^t integral_0^t C(t1, t2) dt1 dt2,
/// evaluated with trapezoid weights on every prefix. O(n^2) total via 2-D
/// prefix sums; intended for the modest grids on which the table itself is
/// storable.
TimeSeries msd_from_vacf(const TwoTimeCorrelation& table);

/// Energy-weighted occupation sum_modes hbar w |alpha|^2.
double photon_number(const SystemState& state, const ModeLattice& lattice);

/// Plain occupation sum_modes |alpha|^2, reported alongside photon_number.
double total_occupation(const SystemState& state);

/// Which reduced equation's history term the kernel describes. The two carry
/// the same weight magnitudes with opposite signs.
enum class KernelEquation { CoordinateEq, MomentumEq };

/// Finite sin-sum memory kernel K(tau) = sum_m w_m sin(w_m tau).
struct KernelSpec {
    struct Term {
        double weight = 0.0;
        double omega = 0.0;
    };
    std::vector<Term> terms;  ///< zero-weight entries are pruned

    bool empty() const { return terms.empty(); }
    double eval(double tau) const;
};

/// Per-mode (weight, omega) pairs of the history integrals of the reduced
/// equations: weight = -(2/hbar) v0^2 for the coordinate equation and
/// +(2/hbar) v0^2 for the momentum equation. The dipole approximation has no
/// history term, so its kernel is empty by definition; a chargeless particle
/// likewise decouples to the empty kernel.
KernelSpec memory_kernel(const ModeLattice& lattice, const ParticleParams& params,
                         Approximation approx, KernelEquation which);

/// Dimensionless memory score in [0, 1]:
///   M = integral_0^H |K(tau)| dtau / (H * max(max_tau |K|, eps_floor)).
/// Exactly 0 for the empty kernel. The integral of |K| is evaluated piecewise
/// analytically between sign changes of K, so the value is accurate to
/// root-finding precision. Throws ConfigError for horizon <= 0.
double memory_metric(const KernelSpec& kernel, double horizon, double eps_floor = 1e-15);

/// Scalar summary of an ensemble's series (used by the CLI and reports).
struct EnsembleSummary {
    double final_msd = 0.0;
    /// Slope of log MSD vs log t over the last decade of t; unset for
    /// degenerate (all-zero) MSD.
    std::optional<double> msd_exponent;
    double memory_metric = 0.0;
    double energy_drift = 0.0;        ///< max_t |E(t) - E(0)| / max(|E(0)|, floor)
    double photon_drift = 0.0;
    double final_photon_number = 0.0;
};

}  // namespace nmgle
