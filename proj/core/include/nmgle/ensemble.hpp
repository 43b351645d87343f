#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmgle/convolution.hpp"
#include "nmgle/model.hpp"
#include "nmgle/observables.hpp"
#include "nmgle/stochastic.hpp"
#include "nmgle/time_grid.hpp"

namespace nmgle {

enum class Formulation { Local, Reduced };

/// Full experiment description. Every field has a working default; the
/// key = value config format maps onto this struct one key per field.
struct SimConfig {
    UnitsConfig units;
    ParticleParams particle;
    double box_length = 6.2831853071795862;  ///< 2*pi: unit minimum frequency
    int n_max = 1;
    Approximation approx = Approximation::Dipole;
    Formulation formulation = Formulation::Local;
    ConvolutionMethod convolution = ConvolutionMethod::Incremental;
    TimeGrid grid{0.0, 0.01, 1000};
    NoiseConfig noise;
    InitialModeDist initial_dist;
    Vec3 x0;
    Vec3 p0;
    std::uint64_t n_trajectories = 1;
    std::uint64_t master_seed = 0;
};

bool operator==(const SimConfig& a, const SimConfig& b);

/// Throws ConfigError (naming the offending key) on any invariant violation,
/// including Reduced formulation without the Quadrupole approximation.
void validate_config(const SimConfig& config);

/// Per-time-point ensemble statistics plus run metadata.
struct EnsembleResult {
    SimConfig config;
    TimeSeries msd_direct;       ///< <|x(t) - x(0)|^2>
    TimeSeries msd_from_vacf;    ///< double velocity-correlation integral
    TimeSeries vacf;             ///< stationary-reduced C(tau) on the grid lags
    TimeSeries mean_energy;
    TimeSeries mean_photon_number;
    TimeSeries mean_occupation;
    double memory_metric = 0.0;  ///< momentum-equation kernel, horizon 10/w_min
    std::vector<std::uint64_t> diverged_indices;
    std::vector<std::string> warnings;
    // volatile run metadata, excluded from canonical serialization
    double wall_seconds = 0.0;
    unsigned workers_used = 0;
};

/// Runs n_trajectories independent realizations and aggregates statistics.
/// Each index derives its own random stream from (master_seed, index), so the
/// result is bit-deterministic for a fixed config regardless of worker count
/// or execution order. Aggregation happens in index order after all
/// trajectories complete.
///
/// Diverged trajectories are excluded from statistics and listed in the
/// result; the run throws DivergenceError only when more than 10% diverge.
/// `n_workers` = 0 selects the hardware concurrency.
EnsembleResult run_ensemble(const SimConfig& config, unsigned n_workers = 0);

/// Scalar summary of a result: final MSD, log-log MSD exponent over the last
/// decade of t (unset for a degenerate series), memory metric and drifts.
EnsembleSummary summarize(const EnsembleResult& result);

/// JSON serialization of the full result. The canonical form
/// (include_timing = false) omits wall-clock and worker metadata and is
/// byte-identical across reruns of the same config.
std::string to_json(const EnsembleResult& result, bool include_timing = true);

std::string to_json(const EnsembleSummary& summary);

}  // namespace nmgle
