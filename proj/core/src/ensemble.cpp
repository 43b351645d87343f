#include "nmgle/ensemble.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "nmgle/dipole.hpp"
#include "nmgle/errors.hpp"
#include "nmgle/quadrupole.hpp"

namespace nmgle {

bool operator==(const SimConfig& a, const SimConfig& b) {
    return a.units.hbar == b.units.hbar && a.units.c == b.units.c &&
           a.particle.mass == b.particle.mass && a.particle.charge == b.particle.charge &&
           a.particle.coupling_scale == b.particle.coupling_scale &&
           a.box_length == b.box_length && a.n_max == b.n_max && a.approx == b.approx &&
           a.formulation == b.formulation && a.convolution == b.convolution &&
           same_grid(a.grid, b.grid) && a.noise.sigma == b.noise.sigma &&
           a.noise.tau_c == b.noise.tau_c && a.noise.enabled == b.noise.enabled &&
           a.initial_dist.kind == b.initial_dist.kind &&
           a.initial_dist.occupation == b.initial_dist.occupation &&
           a.initial_dist.temperature == b.initial_dist.temperature && a.x0 == b.x0 &&
           a.p0 == b.p0 && a.n_trajectories == b.n_trajectories && a.master_seed == b.master_seed;
}

void validate_config(const SimConfig& config) {
    if (!(config.units.hbar > 0.0)) throw ConfigError("units.hbar must be positive");
    if (!(config.units.c > 0.0)) throw ConfigError("units.c must be positive");
    if (!(config.particle.mass > 0.0)) throw ConfigError("particle.mass must be positive");
    if (config.particle.coupling_scale < 0.0) {
        throw ConfigError("particle.coupling_scale must be non-negative");
    }
    if (!(config.box_length > 0.0)) throw ConfigError("lattice.box_length must be positive");
    if (config.n_max < 1) throw ConfigError("lattice.n_max must be at least 1");
    if (!(config.grid.dt > 0.0)) throw ConfigError("grid.dt must be positive");
    if (config.grid.n_steps < 1) throw ConfigError("grid.n_steps must be at least 1");
    if (config.noise.sigma < 0.0) throw ConfigError("noise.sigma must be non-negative");
    if (!(config.noise.tau_c > 0.0)) throw ConfigError("noise.tau_c must be positive");
    if (config.initial_dist.kind == InitialModeDist::Kind::FixedOccupation &&
        config.initial_dist.occupation < 0.0) {
        throw ConfigError("initial.occupation must be non-negative");
    }
    if (config.initial_dist.kind == InitialModeDist::Kind::Thermal &&
        config.initial_dist.temperature < 0.0) {
        throw ConfigError("initial.temperature must be non-negative");
    }
    if (config.n_trajectories < 1) throw ConfigError("ensemble.n_trajectories must be at least 1");
    if (config.formulation == Formulation::Reduced && config.approx != Approximation::Quadrupole) {
        throw ConfigError("dynamics.formulation = reduced requires dynamics.approximation = quadrupole");
    }
    if (!is_finite(config.x0)) throw ConfigError("initial.x0 must be finite");
    if (!is_finite(config.p0)) throw ConfigError("initial.p0 must be finite");
}

namespace {

struct TrajStats {
    bool diverged = false;
    std::vector<double> disp2;      // |x(t) - x(0)|^2
    std::vector<double> eq27;       // |trapezoid prefix of v|^2
    std::vector<double> energy;
    std::vector<double> photon;
    std::vector<double> occupation;
    std::vector<Vec3> velocities;
};

TrajStats reduce_trajectory(const Trajectory& traj) {
    const std::size_t n = traj.grid.n_points();
    TrajStats s;
    s.disp2.resize(n);
    s.eq27.resize(n);
    s.energy = traj.energies;
    s.photon = traj.photon_numbers;
    s.occupation.resize(n);
    s.velocities = traj.velocities;
    Vec3 prefix{};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = traj.states[i].x - traj.states[0].x;
        s.disp2[i] = dot(d, d);
        if (i > 0) {
            prefix += (0.5 * traj.grid.dt) * (traj.velocities[i - 1] + traj.velocities[i]);
        }
        s.eq27[i] = dot(prefix, prefix);
        s.occupation[i] = total_occupation(traj.states[i]);
    }
    return s;
}

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
};

// index-ordered two-pass mean/stderr over the valid slots
template <typename Getter>
MeanStderr slot_stats(const std::vector<TrajStats>& slots, Getter&& get) {
    MeanStderr r;
    std::size_t n = 0;
    for (const TrajStats& s : slots) {
        if (s.diverged) continue;
        r.mean += get(s);
        ++n;
    }
    r.mean /= static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const TrajStats& s : slots) {
            if (s.diverged) continue;
            const double d = get(s) - r.mean;
            ss += d * d;
        }
        r.se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    }
    return r;
}

}  // namespace

EnsembleResult run_ensemble(const SimConfig& config, unsigned n_workers) {
    validate_config(config);
    const auto wall_start = std::chrono::steady_clock::now();

    const ModeLattice lattice =
        build_lattice(config.box_length, config.n_max, config.units, config.particle);

    EnsembleResult result;
    result.config = config;

    if (config.grid.dt * lattice.max_omega() > 0.1) {
        result.warnings.push_back("grid.dt exceeds 0.1 / max mode frequency (" +
                                  std::to_string(0.1 / lattice.max_omega()) +
                                  "); fixed-step integration may be inaccurate");
    }

    const std::size_t n_traj = config.n_trajectories;
    std::vector<TrajStats> slots(n_traj);

    auto run_one = [&](std::size_t index) {
        RngStream stream = derive_stream(config.master_seed, index);
        std::vector<Complex> alphas0 = sample_initial_modes(lattice, config.initial_dist, stream);
        const NoisePath path = ou_noise_path(config.noise, config.grid, stream);
        const NoisePath* noise = config.noise.enabled ? &path : nullptr;

        try {
            Trajectory traj;
            if (config.approx == Approximation::Dipole) {
                SystemState s0{config.grid.t0, config.x0, config.p0, std::move(alphas0)};
                traj = integrate_dipole(s0, lattice, config.particle, config.grid, noise);
            } else if (config.formulation == Formulation::Local) {
                SystemState s0{config.grid.t0, config.x0, config.p0, std::move(alphas0)};
                traj = integrate_quadrupole_local(s0, lattice, config.particle, config.grid, noise);
            } else {
                traj = integrate_quadrupole_reduced(config.x0, config.p0, alphas0, lattice,
                                                    config.particle, config.grid,
                                                    config.convolution, noise);
            }
            slots[index] = reduce_trajectory(traj);
        } catch (const DivergenceError&) {
            slots[index].diverged = true;
        }
    };

    unsigned workers = n_workers == 0 ? std::thread::hardware_concurrency() : n_workers;
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_traj));
    result.workers_used = workers;

    if (workers <= 1) {
        for (std::size_t i = 0; i < n_traj; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n_traj) return;
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::size_t n_diverged = 0;
    for (std::size_t i = 0; i < n_traj; ++i) {
        if (slots[i].diverged) {
            result.diverged_indices.push_back(i);
            ++n_diverged;
        }
    }
    if (10 * n_diverged > n_traj) {
        throw DivergenceError("ensemble failed: " + std::to_string(n_diverged) + " of " +
                                  std::to_string(n_traj) + " trajectories diverged",
                              0);
    }

    const std::size_t n_pts = config.grid.n_points();
    auto make_series = [&](auto&& getter) {
        TimeSeries ts;
        ts.grid = config.grid;
        ts.values.resize(n_pts);
        ts.stderrs.resize(n_pts);
        for (std::size_t i = 0; i < n_pts; ++i) {
            const MeanStderr ms =
                slot_stats(slots, [&](const TrajStats& s) { return getter(s, i); });
            ts.values[i] = ms.mean;
            ts.stderrs[i] = ms.se;
        }
        return ts;
    };
    result.msd_direct = make_series([](const TrajStats& s, std::size_t i) { return s.disp2[i]; });
    result.msd_from_vacf = make_series([](const TrajStats& s, std::size_t i) { return s.eq27[i]; });
    result.mean_energy = make_series([](const TrajStats& s, std::size_t i) { return s.energy[i]; });
    result.mean_photon_number =
        make_series([](const TrajStats& s, std::size_t i) { return s.photon[i]; });
    result.mean_occupation =
        make_series([](const TrajStats& s, std::size_t i) { return s.occupation[i]; });

    // stationary-reduced velocity autocorrelation on the grid lags
    {
        TimeSeries vacf;
        vacf.grid = TimeGrid{0.0, config.grid.dt, config.grid.n_steps};
        vacf.values.resize(n_pts);
        vacf.stderrs.resize(n_pts);
        for (std::size_t lag = 0; lag < n_pts; ++lag) {
            const MeanStderr ms = slot_stats(slots, [&](const TrajStats& s) {
                double acc = 0.0;
                for (std::size_t t = 0; t + lag < n_pts; ++t) {
                    acc += dot(s.velocities[t], s.velocities[t + lag]);
                }
                return acc / static_cast<double>(n_pts - lag);
            });
            vacf.values[lag] = ms.mean;
            vacf.stderrs[lag] = ms.se;
        }
        result.vacf = vacf;
    }

    const KernelSpec kernel =
        memory_kernel(lattice, config.particle, config.approx, KernelEquation::MomentumEq);
    const double w_min = lattice.min_omega();
    result.memory_metric = kernel.empty() ? 0.0 : memory_metric(kernel, 10.0 / w_min);

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

namespace {

double drift_of(const TimeSeries& s) {
    if (s.values.empty()) return 0.0;
    const double ref = s.values.front();
    double dev = 0.0;
    double peak = std::abs(ref);
    for (double v : s.values) {
        dev = std::max(dev, std::abs(v - ref));
        peak = std::max(peak, std::abs(v));
    }
    return dev / std::max(peak, 1e-300);
}

}  // namespace

EnsembleSummary summarize(const EnsembleResult& result) {
    if (result.msd_direct.values.empty()) throw EmptyInputError("result carries no series");
    EnsembleSummary summary;
    summary.final_msd = result.msd_direct.values.back();
    summary.memory_metric = result.memory_metric;
    summary.energy_drift = drift_of(result.mean_energy);
    summary.photon_drift = drift_of(result.mean_photon_number);
    summary.final_photon_number = result.mean_photon_number.values.back();

    // log-log slope of MSD over the last decade of t
    const TimeGrid& grid = result.msd_direct.grid;
    const double t_lo = grid.t_final() / 10.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        const double t = grid.time_at(i);
        const double msd = result.msd_direct.values[i];
        if (t < t_lo || !(t > 0.0) || !(msd > 0.0)) continue;
        const double lx = std::log(t);
        const double ly = std::log(msd);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n >= 2) {
        const double denom = static_cast<double>(n) * sxx - sx * sx;
        if (denom > 0.0) summary.msd_exponent = (static_cast<double>(n) * sxy - sx * sy) / denom;
    }
    return summary;
}

namespace {

using Json = nlohmann::ordered_json;

Json config_json(const SimConfig& c) {
    Json j;
    j["units.hbar"] = c.units.hbar;
    j["units.c"] = c.units.c;
    j["particle.mass"] = c.particle.mass;
    j["particle.charge"] = c.particle.charge;
    j["particle.coupling_scale"] = c.particle.coupling_scale;
    j["lattice.box_length"] = c.box_length;
    j["lattice.n_max"] = c.n_max;
    j["dynamics.approximation"] = c.approx == Approximation::Dipole ? "dipole" : "quadrupole";
    j["dynamics.formulation"] = c.formulation == Formulation::Local ? "local" : "reduced";
    j["dynamics.convolution"] =
        c.convolution == ConvolutionMethod::Naive ? "naive" : "incremental";
    j["grid.t_start"] = c.grid.t0;
    j["grid.dt"] = c.grid.dt;
    j["grid.n_steps"] = c.grid.n_steps;
    j["noise.enabled"] = c.noise.enabled;
    j["noise.sigma"] = c.noise.sigma;
    j["noise.tau_c"] = c.noise.tau_c;
    switch (c.initial_dist.kind) {
        case InitialModeDist::Kind::Vacuum: j["initial.mode_dist"] = "vacuum"; break;
        case InitialModeDist::Kind::FixedOccupation: j["initial.mode_dist"] = "fixed"; break;
        case InitialModeDist::Kind::Thermal: j["initial.mode_dist"] = "thermal"; break;
    }
    j["initial.occupation"] = c.initial_dist.occupation;
    j["initial.temperature"] = c.initial_dist.temperature;
    j["initial.x0"] = {c.x0.x, c.x0.y, c.x0.z};
    j["initial.p0"] = {c.p0.x, c.p0.y, c.p0.z};
    j["ensemble.n_trajectories"] = c.n_trajectories;
    j["ensemble.master_seed"] = c.master_seed;
    return j;
}

Json series_json(const TimeSeries& s) {
    Json j;
    j["mean"] = s.values;
    if (s.has_stderr()) j["stderr"] = s.stderrs;
    return j;
}

}  // namespace

std::string to_json(const EnsembleResult& result, bool include_timing) {
    Json j;
    j["config"] = config_json(result.config);
    Json t = Json::array();
    for (std::size_t i = 0; i < result.config.grid.n_points(); ++i) {
        t.push_back(result.config.grid.time_at(i));
    }
    j["t"] = std::move(t);
    j["series"]["msd_direct"] = series_json(result.msd_direct);
    j["series"]["msd_from_vacf"] = series_json(result.msd_from_vacf);
    j["series"]["vacf"] = series_json(result.vacf);
    j["series"]["mean_energy"] = series_json(result.mean_energy);
    j["series"]["mean_photon_number"] = series_json(result.mean_photon_number);
    j["series"]["mean_occupation"] = series_json(result.mean_occupation);
    j["memory_metric"] = result.memory_metric;
    j["diverged_indices"] = result.diverged_indices;
    j["warnings"] = result.warnings;
    if (include_timing) {
        j["timing"]["wall_seconds"] = result.wall_seconds;
        j["timing"]["workers"] = result.workers_used;
    }
    return j.dump(2);
}

std::string to_json(const EnsembleSummary& summary) {
    Json j;
    j["final_msd"] = summary.final_msd;
    if (summary.msd_exponent) {
        j["msd_exponent"] = *summary.msd_exponent;
    } else {
        j["msd_exponent"] = nullptr;
    }
    j["memory_metric"] = summary.memory_metric;
    j["energy_drift"] = summary.energy_drift;
    j["photon_number_drift"] = summary.photon_drift;
    j["final_photon_number"] = summary.final_photon_number;
    return j.dump(2);
}

}  // namespace nmgle
