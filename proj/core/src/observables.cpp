#include "nmgle/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nmgle/errors.hpp"

namespace nmgle {

namespace {

void check_ensemble(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) throw EmptyInputError("ensemble contains no trajectories");
    for (const Trajectory& t : trajectories) {
        if (!same_grid(t.grid, trajectories.front().grid)) {
            throw GridError("trajectories in the ensemble do not share one grid");
        }
    }
}

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    const auto n = static_cast<double>(xs.size());
    for (double v : xs) r.mean += v;
    r.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double v : xs) ss += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(ss / (n * (n - 1.0)));
    }
    return r;
}

}  // namespace

TwoTimeCorrelation vacf_two_time(const std::vector<Trajectory>& trajectories) {
    check_ensemble(trajectories);
    const TimeGrid grid = trajectories.front().grid;
    const std::size_t n = grid.n_points();
    TwoTimeCorrelation table;
    table.grid = grid;
    table.values.assign(n * n, 0.0);
    for (const Trajectory& traj : trajectories) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                table.values[i * n + j] += dot(traj.velocities[i], traj.velocities[j]);
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(trajectories.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            table.values[i * n + j] *= inv;
            table.values[j * n + i] = table.values[i * n + j];
        }
    }
    return table;
}

TimeSeries vacf(const std::vector<Trajectory>& trajectories, const TimeGrid& lags) {
    check_ensemble(trajectories);
    const TimeGrid grid = trajectories.front().grid;
    const std::size_t n = grid.n_points();

    // lags must land on trajectory grid points
    std::vector<std::size_t> lag_steps(lags.n_points());
    for (std::size_t l = 0; l < lags.n_points(); ++l) {
        const double tau = lags.time_at(l);
        const double u = tau / grid.dt;
        const auto j = static_cast<long long>(std::llround(u));
        if (j < 0 || std::abs(u - static_cast<double>(j)) > 1e-9 * std::max(1.0, std::abs(u)) ||
            static_cast<std::size_t>(j) >= n) {
            throw GridError("lag does not land on the trajectory grid");
        }
        lag_steps[l] = static_cast<std::size_t>(j);
    }

    TimeSeries series;
    series.grid = lags;
    series.values.resize(lags.n_points());
    series.stderrs.resize(lags.n_points());
    std::vector<double> per_traj(trajectories.size());
    for (std::size_t l = 0; l < lag_steps.size(); ++l) {
        const std::size_t j = lag_steps[l];
        for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
            const auto& v = trajectories[ti].velocities;
            double acc = 0.0;
            for (std::size_t s = 0; s + j < n; ++s) acc += dot(v[s], v[s + j]);
            per_traj[ti] = acc / static_cast<double>(n - j);
        }
        const MeanStderr ms = mean_stderr(per_traj);
        series.values[l] = ms.mean;
        series.stderrs[l] = ms.se;
    }
    return series;
}

TimeSeries msd_direct(const std::vector<Trajectory>& trajectories) {
    check_ensemble(trajectories);
    const TimeGrid grid = trajectories.front().grid;
    TimeSeries series;
    series.grid = grid;
    series.values.resize(grid.n_points());
    series.stderrs.resize(grid.n_points());
    std::vector<double> per_traj(trajectories.size());
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
        for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
            const Vec3 d = trajectories[ti].states[i].x - trajectories[ti].states[0].x;
            per_traj[ti] = dot(d, d);
        }
        const MeanStderr ms = mean_stderr(per_traj);
        series.values[i] = ms.mean;
        series.stderrs[i] = ms.se;
    }
    return series;
}

TimeSeries msd_from_vacf(const TwoTimeCorrelation& table) {
    const std::size_t n = table.grid.n_points();
    if (table.values.size() != n * n) throw GridError("correlation table does not match its grid");
    const double dt = table.grid.dt;

    TimeSeries series;
    series.grid = table.grid;
    series.values.resize(n);

    // prefix machinery: column sums R_j(m) = sum_{a<=m} C(a, j) and the full
    // block sum S2(m); trapezoid end-weights enter as rank-one corrections
    std::vector<double> col_prefix(n, 0.0);
    double block = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        double row_head = 0.0;  // sum_{b<m} C(m, b)
        for (std::size_t b = 0; b < m; ++b) row_head += table.at(m, b);
        block += 2.0 * row_head + table.at(m, m);
        for (std::size_t j = 0; j < n; ++j) col_prefix[j] += table.at(m, j);

        const double corner =
            0.25 * (table.at(0, 0) + 2.0 * table.at(0, m) + table.at(m, m));
        const double value = dt * dt * (block - col_prefix[0] - col_prefix[m] + corner);
        series.values[m] = value;
    }
    return series;
}

double photon_number(const SystemState& state, const ModeLattice& lattice) {
    check_state_shape(state, lattice);
    double sum = 0.0;
    for (std::size_t m = 0; m < lattice.modes.size(); ++m) {
        sum += lattice.units.hbar * lattice.modes[m].omega * std::norm(state.alphas[m]);
    }
    return sum;
}

double total_occupation(const SystemState& state) {
    double sum = 0.0;
    for (const Complex& a : state.alphas) sum += std::norm(a);
    return sum;
}

double KernelSpec::eval(double tau) const {
    double k = 0.0;
    for (const Term& t : terms) k += t.weight * std::sin(t.omega * tau);
    return k;
}

KernelSpec memory_kernel(const ModeLattice& lattice, const ParticleParams& params,
                         Approximation approx, KernelEquation which) {
    (void)params;
    KernelSpec kernel;
    if (approx == Approximation::Dipole) return kernel;  // memoryless by structure
    const double sign = (which == KernelEquation::CoordinateEq) ? -1.0 : 1.0;
    const double hbar = lattice.units.hbar;
    for (const Mode& mode : lattice.modes) {
        const double w = sign * 2.0 / hbar * mode.v0 * mode.v0;
        if (w != 0.0) kernel.terms.push_back({w, mode.omega});
    }
    return kernel;
}

namespace {

// antiderivative of the sin sum: integral K = -sum (w/omega) cos(omega tau)
double kernel_antiderivative(const KernelSpec& kernel, double tau) {
    double a = 0.0;
    for (const auto& t : kernel.terms) a -= t.weight / t.omega * std::cos(t.omega * tau);
    return a;
}

double refine_root(const KernelSpec& kernel, double lo, double hi) {
    double flo = kernel.eval(lo);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = kernel.eval(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double refine_abs_max(const KernelSpec& kernel, double lo, double hi) {
    // golden-section ascent on |K| over one scan cell
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = std::abs(kernel.eval(c));
    double fd = std::abs(kernel.eval(d));
    for (int it = 0; it < 70; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = std::abs(kernel.eval(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = std::abs(kernel.eval(d));
        }
    }
    return std::max(fc, fd);
}

}  // namespace

double memory_metric(const KernelSpec& kernel, double horizon, double eps_floor) {
    if (!(horizon > 0.0)) throw ConfigError("memory metric horizon must be positive");
    if (kernel.empty()) return 0.0;

    double omega_max = 0.0;
    for (const auto& t : kernel.terms) omega_max = std::max(omega_max, std::abs(t.omega));
    const std::size_t n_scan = std::max<std::size_t>(
        1024, static_cast<std::size_t>(64.0 * horizon * omega_max / (2.0 * std::numbers::pi)) + 1);
    const double h = horizon / static_cast<double>(n_scan);

    std::vector<double> scan(n_scan + 1);
    for (std::size_t i = 0; i <= n_scan; ++i) {
        const double tau = (i == n_scan) ? horizon : h * static_cast<double>(i);
        scan[i] = kernel.eval(tau);
    }
    double scan_peak = 0.0;
    for (double v : scan) scan_peak = std::max(scan_peak, std::abs(v));

    double integral_abs = 0.0;
    double peak = scan_peak;
    double piece_start = 0.0;
    for (std::size_t i = 1; i <= n_scan; ++i) {
        const double lo = h * static_cast<double>(i - 1);
        const double tau = (i == n_scan) ? horizon : h * static_cast<double>(i);
        // the scan resolves the shortest period, so only near-peak cells can
        // hide the true maximum
        if (std::max(std::abs(scan[i - 1]), std::abs(scan[i])) >= 0.9 * scan_peak) {
            peak = std::max(peak, refine_abs_max(kernel, lo, tau));
        }
        if ((scan[i - 1] <= 0.0) != (scan[i] <= 0.0)) {
            const double root = refine_root(kernel, lo, tau);
            integral_abs +=
                std::abs(kernel_antiderivative(kernel, root) - kernel_antiderivative(kernel, piece_start));
            piece_start = root;
        }
    }
    integral_abs +=
        std::abs(kernel_antiderivative(kernel, horizon) - kernel_antiderivative(kernel, piece_start));

    return integral_abs / (horizon * std::max(peak, eps_floor));
}

}  // namespace nmgle
