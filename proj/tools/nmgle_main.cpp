// Command-line front end: runs experiments from key=value configs and emits
// CSV series, JSON summaries and SVG plots.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nmgle/config_io.hpp"
#include "nmgle/convolution.hpp"
#include "nmgle/dipole.hpp"
#include "nmgle/ensemble.hpp"
#include "nmgle/errors.hpp"
#include "nmgle/quadrupole.hpp"
#include "nmgle/series_io.hpp"
#include "nmgle/svg.hpp"

namespace fs = std::filesystem;
using namespace nmgle;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

// Output directory that removes everything it wrote unless the command
// commits, so failed runs leave no partial outputs behind.
class OutputSession {
public:
    explicit OutputSession(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }

    ~OutputSession() {
        if (committed_) return;
        for (const fs::path& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

    OutputSession(const OutputSession&) = delete;
    OutputSession& operator=(const OutputSession&) = delete;

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        write_text_file(path.string(), content);
        written_.push_back(path);
    }

    void commit() { committed_ = true; }

    std::string dir() const { return dir_.string(); }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool committed_ = false;
};

unsigned worker_cap() {
    const char* env = std::getenv("NMGLE_THREADS");
    if (!env || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
        throw ConfigError("NMGLE_THREADS must be a non-negative integer, got '" + std::string(env) +
                          "'");
    }
    return static_cast<unsigned>(v);
}

void print_warnings(const EnsembleResult& result) {
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<double> grid_times(const TimeGrid& grid) {
    std::vector<double> t(grid.n_points());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid.time_at(i);
    return t;
}

void cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const SimConfig config = parse_config(config_path);
    OutputSession out(out_dir);
    const EnsembleResult result = run_ensemble(config, worker_cap());
    print_warnings(result);

    // the VACF is indexed by lag; row i of the CSV carries the lag t_i - t_start
    TimeSeries vacf_rows = result.vacf;
    vacf_rows.grid = config.grid;
    out.write("config.echo", echo_config(config));
    out.write("series.csv",
              series_csv(config.grid, {
                             {"msd_direct", &result.msd_direct, true},
                             {"msd_from_vacf", &result.msd_from_vacf, true},
                             {"vacf", &vacf_rows, true},
                             {"mean_energy", &result.mean_energy, true},
                             {"mean_photon_number", &result.mean_photon_number, true},
                             {"mean_occupation", &result.mean_occupation, true},
                         }));
    out.write("summary.json", to_json(summarize(result)));
    out.write("result.json", to_json(result, true));

    const std::vector<double> t = grid_times(config.grid);
    out.write("msd.svg", svg_plot({{"msd_direct", t, result.msd_direct.values, ""},
                                   {"msd_from_vacf", t, result.msd_from_vacf.values, ""}},
                                  {"mean square displacement", "t", "MSD", false, 720, 480}));
    out.write("msd_loglog.svg", svg_plot({{"msd_direct", t, result.msd_direct.values, ""},
                                          {"msd_from_vacf", t, result.msd_from_vacf.values, ""}},
                                         {"mean square displacement", "t", "MSD", true, 720, 480}));
    out.write("vacf.svg",
              svg_plot({{"vacf", t, result.vacf.values, ""}},
                       {"velocity autocorrelation", "lag", "C(lag)", false, 720, 480}));
    out.commit();
    std::cout << "simulate: wrote " << out.dir() << "\n";
}

void cmd_compare_formulations(const std::string& config_path, const std::string& out_dir) {
    SimConfig config = parse_config(config_path);
    if (config.approx != Approximation::Quadrupole) {
        throw ConfigError("compare-formulations requires dynamics.approximation = quadrupole");
    }
    OutputSession out(out_dir);

    const ModeLattice lattice =
        build_lattice(config.box_length, config.n_max, config.units, config.particle);
    const std::size_t n_pts = config.grid.n_points();
    std::vector<double> div_x(n_pts, 0.0), div_p(n_pts, 0.0);
    double scale_x = 0.0, scale_p = 0.0;

    for (std::uint64_t i = 0; i < config.n_trajectories; ++i) {
        RngStream stream = derive_stream(config.master_seed, i);
        const std::vector<Complex> alphas0 =
            sample_initial_modes(lattice, config.initial_dist, stream);
        const NoisePath path = ou_noise_path(config.noise, config.grid, stream);
        const NoisePath* noise = config.noise.enabled ? &path : nullptr;

        const SystemState s0{config.grid.t0, config.x0, config.p0, alphas0};
        const Trajectory local =
            integrate_quadrupole_local(s0, lattice, config.particle, config.grid, noise);
        const Trajectory reduced =
            integrate_quadrupole_reduced(config.x0, config.p0, alphas0, lattice, config.particle,
                                         config.grid, config.convolution, noise);
        for (std::size_t k = 0; k < n_pts; ++k) {
            div_x[k] = std::max(div_x[k], norm_inf(local.states[k].x - reduced.states[k].x));
            div_p[k] = std::max(div_p[k], norm_inf(local.states[k].p - reduced.states[k].p));
            scale_x = std::max(scale_x, norm_inf(local.states[k].x));
            scale_p = std::max(scale_p, norm_inf(local.states[k].p));
        }
    }

    scale_x = std::max(scale_x, 1e-300);
    scale_p = std::max(scale_p, 1e-300);
    double max_rel = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < n_pts; ++k) {
        const double rx = div_x[k] / scale_x;
        const double rp = div_p[k] / scale_p;
        max_rel = std::max(max_rel, std::max(rx, rp));
        rows.push_back({config.grid.time_at(k), div_x[k], div_p[k], rx, rp});
    }

    out.write("config.echo", echo_config(config));
    out.write("divergence.csv",
              table_csv({"t", "abs_x", "abs_p", "rel_x", "rel_p"}, rows));
    out.write("summary.json", std::string("{\n  \"max_relative_divergence\": ") +
                                  format_double(max_rel) + "\n}\n");
    out.commit();
    std::cout << "compare-formulations: max relative divergence " << format_double(max_rel) << "\n";
}

void cmd_msd(const std::string& config_path, const std::string& out_dir) {
    const SimConfig config = parse_config(config_path);
    OutputSession out(out_dir);
    const EnsembleResult result = run_ensemble(config, worker_cap());
    print_warnings(result);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < config.grid.n_points(); ++i) {
        const double d = result.msd_direct.values[i];
        const double v = result.msd_from_vacf.values[i];
        const double sd = result.msd_direct.stderrs[i];
        const double sv = result.msd_from_vacf.stderrs[i];
        const double combined = std::sqrt(sd * sd + sv * sv);
        const double units = combined > 0.0 ? std::abs(d - v) / combined : 0.0;
        rows.push_back({config.grid.time_at(i), d, sd, v, sv, units});
    }
    out.write("config.echo", echo_config(config));
    out.write("msd.csv", table_csv({"t", "msd_direct", "msd_direct_stderr", "msd_from_vacf",
                                    "msd_from_vacf_stderr", "diff_stderr_units"},
                                   rows));
    out.commit();
    std::cout << "msd: wrote " << out.dir() << "\n";
}

void cmd_kernel(const std::string& config_path, const std::string& out_dir, double horizon,
                std::size_t n_points) {
    const SimConfig config = parse_config(config_path);
    OutputSession out(out_dir);
    const ModeLattice lattice =
        build_lattice(config.box_length, config.n_max, config.units, config.particle);
    const KernelSpec coord =
        memory_kernel(lattice, config.particle, config.approx, KernelEquation::CoordinateEq);
    const KernelSpec mom =
        memory_kernel(lattice, config.particle, config.approx, KernelEquation::MomentumEq);
    if (horizon <= 0.0) horizon = 10.0 / std::max(lattice.min_omega(), 1e-300);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double tau = horizon * static_cast<double>(i) / static_cast<double>(n_points - 1);
        rows.push_back({tau, coord.eval(tau), mom.eval(tau)});
    }
    const double metric = mom.empty() ? 0.0 : memory_metric(mom, horizon);

    out.write("config.echo", echo_config(config));
    out.write("kernel.csv", table_csv({"tau", "kernel_coordinate", "kernel_momentum"}, rows));
    out.write("metric.json", std::string("{\n  \"memory_metric\": ") + format_double(metric) +
                                 ",\n  \"horizon\": " + format_double(horizon) + "\n}\n");
    out.commit();
    std::cout << "kernel: memory metric " << format_double(metric) << "\n";
}

void cmd_bench_convolution(const std::vector<std::size_t>& steps, int repeats,
                           const std::string& out_dir) {
    OutputSession out(out_dir);
    const auto rows = benchmark_convolution(steps, repeats);
    std::vector<std::vector<double>> table;
    for (const auto& r : rows) {
        table.push_back({static_cast<double>(r.n_steps), r.naive_per_step_seconds,
                         r.incremental_per_step_seconds,
                         r.naive_per_step_seconds / r.incremental_per_step_seconds,
                         r.max_rel_difference});
    }
    std::string echo = "bench.repeats = " + std::to_string(repeats) + "\n";
    echo += "bench.steps =";
    for (std::size_t s : steps) echo += " " + std::to_string(s);
    echo += "\n";
    out.write("config.echo", echo);
    out.write("timings.csv", table_csv({"n_steps", "naive_per_step_seconds",
                                        "incremental_per_step_seconds", "speedup_ratio",
                                        "max_rel_difference"},
                                       table));
    out.commit();
    for (const auto& r : rows) {
        std::cout << "n=" << r.n_steps << "  naive/step=" << format_double(r.naive_per_step_seconds)
                  << "s  incremental/step=" << format_double(r.incremental_per_step_seconds)
                  << "s  agreement=" << format_double(r.max_rel_difference) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal-Hamiltonian particle-field simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    double horizon = 0.0;
    std::size_t kernel_points = 2001;
    std::vector<std::size_t> bench_steps = {1000, 10000, 100000};
    int bench_repeats = 5;

    CLI::App* simulate = app.add_subcommand("simulate", "run an ensemble and write series + plots");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--out", out_dir, "output directory");

    CLI::App* compare = app.add_subcommand(
        "compare-formulations", "integrate the local and reduced forms on matched seeds");
    compare->add_option("--config", config_path, "config file")->required();
    compare->add_option("--out", out_dir, "output directory");

    CLI::App* msd = app.add_subcommand("msd", "write direct and correlation-integral MSD");
    msd->add_option("--config", config_path, "config file")->required();
    msd->add_option("--out", out_dir, "output directory");

    CLI::App* kernel = app.add_subcommand("kernel", "write the memory kernel and its metric");
    kernel->add_option("--config", config_path, "config file")->required();
    kernel->add_option("--out", out_dir, "output directory");
    kernel->add_option("--horizon", horizon, "kernel horizon (default 10 / min frequency)");
    kernel->add_option("--points", kernel_points, "table resolution")->check(CLI::Range(2, 10000000));

    CLI::App* bench = app.add_subcommand("bench-convolution",
                                         "time naive vs incremental history convolution");
    bench->add_option("--steps", bench_steps, "history lengths to time");
    bench->add_option("--repeats", bench_repeats, "timing repeats per length")
        ->check(CLI::Range(1, 100));
    bench->add_option("--out", out_dir, "output directory");

    CLI::App* echo = app.add_subcommand("echo-config", "print the effective config");
    echo->add_option("--config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            cmd_simulate(config_path, out_dir);
        } else if (compare->parsed()) {
            cmd_compare_formulations(config_path, out_dir);
        } else if (msd->parsed()) {
            cmd_msd(config_path, out_dir);
        } else if (kernel->parsed()) {
            cmd_kernel(config_path, out_dir, horizon, kernel_points);
        } else if (bench->parsed()) {
            cmd_bench_convolution(bench_steps, bench_repeats, out_dir);
        } else if (echo->parsed()) {
            std::cout << echo_config(parse_config(config_path));
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
