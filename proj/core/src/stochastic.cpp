#include "nmgle/stochastic.hpp"

#include <cmath>
#include <numbers>

#include "nmgle/errors.hpp"

namespace nmgle {

namespace {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant)
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u clamped away from 0 so the log stays finite
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    // two finalization rounds over (seed, counter) decorrelate nearby indices
    const std::uint64_t state = mix64(mix64(master_seed + kGolden) ^ (trajectory_index * kGolden + 1));
    return RngStream(state);
}

void check_noise_config(const NoiseConfig& config) {
    if (config.sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
    if (!(config.tau_c > 0.0)) throw ConfigError("noise correlation time must be positive");
}

Vec3 NoisePath::at(double t) const {
    if (values.empty()) return {};
    const double u = (t - grid.t0) / grid.dt;
    if (u <= 0.0) return values.front();
    const auto last = static_cast<double>(values.size() - 1);
    if (u >= last) return values.back();
    const auto i = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(i);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

NoisePath NoisePath::zero(const TimeGrid& grid) {
    NoisePath path;
    path.grid = grid;
    path.values.assign(grid.n_points(), Vec3{});
    return path;
}

void check_initial_dist(const InitialModeDist& dist) {
    if (dist.kind == InitialModeDist::Kind::FixedOccupation && dist.occupation < 0.0) {
        throw ConfigError("mode occupation must be non-negative");
    }
    if (dist.kind == InitialModeDist::Kind::Thermal && dist.temperature < 0.0) {
        throw ConfigError("temperature must be non-negative");
    }
}

std::vector<Complex> sample_initial_modes(const ModeLattice& lattice, const InitialModeDist& dist,
                                          RngStream& stream) {
    check_initial_dist(dist);
    std::vector<Complex> alphas(lattice.modes.size(), Complex{0.0, 0.0});
    switch (dist.kind) {
        case InitialModeDist::Kind::Vacuum:
            break;
        case InitialModeDist::Kind::FixedOccupation: {
            const double r = std::sqrt(dist.occupation);
            for (auto& a : alphas) {
                const double phi = stream.uniform(0.0, 2.0 * std::numbers::pi);
                a = std::polar(r, phi);
            }
            break;
        }
        case InitialModeDist::Kind::Thermal: {
            const double hbar = lattice.units.hbar;
            for (std::size_t m = 0; m < alphas.size(); ++m) {
                double n_bar = 0.0;
                if (dist.temperature > 0.0) {
                    n_bar = 1.0 / std::expm1(hbar * lattice.modes[m].omega / dist.temperature);
                }
                const double s = std::sqrt(n_bar / 2.0);
                alphas[m] = Complex{s * stream.gaussian(), s * stream.gaussian()};
            }
            break;
        }
    }
    return alphas;
}

NoisePath ou_noise_path(const NoiseConfig& config, const TimeGrid& grid, RngStream& stream) {
    check_noise_config(config);
    check_grid(grid);
    if (!config.enabled || config.sigma == 0.0) return NoisePath::zero(grid);

    NoisePath path;
    path.grid = grid;
    path.values.resize(grid.n_points());
    const double rho = std::exp(-grid.dt / config.tau_c);
    const double drive = config.sigma * std::sqrt(1.0 - rho * rho);
    Vec3 f{config.sigma * stream.gaussian(), config.sigma * stream.gaussian(),
           config.sigma * stream.gaussian()};
    path.values[0] = f;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        f = f * rho + Vec3{drive * stream.gaussian(), drive * stream.gaussian(),
                           drive * stream.gaussian()};
        path.values[i] = f;
    }
    return path;
}

}  // namespace nmgle
