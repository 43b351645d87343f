#include "nmgle/convolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nmgle/errors.hpp"
#include "nmgle/stochastic.hpp"

namespace nmgle {

namespace {

// Catches the accumulator up to the sampled prefix, one trapezoid panel per
// missing step. Ahead-of-signal accumulators cannot be rewound.
template <typename T>
void advance_accumulator(ConvolutionAccumulator& acc, std::span<const T> samples, double omega,
                         double dt) {
    const std::size_t n_panels = samples.empty() ? 0 : samples.size() - 1;
    if (acc.panels > n_panels) {
        throw HistorySyncError("convolution accumulator is ahead of its signal (" +
                               std::to_string(acc.panels) + " panels vs " +
                               std::to_string(n_panels) + ")");
    }
    for (std::size_t j = acc.panels; j < n_panels; ++j) {
        const double s0 = static_cast<double>(j) * dt;
        const double s1 = static_cast<double>(j + 1) * dt;
        const Complex e0 = std::polar(1.0, -omega * s0);
        const Complex e1 = std::polar(1.0, -omega * s1);
        const Complex f0 = Complex(samples[j]);
        const Complex f1 = Complex(samples[j + 1]);
        acc.a += (0.5 * dt) * (e0 * f0 + e1 * f1);
        acc.b += (0.5 * dt) * (std::conj(e0) * f0 + std::conj(e1) * f1);
    }
    acc.panels = n_panels;
}

}  // namespace

double memory_convolution(std::span<const double> samples, double omega, double dt,
                          ConvolutionMethod method, ConvolutionAccumulator* acc) {
    if (!(dt > 0.0)) throw GridError("convolution requires a positive time step");
    if (samples.size() <= 1) {
        if (method == ConvolutionMethod::Incremental && acc) advance_accumulator(*acc, samples, omega, dt);
        return 0.0;
    }
    const std::size_t n = samples.size();
    const double t = static_cast<double>(n - 1) * dt;

    if (method == ConvolutionMethod::Naive) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? 0.5 * dt : dt;
            sum += w * std::sin(omega * (t - static_cast<double>(j) * dt)) * samples[j];
        }
        return sum;
    }

    if (!acc) throw HistorySyncError("incremental convolution requires an accumulator");
    advance_accumulator(*acc, samples, omega, dt);
    return (std::polar(1.0, omega * t) * acc->a).imag();
}

Complex memory_convolution(std::span<const Complex> samples, double omega, double dt,
                           ConvolutionMethod method, ConvolutionAccumulator* acc) {
    if (!(dt > 0.0)) throw GridError("convolution requires a positive time step");
    if (samples.size() <= 1) {
        if (method == ConvolutionMethod::Incremental && acc) advance_accumulator(*acc, samples, omega, dt);
        return {0.0, 0.0};
    }
    const std::size_t n = samples.size();
    const double t = static_cast<double>(n - 1) * dt;

    if (method == ConvolutionMethod::Naive) {
        Complex sum{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? 0.5 * dt : dt;
            sum += w * std::sin(omega * (t - static_cast<double>(j) * dt)) * samples[j];
        }
        return sum;
    }

    if (!acc) throw HistorySyncError("incremental convolution requires an accumulator");
    advance_accumulator(*acc, samples, omega, dt);
    const Complex fwd = std::polar(1.0, omega * t);
    return (fwd * acc->a - std::conj(fwd) * acc->b) / Complex{0.0, 2.0};
}

void HistoryBuffer::append(std::span<const Complex> values) {
    if (values.size() != samples_.size()) {
        throw StateShapeError("history record carries " + std::to_string(values.size()) +
                              " values for " + std::to_string(samples_.size()) + " modes");
    }
    for (std::size_t m = 0; m < samples_.size(); ++m) samples_[m].push_back(values[m]);
}

void HistoryBuffer::replace_last(std::span<const Complex> values) {
    if (values.size() != samples_.size() || samples_.empty() || samples_[0].empty()) {
        throw StateShapeError("history replace on mismatched or empty buffer");
    }
    for (std::size_t m = 0; m < samples_.size(); ++m) samples_[m].back() = values[m];
}

namespace {

std::vector<double> smooth_random_signal(std::size_t n_points, RngStream& stream) {
    struct Harmonic {
        double amp, freq, phase;
    };
    std::vector<Harmonic> parts(6);
    for (auto& h : parts) {
        h.amp = stream.uniform(0.2, 1.0);
        h.freq = stream.uniform(0.05, 2.5);
        h.phase = stream.uniform(0.0, 2.0 * 3.14159265358979323846);
    }
    std::vector<double> f(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double s = static_cast<double>(i);
        double v = 0.0;
        for (const auto& h : parts) v += h.amp * std::sin(h.freq * s * 1e-2 + h.phase);
        f[i] = v;
    }
    return f;
}

// Wall time of one call, inner-repeated until the sample is long enough for
// the clock.
template <typename F>
double time_seconds(F&& call) {
    using clock = std::chrono::steady_clock;
    std::size_t reps = 1;
    for (;;) {
        const auto start = clock::now();
        for (std::size_t r = 0; r < reps; ++r) call();
        const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
        if (elapsed >= 2e-4 || reps >= (1u << 20)) {
            return elapsed / static_cast<double>(reps);
        }
        reps *= 2;
    }
}

volatile double g_sink = 0.0;

}  // namespace

std::vector<ConvolutionBenchRow> benchmark_convolution(const std::vector<std::size_t>& step_counts,
                                                       int repeats, double omega, double dt) {
    std::vector<ConvolutionBenchRow> rows;
    RngStream stream = derive_stream(0x6e6d676cULL, 0);

    for (std::size_t n : step_counts) {
        if (n < 2) throw ConfigError("convolution benchmark needs at least 2 steps");
        const std::vector<double> signal = smooth_random_signal(n + 1, stream);
        ConvolutionBenchRow row;
        row.n_steps = n;

        // cross-method agreement over prefixes spread across the signal
        {
            ConvolutionAccumulator acc;
            double max_diff = 0.0;
            double max_mag = 0.0;
            const std::size_t checks = 32;
            for (std::size_t c = 1; c <= checks; ++c) {
                const std::size_t len = 1 + (n * c) / checks;
                const std::span<const double> prefix(signal.data(), len);
                const double naive =
                    memory_convolution(prefix, omega, dt, ConvolutionMethod::Naive);
                const double incr =
                    memory_convolution(prefix, omega, dt, ConvolutionMethod::Incremental, &acc);
                max_diff = std::max(max_diff, std::abs(naive - incr));
                max_mag = std::max(max_mag, std::abs(naive));
            }
            row.max_rel_difference = max_diff / std::max(max_mag, 1e-300);
        }

        std::vector<double> naive_times, incr_times;
        for (int r = 0; r < repeats; ++r) {
            naive_times.push_back(time_seconds([&] {
                g_sink = memory_convolution(std::span<const double>(signal), omega, dt,
                                            ConvolutionMethod::Naive);
            }));
            incr_times.push_back(time_seconds([&] {
                                     ConvolutionAccumulator acc;
                                     double last = 0.0;
                                     for (std::size_t len = 2; len <= n + 1; ++len) {
                                         last = memory_convolution(
                                             std::span<const double>(signal.data(), len), omega, dt,
                                             ConvolutionMethod::Incremental, &acc);
                                     }
                                     g_sink = last;
                                 }) /
                                 static_cast<double>(n));
        }
        auto median = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            return v[v.size() / 2];
        };
        row.naive_per_step_seconds = median(naive_times);
        row.incremental_per_step_seconds = median(incr_times);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nmgle
