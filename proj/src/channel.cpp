#include "imdd/channel.hpp"

#include "imdd/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace imdd {

namespace {
constexpr double pi = std::numbers::pi;

// Reversed Bessel polynomial, order 5: s^5 + 15 s^4 + 105 s^3 + 420 s^2 + 945 s + 945.
// The -3 dB point of this normalization sits at w = 2.42741070215263.
std::complex<double> bessel5(std::complex<double> s) {
    return ((((s + 15.0) * s + 105.0) * s + 420.0) * s + 945.0) * s + 945.0;
}

constexpr double kBessel5Cut3dB = 2.42741070215263;

std::complex<double> bessel5_response(double f, double cutoff) {
    const std::complex<double> s(0.0, f / cutoff * kBessel5Cut3dB);
    return 945.0 / bessel5(s);
}

} // namespace

void ChannelConfig::validate() const {
    if (length < 0.0) throw ConfigError("fiber length must be >= 0");
    if (!std::isfinite(beta2 * length)) throw ConfigError("beta2*length must be finite");
    for (double bw : device_bandwidths)
        if (bw <= 0.0) throw ConfigError("device bandwidths must be positive");
    if (burst.rate < 0.0) throw ConfigError("burst rate must be >= 0");
    if (burst.duration < 1) throw ConfigError("burst duration must be >= 1 symbol");
    if (burst.amplitude < 1.0) throw ConfigError("burst amplitude must be >= 1");
    if (noise_ref < 0.0) throw ConfigError("noise_ref must be >= 0");
}

double noise_sigma(const ChannelConfig& cfg) {
    return cfg.noise_ref * std::pow(10.0, -(cfg.rop_dbm - cfg.rop_ref_dbm) / 10.0);
}

double cd_frequency_response(double f_hz, const ChannelConfig& cfg) {
    return std::cos(2.0 * pi * pi * cfg.beta2 * cfg.length * f_hz * f_hz);
}

std::vector<double> cd_null_frequencies(const ChannelConfig& cfg, double f_max_hz, double rel_tol) {
    std::vector<double> roots;
    if (cfg.beta2 == 0.0 || cfg.length == 0.0 || f_max_hz <= 0.0) return roots;
    const int grid = 200000;
    double prev_f = 0.0;
    double prev_v = cd_frequency_response(0.0, cfg);
    for (int i = 1; i <= grid; ++i) {
        const double f = f_max_hz * i / grid;
        const double v = cd_frequency_response(f, cfg);
        if ((prev_v > 0.0 && v < 0.0) || (prev_v < 0.0 && v > 0.0) || v == 0.0) {
            double lo = prev_f, hi = f;
            double flo = prev_v;
            while ((hi - lo) > rel_tol * hi) {
                const double mid = 0.5 * (lo + hi);
                const double fm = cd_frequency_response(mid, cfg);
                if (fm == 0.0) { lo = hi = mid; break; }
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_f = f;
        prev_v = v;
    }
    return roots;
}

Waveform apply_smallsignal_channel(const Waveform& w, const ChannelConfig& cfg) {
    if (w.samples.empty()) throw DomainError("channel input must be non-empty");
    auto X = fft::rfft(w.samples);
    const double df = w.sample_rate / static_cast<double>(w.samples.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        X[k] *= cd_frequency_response(df * static_cast<double>(k), cfg);
    }
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = fft::irfft(X, w.samples.size());
    return out;
}

FullFieldResult apply_fullfield_channel(const Waveform& w, const ChannelConfig& cfg,
                                        double modulation_index) {
    if (w.samples.empty()) throw DomainError("channel input must be non-empty");
    if (modulation_index <= 0.0 || modulation_index > 1.0)
        throw ConfigError("modulation index must lie in (0, 1]");
    const std::size_t n = w.samples.size();
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    const double norm = peak > 0.0 ? 1.0 / peak : 0.0;

    FullFieldResult res;
    std::vector<std::complex<double>> field(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 1.0 + modulation_index * w.samples[i] * norm;
        if (a < 0.0) {
            ++res.clipped_samples;
            field[i] = 0.0;
        } else {
            field[i] = std::sqrt(a);
        }
    }
    auto F = fft::cfft(field, false);
    const double df = w.sample_rate / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k <= n / 2) ? df * static_cast<double>(k)
                                      : df * (static_cast<double>(k) - static_cast<double>(n));
        const double omega = 2.0 * pi * f;
        const double phase = -(cfg.beta2 / 2.0) * omega * omega * cfg.length;
        F[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    auto dispersed = fft::cfft(F, true);
    res.out.sample_rate = w.sample_rate;
    res.out.samples.resize(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res.out.samples[i] = std::norm(dispersed[i]);
        mean += res.out.samples[i];
    }
    mean /= static_cast<double>(n);
    const double scale = peak / modulation_index; // undo [-1,1] normalization and linearized gain m
    for (double& v : res.out.samples) v = (v - mean) * scale;
    return res;
}

Waveform lowpass_device(const Waveform& w, double cutoff_hz) {
    if (w.samples.empty()) return w;
    if (cutoff_hz <= 0.0 || cutoff_hz >= w.sample_rate / 2.0)
        throw ConfigError("low-pass cutoff must lie in (0, sample_rate/2)");
    auto X = fft::rfft(w.samples);
    const double df = w.sample_rate / static_cast<double>(w.samples.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        X[k] *= bessel5_response(df * static_cast<double>(k), cutoff_hz);
    }
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = fft::irfft(X, w.samples.size());
    return out;
}

Waveform add_noise(const Waveform& w, const ChannelConfig& cfg, std::uint64_t seed) {
    const double sigma = noise_sigma(cfg);
    if (sigma == 0.0) return w;
    Waveform out = w;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : out.samples) v += dist(rng);
    return out;
}

BurstResult inject_bursts(const Waveform& w, const ChannelConfig& cfg, double symbol_rate) {
    BurstResult res;
    res.out = w;
    if (cfg.burst.rate <= 0.0 || w.samples.empty()) return res;
    if (symbol_rate <= 0.0) throw ConfigError("inject_bursts needs a positive symbol rate");

    const double sps = w.sample_rate / symbol_rate;
    const double n_symbols = static_cast<double>(w.samples.size()) / sps;
    const double per_symbol_rate = cfg.burst.rate / 1e6;
    const double extra_sigma =
        noise_sigma(cfg) * std::sqrt(std::max(0.0, cfg.burst.amplitude * cfg.burst.amplitude - 1.0));

    std::mt19937_64 rng(cfg.burst.seed);
    std::exponential_distribution<double> gap(per_symbol_rate);
    std::normal_distribution<double> dist(0.0, 1.0);

    double pos = gap(rng);
    while (pos < n_symbols) {
        const long long start_sym = static_cast<long long>(pos);
        res.events.push_back(BurstEvent{start_sym, cfg.burst.duration});
        if (extra_sigma > 0.0) {
            const long long s0 = static_cast<long long>(std::floor(start_sym * sps));
            const long long s1 = static_cast<long long>(
                std::ceil((start_sym + cfg.burst.duration) * sps));
            for (long long s = std::max(0ll, s0);
                 s < std::min<long long>(static_cast<long long>(res.out.samples.size()), s1); ++s) {
                res.out.samples[static_cast<std::size_t>(s)] += extra_sigma * dist(rng);
            }
        }
        pos += cfg.burst.duration + gap(rng);
    }
    return res;
}

} // namespace imdd
