#include "imdd/signal.hpp"

#include "imdd/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace imdd {

SymbolSequence SymbolSequence::from_bits(const std::vector<std::uint8_t>& bits, double symbol_rate) {
    SymbolSequence s;
    s.symbol_rate = symbol_rate;
    s.source_bits = bits;
    s.amplitudes.resize(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1) throw DomainError("bit values must be 0 or 1");
        s.amplitudes[i] = 2.0 * bits[i] - 1.0;
    }
    return s;
}

SymbolSequence SymbolSequence::from_amplitudes(const std::vector<double>& amps, double symbol_rate) {
    SymbolSequence s;
    s.symbol_rate = symbol_rate;
    s.amplitudes = amps;
    s.source_bits.resize(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (amps[i] != 1.0 && amps[i] != -1.0) throw DomainError("amplitudes must be exactly -1 or +1");
        s.source_bits[i] = amps[i] > 0.0 ? 1 : 0;
    }
    return s;
}

std::vector<std::uint8_t> generate_prbs(int order, std::size_t length, std::uint64_t seed) {
    // x^p1 + x^p2 + 1, primitive over GF(2)
    int p2 = 0;
    switch (order) {
        case 7:  p2 = 6;  break;
        case 9:  p2 = 5;  break;
        case 15: p2 = 14; break;
        case 23: p2 = 18; break;
        case 31: p2 = 28; break;
        default:
            throw ConfigError("unsupported PRBS order " + std::to_string(order) +
                              " (supported: 7, 9, 15, 23, 31)");
    }
    if (length == 0) throw ConfigError("PRBS length must be positive");
    const std::uint64_t mask = (order == 64) ? ~0ull : ((1ull << order) - 1);
    std::uint64_t reg = seed & mask;
    if (reg == 0) reg = 1;
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        const std::uint64_t fb = ((reg >> (order - 1)) ^ (reg >> (p2 - 1))) & 1ull;
        reg = ((reg << 1) | fb) & mask;
        bits[i] = static_cast<std::uint8_t>(fb);
    }
    return bits;
}

SymbolSequence map_pam2(const std::vector<std::uint8_t>& bits, double symbol_rate) {
    return SymbolSequence::from_bits(bits, symbol_rate);
}

namespace {

double rrc_impulse(double t, double b) {
    // t in symbol periods
    constexpr double pi = std::numbers::pi;
    if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / pi;
    if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
        return (b / std::numbers::sqrt2) *
               ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) +
                (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
    }
    const double num = std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b));
    return num / (pi * t * (1.0 - 16.0 * b * b * t * t));
}

} // namespace

RrcFilter design_rrc(double roll_off, int span, double samples_per_symbol) {
    if (roll_off < 0.0 || roll_off > 1.0)
        throw ConfigError("RRC roll-off must lie in [0, 1]");
    if (span < 4) throw ConfigError("RRC span must be at least 4 symbols");
    if (samples_per_symbol < 1.25) throw ConfigError("RRC needs at least 1.25 samples/symbol");

    const int half = static_cast<int>(std::floor(span * samples_per_symbol / 2.0));
    RrcFilter f;
    f.roll_off = roll_off;
    f.span = span;
    f.samples_per_symbol = samples_per_symbol;
    f.taps.resize(2 * half + 1);
    for (int k = -half; k <= half; ++k) {
        f.taps[k + half] = rrc_impulse(k / samples_per_symbol, roll_off);
    }
    double energy = 0.0;
    for (double t : f.taps) energy += t * t;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& t : f.taps) t *= scale;
    return f;
}

std::vector<double> fir_same(std::span<const double> x, std::span<const double> taps) {
    if (taps.empty() || taps.size() % 2 == 0)
        throw ConfigError("fir_same requires an odd tap count");
    const std::size_t n = x.size();
    const std::size_t m = taps.size();
    if (n == 0) return {};
    // FFT overlap-free linear convolution
    const std::size_t full = n + m - 1;
    std::vector<double> xa(full, 0.0), ha(full, 0.0);
    std::copy(x.begin(), x.end(), xa.begin());
    std::copy(taps.begin(), taps.end(), ha.begin());
    auto X = fft::rfft(xa);
    auto H = fft::rfft(ha);
    for (std::size_t i = 0; i < X.size(); ++i) X[i] *= H[i];
    auto y = fft::irfft(X, full);
    const std::size_t delay = (m - 1) / 2;
    return std::vector<double>(y.begin() + delay, y.begin() + delay + n);
}

Waveform upsample_impulses(const SymbolSequence& symbols, int sps) {
    if (sps < 1) throw ConfigError("samples per symbol must be >= 1");
    Waveform w;
    w.sample_rate = symbols.symbol_rate * sps;
    w.samples.assign(symbols.size() * sps, 0.0);
    for (std::size_t i = 0; i < symbols.size(); ++i) w.samples[i * sps] = symbols.amplitudes[i];
    return w;
}

Waveform resample(const Waveform& w, double target_rate) {
    if (target_rate <= 0.0) throw ConfigError("resample target rate must be positive");
    const std::size_t n = w.samples.size();
    if (n == 0) return Waveform{{}, target_rate};
    if (target_rate == w.sample_rate) {
        Waveform out = w;
        return out;
    }
    const std::size_t m =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * target_rate / w.sample_rate));
    if (m == 0) throw ConfigError("resample output would be empty");

    auto X = fft::rfft(w.samples);
    std::vector<std::complex<double>> Y(m / 2 + 1, std::complex<double>(0.0, 0.0));
    const std::size_t keep = std::min(X.size(), Y.size());
    for (std::size_t i = 0; i < keep; ++i) Y[i] = X[i];
    if (m < n && m % 2 == 0 && m / 2 < X.size()) {
        // new Nyquist bin must be real
        Y[m / 2] = std::complex<double>(X[m / 2].real(), 0.0);
    }
    if (m > n && n % 2 == 0) {
        // old Nyquist energy now has a distinct conjugate image
        Y[n / 2] *= 0.5;
    }
    const double gain = static_cast<double>(m) / static_cast<double>(n);
    for (auto& v : Y) v *= gain;
    Waveform out;
    out.sample_rate = target_rate;
    out.samples = fft::irfft(Y, m);
    return out;
}

SyncResult synchronize(std::span<const double> rx, const SymbolSequence& training,
                       int stride, long window_symbols) {
    const long t_len = static_cast<long>(training.size());
    if (t_len < 64) throw ConfigError("synchronize needs at least 64 training symbols");
    if (stride < 1) throw ConfigError("synchronize stride must be >= 1");
    if (window_symbols <= 0) window_symbols = t_len;
    const long n = static_cast<long>(rx.size());
    const long w = window_symbols * stride;

    const long min_overlap = std::max<long>(64, t_len / 2);
    double best = -1.0;
    long best_lag = 0;
    for (long lag = -w; lag <= w; ++lag) {
        double dot = 0.0, et = 0.0, er = 0.0;
        long count = 0;
        for (long i = 0; i < t_len; ++i) {
            const long j = lag + i * stride;
            if (j < 0 || j >= n) continue;
            const double tv = training.amplitudes[static_cast<std::size_t>(i)];
            const double rv = rx[static_cast<std::size_t>(j)];
            dot += tv * rv;
            et += tv * tv;
            er += rv * rv;
            ++count;
        }
        if (count < min_overlap || et <= 0.0 || er <= 0.0) continue;
        const double corr = std::abs(dot) / std::sqrt(et * er);
        if (corr > best) {
            best = corr;
            best_lag = lag;
        }
    }
    if (best < 0.2)
        throw SyncError("synchronization failed: peak correlation " + std::to_string(best) +
                        " below 0.2");
    return SyncResult{best_lag, best};
}

void normalize_rms(std::vector<double>& x) {
    if (x.empty()) return;
    double p = 0.0;
    for (double v : x) p += v * v;
    p /= static_cast<double>(x.size());
    if (p <= 0.0) return;
    const double s = 1.0 / std::sqrt(p);
    for (double& v : x) v *= s;
}

} // namespace imdd
