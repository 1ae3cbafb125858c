#pragma once

#include "imdd/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace imdd {

// Maximal-length PRBS via Fibonacci LFSR. Supported orders: 7, 9, 15, 23, 31.
std::vector<std::uint8_t> generate_prbs(int order, std::size_t length, std::uint64_t seed);

// bit 0 -> -1, bit 1 -> +1
SymbolSequence map_pam2(const std::vector<std::uint8_t>& bits, double symbol_rate = 0.0);

struct RrcFilter {
    std::vector<double> taps;    // even-symmetric, unit energy
    double roll_off = 0.0;
    int span = 0;                // symbols covered
    double samples_per_symbol = 0.0;
};

RrcFilter design_rrc(double roll_off, int span, double samples_per_symbol);

// Linear convolution trimmed to input length, aligned on the filter center
// (taps.size() must be odd).
std::vector<double> fir_same(std::span<const double> x, std::span<const double> taps);

// Zero-stuffed impulse train at `sps` samples per symbol.
Waveform upsample_impulses(const SymbolSequence& symbols, int sps);

// FFT-based band-limited rate conversion. Output length = llround(n*target/source).
Waveform resample(const Waveform& w, double target_rate);

struct SyncResult {
    long offset = 0;       // sample lag of the training sequence inside rx
    double peak = 0.0;     // normalized correlation at the peak
};

// Correlates rx against the training symbols placed every `stride` samples.
// Searches lags in [-window_symbols*stride, +window_symbols*stride];
// window_symbols <= 0 selects the default window of one training length.
// Peak below 0.2 raises SyncError.
SyncResult synchronize(std::span<const double> rx, const SymbolSequence& training,
                       int stride = 1, long window_symbols = -1);

// Scales to unit RMS (no-op on all-zero input).
void normalize_rms(std::vector<double>& x);

} // namespace imdd
