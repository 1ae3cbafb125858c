#pragma once

#include "imdd/types.hpp"

#include <cstdint>
#include <vector>

namespace imdd {

struct BurstConfig {
    double rate = 0.0;       // expected bursts per 1e6 symbols
    int duration = 10;       // burst length in symbols
    double amplitude = 1.0;  // noise sigma multiplier inside a burst
    std::uint64_t seed = 1;
};

struct ChannelConfig {
    double beta2 = -2.17e-26;        // group velocity dispersion, s^2/m
    double length = 18.8e3;          // fiber length, m
    std::vector<double> device_bandwidths = {16e9, 31e9, 36e9}; // 3 dB cutoffs, Hz
    double rop_dbm = -4.0;           // received optical power
    double rop_ref_dbm = -4.0;       // ROP at which noise_ref applies
    double noise_ref = 0.0;          // noise sigma at rop_ref_dbm
    BurstConfig burst;

    void validate() const;
};

// Post-detection noise sigma at the configured ROP.
double noise_sigma(const ChannelConfig& cfg);

// H(f) = cos(2 pi^2 beta2 L f^2); the small-signal power transfer of the
// dispersion-uncompensated IM/DD link.
double cd_frequency_response(double f_hz, const ChannelConfig& cfg);

// Positive roots of H(f) below f_max, ordered. Bisection on a fine scan grid.
std::vector<double> cd_null_frequencies(const ChannelConfig& cfg, double f_max_hz,
                                        double rel_tol = 1e-9);

// Frequency-domain filtering by H(f); real in, real out.
Waveform apply_smallsignal_channel(const Waveform& w, const ChannelConfig& cfg);

struct FullFieldResult {
    Waveform out;
    long clipped_samples = 0;
};

// Square-law detected optical field sqrt(1 + m*x~) through the dispersive
// all-pass exp(-j*(beta2/2)*w^2*L). Output is mean-removed and scaled by 1/m
// so that the small-m transfer matches cd_frequency_response.
FullFieldResult apply_fullfield_channel(const Waveform& w, const ChannelConfig& cfg,
                                        double modulation_index);

// 5th-order Bessel low-pass, -3 dB at cutoff_hz, applied in the frequency domain.
Waveform lowpass_device(const Waveform& w, double cutoff_hz);

// AWGN with sigma = noise_sigma(cfg); deterministic per seed.
Waveform add_noise(const Waveform& w, const ChannelConfig& cfg, std::uint64_t seed);

struct BurstEvent {
    long long start_symbol = 0;
    int duration_symbols = 0;
};

struct BurstResult {
    Waveform out;
    std::vector<BurstEvent> events;
};

// Poisson-placed noise-inflation intervals. Inside a burst the total noise
// sigma becomes amplitude * noise_sigma(cfg), assuming add_noise already ran:
// the extra sigma added here is noise_sigma*sqrt(amplitude^2 - 1).
BurstResult inject_bursts(const Waveform& w, const ChannelConfig& cfg, double symbol_rate);

} // namespace imdd
