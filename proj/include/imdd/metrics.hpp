#pragma once

#include "imdd/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace imdd {

struct BerResult {
    long long bit_errors = 0;
    long long bits_compared = 0;
    double ber = 0.0;
    double q_db = 0.0; // NaN when ber is outside (0, 0.5)
};

BerResult count_errors(const SymbolSequence& decided, const SymbolSequence& truth);
BerResult count_errors(std::span<const double> decided, std::span<const double> truth);

// Q_linear = sqrt(2)*erfcinv(2*ber); returned in dB (20*log10). Domain (0, 0.5).
double q_from_ber(double ber);

// Forward map: ber = 0.5*erfc(10^(q_db/20)/sqrt(2)).
double ber_from_q_db(double q_db);

// Pre-FEC threshold for 7% overhead hard-decision FEC.
inline constexpr double kHdFecBerLimit = 3.8e-3;

struct RunLengthHistogram {
    std::map<int, long long> counts; // run length -> occurrences
    long long total_runs = 0;

    int max_run() const;
    double single_error_fraction() const; // counts[1]/total_runs, 0 when empty
    std::vector<std::pair<int, double>> pdf() const;
    std::vector<std::pair<int, double>> cdf() const;

    RunLengthHistogram& operator+=(const RunLengthHistogram& other);
    bool operator==(const RunLengthHistogram& other) const = default;
};

// Maximal runs of consecutive errors (mask value != 0 means error).
RunLengthHistogram run_length_stats(std::span<const std::uint8_t> error_mask);

struct Spectrum {
    std::vector<double> freq_hz;
    std::vector<double> power_db; // normalized to the DC bin
};

// Averaged Hann-windowed periodogram; one-sided linear PSD in 1/Hz units.
struct WelchPsd {
    std::vector<double> freq_hz;
    std::vector<double> psd;
};

WelchPsd welch_psd(const Waveform& w, std::size_t segment, double overlap);
Spectrum welch_spectrum(const Waveform& w, std::size_t segment, double overlap);

} // namespace imdd
