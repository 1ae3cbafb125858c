#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace imdd {

// Uniformly sampled real-valued signal.
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0; // samples/second

    std::size_t size() const { return samples.size(); }
};

// PAM2 frame: amplitudes in {-1,+1} paired with the bits that produced them.
struct SymbolSequence {
    std::vector<double> amplitudes;   // each exactly -1 or +1
    std::vector<std::uint8_t> source_bits;
    double symbol_rate = 0.0;

    std::size_t size() const { return amplitudes.size(); }

    static SymbolSequence from_bits(const std::vector<std::uint8_t>& bits, double symbol_rate = 0.0);
    static SymbolSequence from_amplitudes(const std::vector<double>& amps, double symbol_rate = 0.0);
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(std::size_t step)
        : std::runtime_error("equalizer taps diverged at step " + std::to_string(step)), step(step) {}
    std::size_t step;
};

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64 step; used to derive independent sub-stream seeds from one run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace imdd
