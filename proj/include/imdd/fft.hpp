#pragma once

#include <complex>
#include <span>
#include <vector>

namespace imdd::fft {

// Forward real FFT, returns n/2+1 bins (unnormalized).
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft; n is the time-domain length. Output scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spec, std::size_t n);

// Complex FFT. inverse=true applies 1/n scaling.
std::vector<std::complex<double>> cfft(std::span<const std::complex<double>> x, bool inverse);

} // namespace imdd::fft
