#include "imdd/metrics.hpp"

#include "imdd/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace imdd {

namespace {

// Inverse standard normal CDF, Acklam's rational approximation refined with
// one Halley step against std::erfc. Good to ~1e-15 on (0, 0.5].
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Halley refinement: Phi(x) - p = 0.5*erfc(-x/sqrt(2)) - p
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::numbers::sqrt2 * std::sqrt(std::numbers::pi) *
                     std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

} // namespace

BerResult count_errors(std::span<const double> decided, std::span<const double> truth) {
    if (decided.size() != truth.size())
        throw AlignmentError("count_errors requires equal-length aligned sequences");
    BerResult r;
    r.bits_compared = static_cast<long long>(decided.size());
    for (std::size_t i = 0; i < decided.size(); ++i) {
        if ((decided[i] >= 0.0) != (truth[i] >= 0.0)) ++r.bit_errors;
    }
    r.ber = r.bits_compared ? static_cast<double>(r.bit_errors) / r.bits_compared : 0.0;
    r.q_db = (r.ber > 0.0 && r.ber < 0.5) ? q_from_ber(r.ber)
                                          : std::numeric_limits<double>::quiet_NaN();
    return r;
}

BerResult count_errors(const SymbolSequence& decided, const SymbolSequence& truth) {
    return count_errors(std::span<const double>(decided.amplitudes),
                        std::span<const double>(truth.amplitudes));
}

double q_from_ber(double ber) {
    if (!(ber > 0.0 && ber < 0.5)) throw DomainError("q_from_ber requires ber in (0, 0.5)");
    const double q_lin = -inverse_normal_cdf(ber);
    return 20.0 * std::log10(q_lin);
}

double ber_from_q_db(double q_db) {
    const double q_lin = std::pow(10.0, q_db / 20.0);
    return 0.5 * std::erfc(q_lin / std::numbers::sqrt2);
}

int RunLengthHistogram::max_run() const {
    return counts.empty() ? 0 : counts.rbegin()->first;
}

double RunLengthHistogram::single_error_fraction() const {
    if (total_runs == 0) return 0.0;
    const auto it = counts.find(1);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / total_runs;
}

std::vector<std::pair<int, double>> RunLengthHistogram::pdf() const {
    std::vector<std::pair<int, double>> out;
    out.reserve(counts.size());
    for (const auto& [len, cnt] : counts)
        out.emplace_back(len, total_runs ? static_cast<double>(cnt) / total_runs : 0.0);
    return out;
}

std::vector<std::pair<int, double>> RunLengthHistogram::cdf() const {
    auto out = pdf();
    double acc = 0.0;
    for (auto& [len, p] : out) {
        acc += p;
        p = acc;
    }
    return out;
}

RunLengthHistogram& RunLengthHistogram::operator+=(const RunLengthHistogram& other) {
    for (const auto& [len, cnt] : other.counts) counts[len] += cnt;
    total_runs += other.total_runs;
    return *this;
}

RunLengthHistogram run_length_stats(std::span<const std::uint8_t> error_mask) {
    RunLengthHistogram h;
    int run = 0;
    for (std::uint8_t m : error_mask) {
        if (m) {
            ++run;
        } else if (run > 0) {
            ++h.counts[run];
            ++h.total_runs;
            run = 0;
        }
    }
    if (run > 0) {
        ++h.counts[run];
        ++h.total_runs;
    }
    return h;
}

WelchPsd welch_psd(const Waveform& w, std::size_t segment, double overlap) {
    if (segment == 0 || segment > w.samples.size())
        throw ConfigError("welch segment must lie in [1, signal length]");
    if (overlap < 0.0 || overlap >= 1.0) throw ConfigError("welch overlap must lie in [0, 1)");

    std::vector<double> window(segment);
    double win_power = 0.0;
    for (std::size_t i = 0; i < segment; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / segment);
        win_power += window[i] * window[i];
    }
    const std::size_t step =
        std::max<std::size_t>(1, segment - static_cast<std::size_t>(std::llround(overlap * segment)));

    WelchPsd out;
    out.freq_hz.resize(segment / 2 + 1);
    out.psd.assign(segment / 2 + 1, 0.0);
    const double df = w.sample_rate / static_cast<double>(segment);
    for (std::size_t i = 0; i < out.freq_hz.size(); ++i) out.freq_hz[i] = df * i;

    std::vector<double> seg(segment);
    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + segment <= w.samples.size(); start += step) {
        for (std::size_t i = 0; i < segment; ++i) seg[i] = w.samples[start + i] * window[i];
        const auto spec = fft::rfft(seg);
        for (std::size_t k = 0; k < spec.size(); ++k) {
            double p = std::norm(spec[k]) / (win_power * w.sample_rate);
            if (k != 0 && !(segment % 2 == 0 && k == segment / 2)) p *= 2.0; // one-sided
            out.psd[k] += p;
        }
        ++n_segments;
    }
    for (double& p : out.psd) p /= static_cast<double>(n_segments);
    return out;
}

Spectrum welch_spectrum(const Waveform& w, std::size_t segment, double overlap) {
    const WelchPsd psd = welch_psd(w, segment, overlap);
    Spectrum s;
    s.freq_hz = psd.freq_hz;
    s.power_db.resize(psd.psd.size());
    double ref = psd.psd.empty() ? 0.0 : psd.psd[0];
    if (ref <= 0.0) {
        for (double p : psd.psd) ref = std::max(ref, p);
    }
    const double floor_db = -300.0;
    for (std::size_t i = 0; i < psd.psd.size(); ++i) {
        s.power_db[i] = (psd.psd[i] > 0.0 && ref > 0.0)
                            ? 10.0 * std::log10(psd.psd[i] / ref)
                            : floor_db;
    }
    return s;
}

} // namespace imdd
