#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imdd/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace imdd;

namespace {

// amplitude of a tone at frequency f via direct projection (integer cycles assumed)
double tone_amplitude(const std::vector<double>& x, double fs, double f) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ph = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
        re += x[i] * std::cos(ph);
        im -= x[i] * std::sin(ph);
    }
    return 2.0 * std::hypot(re, im) / static_cast<double>(x.size());
}

} // namespace

TEST_CASE("prbs7 balance and periodicity") {
    const auto bits = generate_prbs(7, 127, 1);
    int ones = 0;
    for (auto b : bits) ones += b;
    CHECK(ones == 64);
    CHECK(127 - ones == 63);

    const auto twice = generate_prbs(7, 254, 1);
    for (int i = 0; i < 127; ++i) CHECK(twice[i] == twice[i + 127]);
}

TEST_CASE("prbs determinism and seed sensitivity") {
    CHECK(generate_prbs(15, 1000, 42) == generate_prbs(15, 1000, 42));
    CHECK(generate_prbs(15, 1000, 42) != generate_prbs(15, 1000, 43));
}

TEST_CASE("prbs9 m-sequence balance over one period") {
    const auto bits = generate_prbs(9, 511, 7);
    int ones = 0;
    for (auto b : bits) ones += b;
    CHECK(ones == 256);
}

TEST_CASE("prbs rejects unsupported order") {
    CHECK_THROWS_AS(generate_prbs(8, 10, 1), ConfigError);
    CHECK_THROWS_AS(generate_prbs(7, 0, 1), ConfigError);
}

TEST_CASE("map_pam2 definition") {
    const auto s = map_pam2({0, 1, 1, 0});
    CHECK(s.amplitudes == std::vector<double>{-1.0, 1.0, 1.0, -1.0});
    CHECK(map_pam2({}).size() == 0);
    const auto ones = map_pam2(std::vector<std::uint8_t>(5, 1));
    for (double a : ones.amplitudes) CHECK(a == 1.0);
}

TEST_CASE("map_pam2 round trip") {
    std::mt19937_64 rng(1);
    std::vector<std::uint8_t> bits(512);
    for (auto& b : bits) b = rng() & 1;
    const auto s = map_pam2(bits);
    CHECK(s.source_bits == bits);
    for (std::size_t i = 0; i < bits.size(); ++i)
        CHECK(s.amplitudes[i] == 2.0 * bits[i] - 1.0);
}

TEST_CASE("rrc taps are symmetric and unit energy") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> roff(0.0, 1.0);
    std::uniform_int_distribution<int> spans(4, 40);
    std::uniform_real_distribution<double> sps(1.25, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = design_rrc(roff(rng), spans(rng), sps(rng));
        const std::size_t n = f.taps.size();
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(f.taps[i] - f.taps[n - 1 - i]) < 1e-12);
            energy += f.taps[i] * f.taps[i];
        }
        CHECK(std::abs(energy - 1.0) < 1e-12);
    }
}

TEST_CASE("rrc cascaded with itself is a Nyquist pulse") {
    // The tiny 0.02 roll-off decays like a sinc, so the 1e-3 ISI floor needs a
    // long filter; moderate roll-offs reach it by span 16.
    auto max_isi = [](const RrcFilter& f) {
        const std::size_t n = f.taps.size();
        std::vector<double> rc(2 * n - 1, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rc[i + j] += f.taps[i] * f.taps[j];
        const std::size_t center = n - 1;
        const double peak = rc[center];
        REQUIRE(peak > 0.0);
        double worst = 0.0;
        for (int k = 1; 2 * k < static_cast<int>(n); ++k)
            worst = std::max(worst, std::abs(rc[center + 2 * k]) / peak);
        return worst;
    };
    CHECK(max_isi(design_rrc(0.02, 128, 2.0)) < 1e-3);
    CHECK(max_isi(design_rrc(0.25, 16, 2.0)) < 1e-3);
}

TEST_CASE("larger roll-off decays faster in time") {
    const auto slow = design_rrc(0.02, 32, 2.0);
    const auto fast = design_rrc(1.0, 32, 2.0);
    auto tail_energy = [](const RrcFilter& f) {
        const long center = static_cast<long>(f.taps.size()) / 2;
        const long cut = static_cast<long>(4 * f.samples_per_symbol);
        double e = 0.0;
        for (long i = 0; i < static_cast<long>(f.taps.size()); ++i)
            if (std::abs(i - center) > cut) e += f.taps[i] * f.taps[i];
        return e;
    };
    CHECK(tail_energy(fast) < tail_energy(slow));
}

TEST_CASE("rrc rejects invalid parameters") {
    CHECK_THROWS_AS(design_rrc(-0.1, 32, 2.0), ConfigError);
    CHECK_THROWS_AS(design_rrc(1.1, 32, 2.0), ConfigError);
    CHECK_THROWS_AS(design_rrc(0.1, 3, 2.0), ConfigError);
    CHECK_THROWS_AS(design_rrc(0.1, 32, 1.0), ConfigError);
}

TEST_CASE("resample preserves constants and identity") {
    Waveform w{std::vector<double>(1000, 3.25), 90e9};
    const auto down = resample(w, 80e9);
    CHECK(down.sample_rate == 80e9);
    for (double v : down.samples) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));

    const auto same = resample(w, 90e9);
    REQUIRE(same.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(std::abs(same.samples[i] - w.samples[i]) < 1e-9);
}

TEST_CASE("resample keeps a 10 GHz tone within 0.1 dB across 90 -> 80 GSa/s") {
    const double fs = 90e9, f = 10e9;
    const std::size_t n = 9000;
    Waveform w;
    w.sample_rate = fs;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
    const auto out = resample(w, 80e9);
    const double a_in = tone_amplitude(w.samples, fs, f);
    const double a_out = tone_amplitude(out.samples, 80e9, f);
    CHECK(std::abs(20.0 * std::log10(a_out / a_in)) < 0.1);
}

TEST_CASE("resample is linear") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 900;
    Waveform x{std::vector<double>(n), 90e9}, y{std::vector<double>(n), 90e9};
    for (std::size_t i = 0; i < n; ++i) {
        x.samples[i] = g(rng);
        y.samples[i] = g(rng);
    }
    const double a = 2.5, b = -0.75;
    Waveform mix{std::vector<double>(n), 90e9};
    for (std::size_t i = 0; i < n; ++i) mix.samples[i] = a * x.samples[i] + b * y.samples[i];
    const auto rm = resample(mix, 60e9);
    const auto rx = resample(x, 60e9);
    const auto ry = resample(y, 60e9);
    for (std::size_t i = 0; i < rm.samples.size(); ++i)
        CHECK(std::abs(rm.samples[i] - (a * rx.samples[i] + b * ry.samples[i])) < 1e-9);
}

TEST_CASE("synchronize finds constructed delays") {
    std::mt19937_64 rng(4);
    std::vector<std::uint8_t> bits(256);
    for (auto& b : bits) b = rng() & 1;
    const auto train = map_pam2(bits);

    for (long shift : {0L, 1L, 17L, 111L, 255L}) {
        std::vector<double> rx(static_cast<std::size_t>(shift), 0.0);
        rx.insert(rx.end(), train.amplitudes.begin(), train.amplitudes.end());
        rx.resize(rx.size() + 32, 0.0);
        const auto r = synchronize(rx, train);
        CHECK(r.offset == shift);
        CHECK(r.peak == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("synchronize fails on unrelated noise") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::uint8_t> bits(1024);
    for (auto& b : bits) b = rng() & 1;
    const auto train = map_pam2(bits);
    std::vector<double> rx(4096);
    for (auto& v : rx) v = g(rng);
    CHECK_THROWS_AS(synchronize(rx, train), SyncError);
}

TEST_CASE("synchronize needs enough training") {
    const auto train = map_pam2(std::vector<std::uint8_t>(32, 1));
    std::vector<double> rx(128, 1.0);
    CHECK_THROWS_AS(synchronize(rx, train), ConfigError);
}
