#include "imdd/equalizer.hpp"

#include <algorithm>
#include <cmath>

namespace imdd {

namespace {

constexpr double kDivergenceLimit = 1e6;

void check_taps(const std::vector<double>& taps, std::size_t step) {
    for (double t : taps) {
        if (!std::isfinite(t) || std::abs(t) > kDivergenceLimit) throw DivergenceError(step);
    }
}

int require_odd(int n, const char* what) {
    if (n < 0 || (n != 0 && n % 2 == 0))
        throw ConfigError(std::string(what) + " tap count must be odd (or 0 to disable)");
    return n;
}

} // namespace

PnleState PnleState::make(int n1, int n2, int n3, double mu1, double mu2, double mu3) {
    require_odd(n1, "PNLE linear");
    require_odd(n2, "PNLE square");
    require_odd(n3, "PNLE cubic");
    if (n1 < 1) throw ConfigError("PNLE needs at least one linear tap");
    PnleState st;
    st.w1.assign(n1, 0.0);
    st.w1[n1 / 2] = 1.0;
    st.w2.assign(n2, 0.0);
    st.w3.assign(n3, 0.0);
    st.mu1 = mu1;
    st.mu2 = mu2;
    st.mu3 = mu3;
    return st;
}

std::vector<double> pnle_equalize(std::span<const double> x, PnleState& state,
                                  std::span<const double> training, std::size_t training_start) {
    const long n = static_cast<long>(x.size());
    const long h1 = static_cast<long>(state.w1.size()) / 2;
    const long h2 = state.w2.empty() ? 0 : static_cast<long>(state.w2.size()) / 2;
    const long h3 = state.w3.empty() ? 0 : static_cast<long>(state.w3.size()) / 2;
    const long t0 = static_cast<long>(training_start);
    const long t1 = t0 + static_cast<long>(training.size());

    auto at = [&](long i) { return (i >= 0 && i < n) ? x[static_cast<std::size_t>(i)] : 0.0; };

    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (long k = 0; k < n; ++k) {
        double acc = 0.0;
        for (long i = -h1; i <= h1; ++i) acc += state.w1[static_cast<std::size_t>(i + h1)] * at(k + i);
        for (long i = -h2; i <= h2 && !state.w2.empty(); ++i) {
            const double v = at(k + i);
            acc += state.w2[static_cast<std::size_t>(i + h2)] * v * v;
        }
        for (long i = -h3; i <= h3 && !state.w3.empty(); ++i) {
            const double v = at(k + i);
            acc += state.w3[static_cast<std::size_t>(i + h3)] * v * v * v;
        }
        y[static_cast<std::size_t>(k)] = acc;

        const bool in_training = k >= t0 && k < t1;
        if (in_training || state.decision_directed_after) {
            const double target = in_training
                                      ? training[static_cast<std::size_t>(k - t0)]
                                      : (acc >= 0.0 ? 1.0 : -1.0);
            const double e = target - acc;
            for (long i = -h1; i <= h1; ++i)
                state.w1[static_cast<std::size_t>(i + h1)] += state.mu1 * e * at(k + i);
            for (long i = -h2; i <= h2 && !state.w2.empty(); ++i) {
                const double v = at(k + i);
                state.w2[static_cast<std::size_t>(i + h2)] += state.mu2 * e * v * v;
            }
            for (long i = -h3; i <= h3 && !state.w3.empty(); ++i) {
                const double v = at(k + i);
                state.w3[static_cast<std::size_t>(i + h3)] += state.mu3 * e * v * v * v;
            }
            check_taps(state.w1, state.step_index);
            check_taps(state.w2, state.step_index);
            check_taps(state.w3, state.step_index);
        }
        ++state.step_index;
    }
    return y;
}

double reliability(double s, double s_hat) {
    if (s_hat != 1.0 && s_hat != -1.0) throw DomainError("hard decision must be -1 or +1");
    if (std::abs(s) > 1.0) return 1.0;
    return std::max(0.0, 1.0 - std::abs(s - s_hat));
}

double weighted_feedback(double s, double s_hat, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) throw DomainError("gamma must lie in [0, 1]");
    return gamma * s_hat + (1.0 - gamma) * s;
}

EqualizerState EqualizerState::make(int ff_taps, int fb_taps, DfeMode mode, double mu1, double mu2) {
    require_odd(ff_taps, "DFE feedforward");
    if (ff_taps < 1) throw ConfigError("DFE needs at least one feedforward tap");
    if (fb_taps < 0) throw ConfigError("DFE feedback tap count must be >= 0");
    EqualizerState st;
    st.omega.assign(ff_taps, 0.0);
    st.omega[ff_taps / 2] = 1.0;
    st.rho.assign(fb_taps, 0.0);
    st.history.assign(fb_taps, 0.0);
    st.mode = mode;
    st.mu1 = mu1;
    st.mu2 = mu2;
    return st;
}

WdfeStep dfe_step(std::span<const double> x_window, EqualizerState& state,
                  std::optional<double> train_symbol) {
    if (x_window.size() != state.omega.size())
        throw AlignmentError("dfe_step window must match the feedforward length");

    const std::size_t n_ff = state.omega.size();
    const std::size_t n_fb = state.rho.size();

    WdfeStep out;
    double s = 0.0;
    for (std::size_t i = 0; i < n_ff; ++i) s += state.omega[i] * x_window[i];
    for (std::size_t i = 0; i < n_fb; ++i) s += state.rho[i] * state.history[i];
    out.s = s;
    out.s_hat = s >= 0.0 ? 1.0 : -1.0; // tie at 0 resolves to +1

    // Training substitutes the known symbol for the hard decision everywhere.
    const bool training = train_symbol.has_value();
    const double ref = training ? *train_symbol : out.s_hat;
    out.delta_d = std::abs(s - ref);

    double gamma;
    if (state.mode == DfeMode::classical) {
        gamma = 1.0;
    } else if (state.gamma_override) {
        gamma = *state.gamma_override;
    } else {
        gamma = std::abs(s) > 1.0 ? 1.0 : std::max(0.0, 1.0 - out.delta_d);
    }
    out.gamma = gamma;
    out.e = ref - s;

    const double f_gamma = state.mode == DfeMode::classical ? 1.0 : state.shaping(gamma);
    out.s_tilde = f_gamma * ref + (1.0 - f_gamma) * s;

    if (!training && (f_gamma > 0.0 || gamma > 0.0)) ++state.hard_feedback_refs;

    if (gamma > 0.0 && out.e != 0.0) {
        const double g1 = state.mu1 * gamma * out.e;
        for (std::size_t i = 0; i < n_ff; ++i) state.omega[i] += g1 * x_window[i];
        const double g2 = state.mu2 * gamma * out.e;
        for (std::size_t i = 0; i < n_fb; ++i) state.rho[i] += g2 * state.history[i];
        check_taps(state.omega, state.step_index);
        check_taps(state.rho, state.step_index);
    }

    if (n_fb > 0) {
        for (std::size_t i = n_fb - 1; i > 0; --i) state.history[i] = state.history[i - 1];
        state.history[0] = out.s_tilde;
    }
    if (!training && state.mu_decay != 1.0) {
        state.mu1 *= state.mu_decay;
        state.mu2 *= state.mu_decay;
    }
    ++state.step_index;
    return out;
}

FrameEqOutput equalize_frame(std::span<const double> x, EqualizerState& state,
                             std::span<const double> training, std::size_t training_start) {
    const long n = static_cast<long>(x.size());
    const long half = static_cast<long>(state.omega.size()) / 2;
    const long t0 = static_cast<long>(training_start);
    const long t1 = t0 + static_cast<long>(training.size());

    FrameEqOutput out;
    out.soft.resize(static_cast<std::size_t>(n));
    out.hard.resize(static_cast<std::size_t>(n));

    std::vector<double> window(state.omega.size());
    for (long k = 0; k < n; ++k) {
        for (long i = -half; i <= half; ++i) {
            const long j = k + i;
            window[static_cast<std::size_t>(i + half)] =
                (j >= 0 && j < n) ? x[static_cast<std::size_t>(j)] : 0.0;
        }
        std::optional<double> train;
        if (k >= t0 && k < t1) train = training[static_cast<std::size_t>(k - t0)];
        const WdfeStep step = dfe_step(window, state, train);
        out.soft[static_cast<std::size_t>(k)] = step.s;
        out.hard[static_cast<std::size_t>(k)] = step.s_hat;
    }
    return out;
}

std::vector<double> post_filter(std::span<const double> y, double alpha) {
    std::vector<double> z(y.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        z[k] = y[k] + alpha * prev;
        prev = y[k];
    }
    return z;
}

} // namespace imdd
