#pragma once

#include "imdd/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace imdd {

// ---------------------------------------------------------------------------
// Polynomial nonlinear equalizer: per-order tap vectors on x, x^2, x^3.

struct PnleState {
    std::vector<double> w1, w2, w3; // odd lengths, center-referenced; empty disables an order
    double mu1 = 1e-3, mu2 = 1e-4, mu3 = 1e-5;
    bool decision_directed_after = false; // adapt after training instead of freezing
    std::size_t step_index = 0;

    static PnleState make(int n1, int n2, int n3,
                          double mu1 = 1e-3, double mu2 = 1e-4, double mu3 = 1e-5);
};

// One output sample per input sample (1 sample/symbol stream). Taps adapt by
// LMS over the known region [training_start, training_start + training.size()).
std::vector<double> pnle_equalize(std::span<const double> x, PnleState& state,
                                  std::span<const double> training = {},
                                  std::size_t training_start = 0);

// ---------------------------------------------------------------------------
// DFE / weighted DFE.

enum class DfeMode { classical, weighted };

// Monotone shaping of the reliability before it weights the feedback mix.
struct FeedbackShaping {
    enum class Kind { identity, threshold } kind = Kind::identity;
    double threshold = 0.5; // used by Kind::threshold: f(g) = g >= threshold ? 1 : 0
    double operator()(double gamma) const {
        return kind == Kind::identity ? gamma : (gamma >= threshold ? 1.0 : 0.0);
    }
};

// gamma = 1 - |s - s_hat| clamped to [0,1] for |s| <= 1; gamma = 1 for |s| > 1.
double reliability(double s, double s_hat);

// s~ = gamma*s_hat + (1 - gamma)*s
double weighted_feedback(double s, double s_hat, double gamma);

struct WdfeStep {
    double s = 0.0;       // equalizer soft output
    double s_hat = 0.0;   // hard decision
    double delta_d = 0.0; // |s - s_hat|
    double gamma = 0.0;   // reliability
    double s_tilde = 0.0; // feedback value
    double e = 0.0;       // error driving the LMS update
};

struct EqualizerState {
    std::vector<double> omega;          // feedforward taps, odd length, center-referenced
    std::vector<double> rho;            // feedback taps
    std::vector<double> history;        // past feedback values, history[0] most recent
    double mu1 = 1e-3, mu2 = 1e-3;
    double mu_decay = 1.0;              // per-step geometric factor applied after training
    DfeMode mode = DfeMode::weighted;
    FeedbackShaping shaping;
    std::optional<double> gamma_override; // test/diagnostic hook
    std::size_t step_index = 0;
    long long hard_feedback_refs = 0;   // counts hard decisions that actually influenced
                                        // the feedback value or a tap update

    static EqualizerState make(int ff_taps, int fb_taps, DfeMode mode,
                               double mu1 = 1e-3, double mu2 = 1e-3);
};

// One symbol step. x_window.size() must equal omega.size(). A training symbol,
// when given, replaces the hard decision in the error, the feedback mix and the
// reliability reference.
WdfeStep dfe_step(std::span<const double> x_window, EqualizerState& state,
                  std::optional<double> train_symbol = std::nullopt);

struct FrameEqOutput {
    std::vector<double> soft;
    std::vector<double> hard; // +/-1 decisions
};

// Runs dfe_step across the stream: training-directed over
// [training_start, training_start + training.size()), decision-directed
// elsewhere. Edges are zero-padded.
FrameEqOutput equalize_frame(std::span<const double> x, EqualizerState& state,
                             std::span<const double> training, std::size_t training_start);

// z_k = y_k + alpha*y_{k-1}
std::vector<double> post_filter(std::span<const double> y, double alpha);

} // namespace imdd
