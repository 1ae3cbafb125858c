#pragma once

#include "imdd/types.hpp"

#include <span>
#include <vector>

namespace imdd {

struct MlseModel {
    std::vector<double> isi_taps; // length memory+1, isi_taps[0] != 0
    int memory = 0;               // P

    void validate() const;
};

struct IsiEstimate {
    MlseModel model;
    double residual_rms = 0.0;
};

// Least squares fit of soft_k ~ sum_i w_i * known_{k-i} over the training
// window. Requires known.size() >= 10*(P+1).
IsiEstimate estimate_isi_taps(std::span<const double> soft, std::span<const double> known,
                              int memory);

// Metric D(s,t) = sum_k (s_k - sum_i w_i t_{k-i})^2 with t_j = 0 for j < 0.
double sequence_metric(std::span<const double> soft, const MlseModel& model,
                       std::span<const double> symbols);

struct MlseOptions {
    int max_memory = 20;     // refuse larger state spaces
    int traceback = 0;       // survivor window; <= 0 picks max(64, 6*(P+1))
};

// Viterbi search over the 2^P-state trellis. Exact cost ties resolve toward
// the path holding +1 at the earliest differing position (within the survivor
// window; full history when the input fits in one window).
SymbolSequence mlse_viterbi(std::span<const double> soft, const MlseModel& model,
                            const MlseOptions& opts = {});

// Exhaustive minimizer over all +/-1 sequences; same metric and tie rule.
// Refuses soft.size() > 16.
SymbolSequence brute_force_mlse(std::span<const double> soft, const MlseModel& model);

} // namespace imdd
