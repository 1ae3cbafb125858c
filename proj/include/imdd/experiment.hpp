#pragma once

#include "imdd/config.hpp"
#include "imdd/metrics.hpp"
#include "imdd/types.hpp"

#include <string>
#include <vector>

namespace imdd {

struct StageSpectrum {
    std::string stage;
    Spectrum spectrum;
};

struct RunResult {
    int sweep_index = 0;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;

    BerResult dfe;  // after the DFE/WDFE stage
    BerResult mlse; // after the MLSE stage
    RunLengthHistogram rl_dfe, rl_mlse;
    double runtime_s = 0.0;
    std::vector<StageSpectrum> spectra;
};

// One transmit -> channel -> receive chain execution. Throws on stage errors.
RunResult execute_run(const ExperimentConfig& cfg, int sweep_index, double sweep_value,
                      std::uint64_t seed, bool collect_spectra);

// Full (sweep value x seed) grid; failed runs are captured in the result rows.
// Rows come back in deterministic sweep-major order regardless of worker count.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg, bool collect_spectra = false);

// Writes results.csv, per-run run-length CSVs, spectrum CSVs and manifest.cfg.
void emit_results(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                  const std::string& out_dir);

} // namespace imdd
