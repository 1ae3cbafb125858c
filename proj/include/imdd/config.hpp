#pragma once

#include "imdd/channel.hpp"
#include "imdd/equalizer.hpp"
#include "imdd/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace imdd {

// Experiment description; field units match the config-file keys.
struct ExperimentConfig {
    int schema_version = 1;

    // [frame]
    int training = 5000;
    long long payload = 77240;
    int guard = 128;
    int prbs_order = 15;
    double symbol_rate_gbd = 72.0;
    double rrc_rolloff = 0.02;
    int rrc_span = 32;

    // [channel]
    double beta2_ps2_km = -21.7;
    double length_km = 18.8;
    std::string model = "smallsignal"; // or "fullfield"
    double modulation_index = 0.3;
    std::vector<double> device_bw_ghz = {16.0, 31.0, 36.0}; // first is transmit-side
    double dac_rate_gsa = 90.0;
    double adc_rate_gsa = 80.0;
    double rop_dbm = -4.0;
    double rop_ref_dbm = -4.0;
    double noise_ref = 0.0;

    // [bursts]
    double burst_rate = 0.0; // per 1e6 symbols
    int burst_duration = 10;
    double burst_amplitude = 1.0;
    std::uint64_t burst_seed = 1;

    // [equalizer]
    int pnle_n1 = 0, pnle_n2 = 0, pnle_n3 = 0; // all zero disables the PNLE
    double pnle_mu1 = 1e-3, pnle_mu2 = 2e-4, pnle_mu3 = 5e-5;
    std::string dfe_mode = "wdfe"; // or "dfe"
    int ff_taps = 71, fb_taps = 51;
    double mu1 = 1e-3, mu2 = 1e-3;
    double mu_decay = 1.0;
    double pf_alpha = 0.0;
    int mlse_memory = 10;
    std::string feedback_shaping = "identity"; // or "threshold"
    double shaping_threshold = 0.5;

    // [sweep]
    std::string sweep_axis;           // empty = single point
    std::vector<double> sweep_values; // empty = single point

    // [run]
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "out";
    int workers = 1;
    int spectrum_segment = 4096;
    double spectrum_overlap = 0.5;
    std::vector<std::string> spectrum_stages; // subset of {rx,pnle,dfe,mlse}

    void validate() const;

    ChannelConfig channel_config() const;

    double symbol_rate_hz() const { return symbol_rate_gbd * 1e9; }
    double dac_rate_hz() const { return dac_rate_gsa * 1e9; }
    double adc_rate_hz() const { return adc_rate_gsa * 1e9; }

    std::size_t planned_runs() const;
};

// Sweep axes that name an existing config field.
const std::vector<std::string>& sweep_axes();
void apply_sweep_value(ExperimentConfig& cfg, const std::string& axis, double value);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace imdd
