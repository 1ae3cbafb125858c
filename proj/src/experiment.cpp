#include "imdd/experiment.hpp"

#include "imdd/equalizer.hpp"
#include "imdd/mlse.hpp"
#include "imdd/signal.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace imdd {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::uint8_t> error_mask(std::span<const double> decided,
                                     std::span<const double> truth) {
    std::vector<std::uint8_t> mask(decided.size());
    for (std::size_t i = 0; i < decided.size(); ++i)
        mask[i] = (decided[i] >= 0.0) != (truth[i] >= 0.0) ? 1 : 0;
    return mask;
}

} // namespace

RunResult execute_run(const ExperimentConfig& cfg, int sweep_index, double sweep_value,
                      std::uint64_t seed, bool collect_spectra) {
    const auto t_start = std::chrono::steady_clock::now();

    RunResult res;
    res.sweep_index = sweep_index;
    res.sweep_value = sweep_value;
    res.seed = seed;

    ExperimentConfig run_cfg = cfg;
    if (!cfg.sweep_axis.empty()) apply_sweep_value(run_cfg, cfg.sweep_axis, sweep_value);
    run_cfg.validate();

    const double fsym = run_cfg.symbol_rate_hz();
    ChannelConfig ch = run_cfg.channel_config();
    ch.burst.seed = mix_seed(seed ^ run_cfg.burst_seed, 3);
    const std::uint64_t seed_tx = mix_seed(seed, 1);
    const std::uint64_t seed_noise = mix_seed(seed, 2);

    const long long n_sym = 2LL * run_cfg.guard + run_cfg.training + run_cfg.payload;
    const auto bits = generate_prbs(run_cfg.prbs_order, static_cast<std::size_t>(n_sym), seed_tx);
    const auto syms = map_pam2(bits, fsym);
    SymbolSequence train;
    train.symbol_rate = fsym;
    train.amplitudes.assign(syms.amplitudes.begin() + run_cfg.guard,
                            syms.amplitudes.begin() + run_cfg.guard + run_cfg.training);
    train.source_bits.assign(syms.source_bits.begin() + run_cfg.guard,
                             syms.source_bits.begin() + run_cfg.guard + run_cfg.training);

    // transmit: 2 samples/symbol shaping, DAC rate conversion, transmit filter
    const RrcFilter rrc = design_rrc(run_cfg.rrc_rolloff, run_cfg.rrc_span, 2.0);
    Waveform tx = upsample_impulses(syms, 2);
    tx.samples = fir_same(tx.samples, rrc.taps);
    // pad so every rate ratio in the 144<->90<->80 chain stays integral
    while (tx.samples.size() % 72 != 0) tx.samples.push_back(0.0);

    Waveform line = resample(tx, run_cfg.dac_rate_hz());
    if (!ch.device_bandwidths.empty()) line = lowpass_device(line, ch.device_bandwidths[0]);

    if (run_cfg.model == "fullfield") {
        line = apply_fullfield_channel(line, ch, run_cfg.modulation_index).out;
    } else {
        line = apply_smallsignal_channel(line, ch);
    }
    for (std::size_t i = 1; i < ch.device_bandwidths.size(); ++i)
        line = lowpass_device(line, ch.device_bandwidths[i]);

    line = resample(line, run_cfg.adc_rate_hz());
    line = add_noise(line, ch, seed_noise);
    BurstResult burst = inject_bursts(line, ch, fsym);

    if (collect_spectra) {
        for (const auto& st : run_cfg.spectrum_stages) {
            if (st == "rx")
                res.spectra.push_back({"rx", welch_spectrum(burst.out,
                                                            static_cast<std::size_t>(run_cfg.spectrum_segment),
                                                            run_cfg.spectrum_overlap)});
        }
    }

    // receive: back to 2 samples/symbol, matched filter, frame alignment
    Waveform rx2 = resample(burst.out, 2.0 * fsym);
    std::vector<double> mf = fir_same(rx2.samples, rrc.taps);
    const SyncResult sync = synchronize(mf, train, 2, run_cfg.training);
    const long base = sync.offset - 2L * run_cfg.guard;

    std::vector<double> x(static_cast<std::size_t>(n_sym));
    const long mlen = static_cast<long>(mf.size());
    for (long long i = 0; i < n_sym; ++i) {
        const long j = base + 2L * static_cast<long>(i);
        x[static_cast<std::size_t>(i)] = (j >= 0 && j < mlen) ? mf[static_cast<std::size_t>(j)] : 0.0;
    }
    normalize_rms(x);

    std::vector<double> y;
    if (run_cfg.pnle_n1 > 0) {
        PnleState pnle = PnleState::make(run_cfg.pnle_n1, run_cfg.pnle_n2, run_cfg.pnle_n3,
                                         run_cfg.pnle_mu1, run_cfg.pnle_mu2, run_cfg.pnle_mu3);
        y = pnle_equalize(x, pnle, train.amplitudes,
                          static_cast<std::size_t>(run_cfg.guard));
    } else {
        y = x;
    }

    EqualizerState eq = EqualizerState::make(run_cfg.ff_taps, run_cfg.fb_taps,
                                             run_cfg.dfe_mode == "dfe" ? DfeMode::classical
                                                                       : DfeMode::weighted,
                                             run_cfg.mu1, run_cfg.mu2);
    eq.mu_decay = run_cfg.mu_decay;
    if (run_cfg.feedback_shaping == "threshold") {
        eq.shaping.kind = FeedbackShaping::Kind::threshold;
        eq.shaping.threshold = run_cfg.shaping_threshold;
    }
    const FrameEqOutput fr = equalize_frame(y, eq, train.amplitudes,
                                            static_cast<std::size_t>(run_cfg.guard));
    const std::vector<double> pf = post_filter(fr.soft, run_cfg.pf_alpha);

    const std::size_t g = static_cast<std::size_t>(run_cfg.guard);
    const std::size_t t = static_cast<std::size_t>(run_cfg.training);
    const std::size_t p = static_cast<std::size_t>(run_cfg.payload);

    const IsiEstimate est = estimate_isi_taps(
        std::span<const double>(pf).subspan(g, t), train.amplitudes, run_cfg.mlse_memory);
    // detector runs from the training start through the payload
    const SymbolSequence dec =
        mlse_viterbi(std::span<const double>(pf).subspan(g, t + p), est.model);

    const std::span<const double> truth(syms.amplitudes.data() + g + t, p);
    const std::span<const double> dfe_hard(fr.hard.data() + g + t, p);
    const std::span<const double> mlse_hard(dec.amplitudes.data() + t, p);

    res.dfe = count_errors(dfe_hard, truth);
    res.mlse = count_errors(mlse_hard, truth);
    res.rl_dfe = run_length_stats(error_mask(dfe_hard, truth));
    res.rl_mlse = run_length_stats(error_mask(mlse_hard, truth));

    if (collect_spectra) {
        const std::size_t seg = static_cast<std::size_t>(run_cfg.spectrum_segment);
        for (const auto& st : run_cfg.spectrum_stages) {
            if (st == "pnle")
                res.spectra.push_back({"pnle", welch_spectrum(Waveform{y, fsym}, seg,
                                                              run_cfg.spectrum_overlap)});
            else if (st == "dfe")
                res.spectra.push_back({"dfe", welch_spectrum(Waveform{fr.soft, fsym}, seg,
                                                             run_cfg.spectrum_overlap)});
            else if (st == "mlse")
                res.spectra.push_back({"mlse", welch_spectrum(Waveform{dec.amplitudes, fsym}, seg,
                                                              run_cfg.spectrum_overlap)});
        }
    }

    res.ok = true;
    res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg, bool collect_spectra) {
    cfg.validate();
    struct Job {
        int sweep_index;
        double sweep_value;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    const std::size_t points = cfg.sweep_axis.empty() ? 1 : cfg.sweep_values.size();
    for (std::size_t i = 0; i < points; ++i) {
        const double value = cfg.sweep_axis.empty() ? 0.0 : cfg.sweep_values[i];
        for (const std::uint64_t seed : cfg.seeds)
            jobs.push_back({static_cast<int>(i), value, seed});
    }

    std::vector<RunResult> results(jobs.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& j = jobs[i];
            try {
                results[i] = execute_run(cfg, j.sweep_index, j.sweep_value, j.seed, collect_spectra);
            } catch (const std::exception& ex) {
                results[i].sweep_index = j.sweep_index;
                results[i].sweep_value = j.sweep_value;
                results[i].seed = j.seed;
                results[i].ok = false;
                results[i].error = ex.what();
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

void emit_results(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

    const auto open = [&](const std::string& name) {
        std::ofstream f(fs::path(out_dir) / name);
        if (!f) throw IoError("cannot write '" + name + "' under '" + out_dir + "'");
        return f;
    };

    {
        auto f = open("results.csv");
        f << "sweep_axis,sweep_value,seed,ber_dfe,ber_mlse,q_db_dfe,q_db_mlse,"
             "max_run_dfe,max_run_mlse,single_frac_dfe,single_frac_mlse\n";
        const std::string axis = cfg.sweep_axis.empty() ? "none" : cfg.sweep_axis;
        for (const auto& r : results) {
            if (!r.ok) continue;
            f << axis << ',' << fmt(r.sweep_value) << ',' << r.seed << ',' << fmt(r.dfe.ber)
              << ',' << fmt(r.mlse.ber) << ',' << fmt(r.dfe.q_db) << ',' << fmt(r.mlse.q_db)
              << ',' << r.rl_dfe.max_run() << ',' << r.rl_mlse.max_run() << ','
              << fmt(r.rl_dfe.single_error_fraction()) << ','
              << fmt(r.rl_mlse.single_error_fraction()) << '\n';
        }
    }

    for (const auto& r : results) {
        if (!r.ok) continue;
        auto f = open("runlen_" + std::to_string(r.sweep_index) + "_" + std::to_string(r.seed) +
                      ".csv");
        f << "stage,run_length,count,pdf,cdf\n";
        for (const char* stage : {"dfe", "mlse"}) {
            const RunLengthHistogram& h = stage[0] == 'd' ? r.rl_dfe : r.rl_mlse;
            const auto pdf = h.pdf();
            const auto cdf = h.cdf();
            for (std::size_t i = 0; i < pdf.size(); ++i) {
                f << stage << ',' << pdf[i].first << ',' << h.counts.at(pdf[i].first) << ','
                  << fmt(pdf[i].second) << ',' << fmt(cdf[i].second) << '\n';
            }
        }
    }

    for (const auto& r : results) {
        for (const auto& sp : r.spectra) {
            auto f = open("spectrum_" + sp.stage + "_" + std::to_string(r.sweep_index) + "_" +
                          std::to_string(r.seed) + ".csv");
            f << "freq_hz,power_db\n";
            for (std::size_t i = 0; i < sp.spectrum.freq_hz.size(); ++i)
                f << fmt(sp.spectrum.freq_hz[i]) << ',' << fmt(sp.spectrum.power_db[i]) << '\n';
        }
    }

    {
        auto f = open("manifest.cfg");
        f << "# resolved experiment configuration\n";
        f << serialize_config(cfg);
        f << "\n# run log (informational; not part of the deterministic outputs)\n";
        for (const auto& r : results) {
            f << "# run sweep_index=" << r.sweep_index << " sweep_value=" << fmt(r.sweep_value)
              << " seed=" << r.seed << " ok=" << (r.ok ? 1 : 0);
            if (r.ok)
                f << " runtime_s=" << fmt(r.runtime_s);
            else
                f << " error=" << r.error;
            f << '\n';
        }
    }
}

} // namespace imdd
