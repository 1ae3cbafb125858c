#include "imdd/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace imdd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse number '" + v + "'");
    }
}

long long parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse integer '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& v, int line) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(item, line));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"", {
            {"schema_version", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.schema_version = static_cast<int>(parse_int(v, ln)); }},
        }},
        {"frame", {
            {"training", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.training = static_cast<int>(parse_int(v, ln)); }},
            {"payload", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.payload = parse_int(v, ln); }},
            {"guard", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.guard = static_cast<int>(parse_int(v, ln)); }},
            {"prbs_order", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.prbs_order = static_cast<int>(parse_int(v, ln)); }},
            {"symbol_rate_gbd", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.symbol_rate_gbd = parse_double(v, ln); }},
            {"rrc_rolloff", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.rrc_rolloff = parse_double(v, ln); }},
            {"rrc_span", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.rrc_span = static_cast<int>(parse_int(v, ln)); }},
        }},
        {"channel", {
            {"beta2_ps2_km", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.beta2_ps2_km = parse_double(v, ln); }},
            {"length_km", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.length_km = parse_double(v, ln); }},
            {"model", [](ExperimentConfig& c, const std::string& v, int) { c.model = v; }},
            {"modulation_index", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.modulation_index = parse_double(v, ln); }},
            {"device_bandwidths_ghz", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.device_bw_ghz = parse_double_list(v, ln); }},
            {"dac_rate_gsa", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.dac_rate_gsa = parse_double(v, ln); }},
            {"adc_rate_gsa", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.adc_rate_gsa = parse_double(v, ln); }},
            {"rop_dbm", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.rop_dbm = parse_double(v, ln); }},
            {"rop_ref_dbm", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.rop_ref_dbm = parse_double(v, ln); }},
            {"noise_ref", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.noise_ref = parse_double(v, ln); }},
        }},
        {"bursts", {
            {"rate_per_msym", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.burst_rate = parse_double(v, ln); }},
            {"duration_symbols", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.burst_duration = static_cast<int>(parse_int(v, ln)); }},
            {"amplitude", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.burst_amplitude = parse_double(v, ln); }},
            {"seed", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.burst_seed = static_cast<std::uint64_t>(parse_int(v, ln)); }},
        }},
        {"equalizer", {
            {"pnle_taps", [](ExperimentConfig& c, const std::string& v, int ln) {
                 const auto l = parse_double_list(v, ln);
                 if (l.size() != 3)
                     throw ConfigError("line " + std::to_string(ln) + ": pnle_taps needs 3 values");
                 c.pnle_n1 = static_cast<int>(l[0]);
                 c.pnle_n2 = static_cast<int>(l[1]);
                 c.pnle_n3 = static_cast<int>(l[2]); }},
            {"pnle_mu", [](ExperimentConfig& c, const std::string& v, int ln) {
                 const auto l = parse_double_list(v, ln);
                 if (l.size() != 3)
                     throw ConfigError("line " + std::to_string(ln) + ": pnle_mu needs 3 values");
                 c.pnle_mu1 = l[0];
                 c.pnle_mu2 = l[1];
                 c.pnle_mu3 = l[2]; }},
            {"mode", [](ExperimentConfig& c, const std::string& v, int) { c.dfe_mode = v; }},
            {"ff_taps", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.ff_taps = static_cast<int>(parse_int(v, ln)); }},
            {"fb_taps", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.fb_taps = static_cast<int>(parse_int(v, ln)); }},
            {"mu1", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.mu1 = parse_double(v, ln); }},
            {"mu2", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.mu2 = parse_double(v, ln); }},
            {"mu_decay", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.mu_decay = parse_double(v, ln); }},
            {"pf_alpha", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.pf_alpha = parse_double(v, ln); }},
            {"mlse_memory", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.mlse_memory = static_cast<int>(parse_int(v, ln)); }},
            {"feedback_shaping", [](ExperimentConfig& c, const std::string& v, int) {
                 c.feedback_shaping = v; }},
            {"shaping_threshold", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.shaping_threshold = parse_double(v, ln); }},
        }},
        {"sweep", {
            {"axis", [](ExperimentConfig& c, const std::string& v, int) { c.sweep_axis = v; }},
            {"values", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.sweep_values = parse_double_list(v, ln); }},
        }},
        {"run", {
            {"seeds", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.seeds.clear();
                 for (const auto& s : split_list(v))
                     c.seeds.push_back(static_cast<std::uint64_t>(parse_int(s, ln))); }},
            {"out_dir", [](ExperimentConfig& c, const std::string& v, int) { c.out_dir = v; }},
            {"workers", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.workers = static_cast<int>(parse_int(v, ln)); }},
            {"spectrum_segment", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.spectrum_segment = static_cast<int>(parse_int(v, ln)); }},
            {"spectrum_overlap", [](ExperimentConfig& c, const std::string& v, int ln) {
                 c.spectrum_overlap = parse_double(v, ln); }},
            {"spectrum_stages", [](ExperimentConfig& c, const std::string& v, int) {
                 c.spectrum_stages = split_list(v); }},
        }},
    };
    return table;
}

} // namespace

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes = {
        "rop_dbm", "rop_ref_dbm", "noise_ref", "mlse_memory", "pf_alpha",
        "mu1", "mu2", "modulation_index", "burst_rate", "burst_amplitude",
        "burst_duration",
    };
    return axes;
}

void apply_sweep_value(ExperimentConfig& cfg, const std::string& axis, double value) {
    if (axis == "rop_dbm") cfg.rop_dbm = value;
    else if (axis == "rop_ref_dbm") cfg.rop_ref_dbm = value;
    else if (axis == "noise_ref") cfg.noise_ref = value;
    else if (axis == "mlse_memory") cfg.mlse_memory = static_cast<int>(std::llround(value));
    else if (axis == "pf_alpha") cfg.pf_alpha = value;
    else if (axis == "mu1") cfg.mu1 = value;
    else if (axis == "mu2") cfg.mu2 = value;
    else if (axis == "modulation_index") cfg.modulation_index = value;
    else if (axis == "burst_rate") cfg.burst_rate = value;
    else if (axis == "burst_amplitude") cfg.burst_amplitude = value;
    else if (axis == "burst_duration") cfg.burst_duration = static_cast<int>(std::llround(value));
    else throw ConfigError("sweep axis '" + axis + "' does not name a config field");
}

void ExperimentConfig::validate() const {
    if (training < 64) throw ConfigError("frame.training must be >= 64 symbols");
    if (payload < 1) throw ConfigError("frame.payload must be positive");
    if (guard < 0) throw ConfigError("frame.guard must be >= 0");
    if (symbol_rate_gbd <= 0.0) throw ConfigError("frame.symbol_rate_gbd must be positive");
    if (rrc_rolloff < 0.0 || rrc_rolloff > 1.0)
        throw ConfigError("frame.rrc_rolloff must lie in [0, 1]");
    if (rrc_span < 4) throw ConfigError("frame.rrc_span must be >= 4");
    if (model != "smallsignal" && model != "fullfield")
        throw ConfigError("channel.model must be 'smallsignal' or 'fullfield'");
    if (model == "fullfield" && (modulation_index <= 0.0 || modulation_index > 1.0))
        throw ConfigError("channel.modulation_index must lie in (0, 1]");
    if (dac_rate_gsa * 1e9 < symbol_rate_gbd * 1e9 * 1.25)
        throw ConfigError("channel.dac_rate_gsa must give at least 1.25 samples/symbol");
    if (adc_rate_gsa <= 0.0) throw ConfigError("channel.adc_rate_gsa must be positive");
    if (dfe_mode != "dfe" && dfe_mode != "wdfe")
        throw ConfigError("equalizer.mode must be 'dfe' or 'wdfe'");
    if (feedback_shaping != "identity" && feedback_shaping != "threshold")
        throw ConfigError("equalizer.feedback_shaping must be 'identity' or 'threshold'");
    if (mlse_memory < 0 || mlse_memory > 20)
        throw ConfigError("equalizer.mlse_memory must lie in [0, 20]");
    if (seeds.empty()) throw ConfigError("run.seeds must list at least one seed");
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (!sweep_axis.empty()) {
        const auto& axes = sweep_axes();
        if (std::find(axes.begin(), axes.end(), sweep_axis) == axes.end())
            throw ConfigError("sweep axis '" + sweep_axis + "' does not name a config field");
        if (sweep_values.empty()) throw ConfigError("sweep.values must be non-empty");
    }
    for (const auto& st : spectrum_stages) {
        if (st != "rx" && st != "pnle" && st != "dfe" && st != "mlse")
            throw ConfigError("spectrum stage '" + st + "' unknown (rx, pnle, dfe, mlse)");
    }
    channel_config().validate();
    if (spectrum_segment < 16) throw ConfigError("run.spectrum_segment must be >= 16");
    if (spectrum_overlap < 0.0 || spectrum_overlap >= 1.0)
        throw ConfigError("run.spectrum_overlap must lie in [0, 1)");
}

ChannelConfig ExperimentConfig::channel_config() const {
    ChannelConfig ch;
    ch.beta2 = beta2_ps2_km * 1e-27; // ps^2/km -> s^2/m
    ch.length = length_km * 1e3;
    ch.device_bandwidths.clear();
    for (double bw : device_bw_ghz) ch.device_bandwidths.push_back(bw * 1e9);
    ch.rop_dbm = rop_dbm;
    ch.rop_ref_dbm = rop_ref_dbm;
    ch.noise_ref = noise_ref;
    ch.burst.rate = burst_rate;
    ch.burst.duration = burst_duration;
    ch.burst.amplitude = burst_amplitude;
    ch.burst.seed = burst_seed;
    return ch;
}

std::size_t ExperimentConfig::planned_runs() const {
    const std::size_t points = sweep_axis.empty() ? 1 : sweep_values.size();
    return points * seeds.size();
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line = 0;
    const auto& table = key_table();
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!table.count(section))
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto& sec = table.at(section);
        const auto it = sec.find(key);
        if (it == sec.end())
            throw ConfigError("unknown key '" + key + "' in [" + section + "] (line " +
                              std::to_string(line) + ")");
        it->second(cfg, value, line);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string o;
    o += "schema_version = " + std::to_string(cfg.schema_version) + "\n\n";
    o += "[frame]\n";
    o += "training = " + std::to_string(cfg.training) + "\n";
    o += "payload = " + std::to_string(cfg.payload) + "\n";
    o += "guard = " + std::to_string(cfg.guard) + "\n";
    o += "prbs_order = " + std::to_string(cfg.prbs_order) + "\n";
    o += "symbol_rate_gbd = " + fmt(cfg.symbol_rate_gbd) + "\n";
    o += "rrc_rolloff = " + fmt(cfg.rrc_rolloff) + "\n";
    o += "rrc_span = " + std::to_string(cfg.rrc_span) + "\n\n";
    o += "[channel]\n";
    o += "beta2_ps2_km = " + fmt(cfg.beta2_ps2_km) + "\n";
    o += "length_km = " + fmt(cfg.length_km) + "\n";
    o += "model = " + cfg.model + "\n";
    o += "modulation_index = " + fmt(cfg.modulation_index) + "\n";
    o += "device_bandwidths_ghz = " + fmt_list(cfg.device_bw_ghz) + "\n";
    o += "dac_rate_gsa = " + fmt(cfg.dac_rate_gsa) + "\n";
    o += "adc_rate_gsa = " + fmt(cfg.adc_rate_gsa) + "\n";
    o += "rop_dbm = " + fmt(cfg.rop_dbm) + "\n";
    o += "rop_ref_dbm = " + fmt(cfg.rop_ref_dbm) + "\n";
    o += "noise_ref = " + fmt(cfg.noise_ref) + "\n\n";
    o += "[bursts]\n";
    o += "rate_per_msym = " + fmt(cfg.burst_rate) + "\n";
    o += "duration_symbols = " + std::to_string(cfg.burst_duration) + "\n";
    o += "amplitude = " + fmt(cfg.burst_amplitude) + "\n";
    o += "seed = " + std::to_string(cfg.burst_seed) + "\n\n";
    o += "[equalizer]\n";
    o += "pnle_taps = " + std::to_string(cfg.pnle_n1) + ", " + std::to_string(cfg.pnle_n2) +
         ", " + std::to_string(cfg.pnle_n3) + "\n";
    o += "pnle_mu = " + fmt(cfg.pnle_mu1) + ", " + fmt(cfg.pnle_mu2) + ", " + fmt(cfg.pnle_mu3) + "\n";
    o += "mode = " + cfg.dfe_mode + "\n";
    o += "ff_taps = " + std::to_string(cfg.ff_taps) + "\n";
    o += "fb_taps = " + std::to_string(cfg.fb_taps) + "\n";
    o += "mu1 = " + fmt(cfg.mu1) + "\n";
    o += "mu2 = " + fmt(cfg.mu2) + "\n";
    o += "mu_decay = " + fmt(cfg.mu_decay) + "\n";
    o += "pf_alpha = " + fmt(cfg.pf_alpha) + "\n";
    o += "mlse_memory = " + std::to_string(cfg.mlse_memory) + "\n";
    o += "feedback_shaping = " + cfg.feedback_shaping + "\n";
    o += "shaping_threshold = " + fmt(cfg.shaping_threshold) + "\n\n";
    o += "[sweep]\n";
    if (!cfg.sweep_axis.empty()) {
        o += "axis = " + cfg.sweep_axis + "\n";
        o += "values = " + fmt_list(cfg.sweep_values) + "\n";
    }
    o += "\n[run]\n";
    o += "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (i) o += ", ";
        o += std::to_string(cfg.seeds[i]);
    }
    o += "\n";
    o += "out_dir = " + cfg.out_dir + "\n";
    o += "workers = " + std::to_string(cfg.workers) + "\n";
    o += "spectrum_segment = " + std::to_string(cfg.spectrum_segment) + "\n";
    o += "spectrum_overlap = " + fmt(cfg.spectrum_overlap) + "\n";
    if (!cfg.spectrum_stages.empty()) {
        o += "spectrum_stages = ";
        for (std::size_t i = 0; i < cfg.spectrum_stages.size(); ++i) {
            if (i) o += ", ";
            o += cfg.spectrum_stages[i];
        }
        o += "\n";
    }
    return o;
}

} // namespace imdd
