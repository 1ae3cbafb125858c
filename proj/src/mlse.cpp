#include "imdd/mlse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imdd {

void MlseModel::validate() const {
    if (memory < 0) throw ConfigError("MLSE memory must be >= 0");
    if (isi_taps.size() != static_cast<std::size_t>(memory) + 1)
        throw ConfigError("MLSE tap vector must have memory+1 entries");
    if (isi_taps.empty() || isi_taps[0] == 0.0)
        throw ConfigError("MLSE main tap must be nonzero");
    for (double t : isi_taps)
        if (!std::isfinite(t)) throw ConfigError("MLSE taps must be finite");
}

IsiEstimate estimate_isi_taps(std::span<const double> soft, std::span<const double> known,
                              int memory) {
    if (memory < 0) throw ConfigError("ISI memory must be >= 0");
    const std::size_t p1 = static_cast<std::size_t>(memory) + 1;
    if (known.size() < 10 * p1)
        throw EstimationError("ISI estimation needs at least 10*(P+1) training symbols");
    if (soft.size() < known.size())
        throw AlignmentError("soft stream shorter than the training window");

    // normal equations A^T A w = A^T s over rows k = P .. n-1
    std::vector<double> ata(p1 * p1, 0.0);
    std::vector<double> atb(p1, 0.0);
    for (std::size_t k = static_cast<std::size_t>(memory); k < known.size(); ++k) {
        for (std::size_t i = 0; i < p1; ++i) {
            const double ti = known[k - i];
            atb[i] += ti * soft[k];
            for (std::size_t j = i; j < p1; ++j) ata[i * p1 + j] += ti * known[k - j];
        }
    }
    for (std::size_t i = 0; i < p1; ++i)
        for (std::size_t j = 0; j < i; ++j) ata[i * p1 + j] = ata[j * p1 + i];

    // Gaussian elimination with partial pivoting
    std::vector<double> w = atb;
    std::vector<double> m = ata;
    for (std::size_t col = 0; col < p1; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p1; ++r)
            if (std::abs(m[r * p1 + col]) > std::abs(m[piv * p1 + col])) piv = r;
        if (std::abs(m[piv * p1 + col]) < 1e-9 * known.size())
            throw EstimationError("ISI normal equations are rank deficient");
        if (piv != col) {
            for (std::size_t c = 0; c < p1; ++c) std::swap(m[piv * p1 + c], m[col * p1 + c]);
            std::swap(w[piv], w[col]);
        }
        for (std::size_t r = col + 1; r < p1; ++r) {
            const double f = m[r * p1 + col] / m[col * p1 + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < p1; ++c) m[r * p1 + c] -= f * m[col * p1 + c];
            w[r] -= f * w[col];
        }
    }
    for (std::size_t col = p1; col-- > 0;) {
        for (std::size_t c = col + 1; c < p1; ++c) w[col] -= m[col * p1 + c] * w[c];
        w[col] /= m[col * p1 + col];
    }

    IsiEstimate est;
    est.model.memory = memory;
    est.model.isi_taps = w;
    double rss = 0.0;
    std::size_t rows = 0;
    for (std::size_t k = static_cast<std::size_t>(memory); k < known.size(); ++k) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p1; ++i) pred += w[i] * known[k - i];
        const double r = soft[k] - pred;
        rss += r * r;
        ++rows;
    }
    est.residual_rms = rows ? std::sqrt(rss / static_cast<double>(rows)) : 0.0;
    est.model.validate();
    return est;
}

double sequence_metric(std::span<const double> soft, const MlseModel& model,
                       std::span<const double> symbols) {
    model.validate();
    if (soft.size() != symbols.size())
        throw AlignmentError("metric needs matching soft/symbol lengths");
    double d = 0.0;
    for (std::size_t k = 0; k < soft.size(); ++k) {
        double pred = 0.0;
        for (int i = 0; i <= model.memory && static_cast<std::size_t>(i) <= k; ++i)
            pred += model.isi_taps[static_cast<std::size_t>(i)] * symbols[k - static_cast<std::size_t>(i)];
        const double r = soft[k] - pred;
        d += r * r;
    }
    return d;
}

namespace {

SymbolSequence to_sequence(const std::vector<double>& amps) {
    return SymbolSequence::from_amplitudes(amps);
}

// +1 sorts before -1; position 0 is the earliest.
bool lex_before(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

} // namespace

SymbolSequence brute_force_mlse(std::span<const double> soft, const MlseModel& model) {
    model.validate();
    const std::size_t n = soft.size();
    if (n == 0) return SymbolSequence{};
    if (n > 16) throw DomainError("brute_force_mlse refuses more than 16 symbols");

    std::vector<double> best;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<double> cand(n);
    for (std::uint32_t idx = 0; idx < (1u << n); ++idx) {
        for (std::size_t j = 0; j < n; ++j)
            cand[j] = ((idx >> (n - 1 - j)) & 1u) ? -1.0 : 1.0;
        const double d = sequence_metric(soft, model, cand);
        if (d < best_d) { // strict: lexicographically earliest +1 wins ties
            best_d = d;
            best = cand;
        }
    }
    return to_sequence(best);
}

namespace {

struct Trellis {
    int memory;
    std::uint32_t states;          // 2^P
    std::vector<double> taps;      // isi_taps
    std::vector<double> pred_hist; // per state: sum_{i>=1} w_i * sym(bit_{i-1})

    explicit Trellis(const MlseModel& model)
        : memory(model.memory),
          states(1u << model.memory),
          taps(model.isi_taps),
          pred_hist(states, 0.0) {
        for (std::uint32_t u = 0; u < states; ++u) {
            double acc = 0.0;
            for (int i = 1; i <= memory; ++i)
                acc += taps[static_cast<std::size_t>(i)] * (((u >> (i - 1)) & 1u) ? 1.0 : -1.0);
            pred_hist[u] = acc;
        }
    }

    // Prefix-masked history prediction at stage k (stage k uses symbols
    // t_{k-1}..t_{k-P}; entries before the frame start contribute nothing).
    double pred_hist_masked(std::uint32_t u, long k) const {
        if (k >= memory) return pred_hist[u];
        double acc = 0.0;
        for (int i = 1; i <= memory && i <= k; ++i)
            acc += taps[static_cast<std::size_t>(i)] * (((u >> (i - 1)) & 1u) ? 1.0 : -1.0);
        return acc;
    }
};

} // namespace

SymbolSequence mlse_viterbi(std::span<const double> soft, const MlseModel& model,
                            const MlseOptions& opts) {
    model.validate();
    if (model.memory > opts.max_memory)
        throw ConfigError("MLSE state space too large: memory " + std::to_string(model.memory) +
                          " exceeds cap " + std::to_string(opts.max_memory));
    const long n = static_cast<long>(soft.size());
    if (n == 0) return SymbolSequence{};

    const int P = model.memory;
    if (P == 0) {
        const double w0 = model.isi_taps[0];
        std::vector<double> out(static_cast<std::size_t>(n));
        for (long k = 0; k < n; ++k) {
            const double s = soft[static_cast<std::size_t>(k)];
            const double dp = (s - w0) * (s - w0);
            const double dm = (s + w0) * (s + w0);
            out[static_cast<std::size_t>(k)] = dp <= dm ? 1.0 : -1.0;
        }
        return to_sequence(out);
    }

    Trellis tr(model);
    const std::uint32_t S = tr.states;
    const std::uint32_t top = S >> 1;
    const double w0 = tr.taps[0];
    const double inf = std::numeric_limits<double>::infinity();

    const long window = opts.traceback > 0
                            ? opts.traceback
                            : std::max<long>(64, 6L * (P + 1));

    std::vector<double> cost(S, inf), next(S, inf);
    cost[0] = 0.0; // virtual start; prefix taps are masked out
    // survivors[(k % window)*S + v] = predecessor top bit
    std::vector<std::uint8_t> survivors(static_cast<std::size_t>(window) * S, 0);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);

    auto sym_of = [](std::uint32_t bit) { return bit ? 1.0 : -1.0; };

    // Rebuilds a survivor path ending at (stage, state), oldest symbol first.
    auto traceback_path = [&](long stage, std::uint32_t state, long depth) {
        std::vector<double> path(static_cast<std::size_t>(depth));
        std::uint32_t v = state;
        for (long d = depth - 1; d >= 0; --d) {
            const long k = stage - (depth - 1 - d);
            path[static_cast<std::size_t>(d)] = sym_of(v & 1u);
            const std::uint8_t pb = survivors[static_cast<std::size_t>(k % window) * S + v];
            v = (v >> 1) | (pb ? top : 0u);
        }
        return path;
    };

    std::vector<double> resid(S); // s_k minus the per-state history prediction
    long committed = 0;           // symbols already written to out
    for (long k = 0; k < n; ++k) {
        const double s = soft[static_cast<std::size_t>(k)];
        if (k >= P) {
            for (std::uint32_t u = 0; u < S; ++u) resid[u] = s - tr.pred_hist[u];
        } else {
            for (std::uint32_t u = 0; u < S; ++u) resid[u] = s - tr.pred_hist_masked(u, k);
        }
        std::fill(next.begin(), next.end(), inf);
        const std::size_t row = static_cast<std::size_t>(k % window) * S;
        for (std::uint32_t v = 0; v < S; ++v) {
            const double emit = (v & 1u) ? w0 : -w0;
            const std::uint32_t u0 = v >> 1;
            const std::uint32_t u1 = u0 | top;
            double c0 = inf, c1 = inf;
            if (cost[u0] < inf) {
                const double d = resid[u0] - emit;
                c0 = cost[u0] + d * d;
            }
            if (cost[u1] < inf) {
                const double d = resid[u1] - emit;
                c1 = cost[u1] + d * d;
            }
            std::uint8_t pick;
            if (c0 < c1) {
                pick = 0;
            } else if (c1 < c0) {
                pick = 1;
            } else {
                if (c0 == inf) { next[v] = inf; survivors[row + v] = 0; continue; }
                // exact tie: prefer the path holding +1 at the earliest
                // differing position within the survivor window
                const long depth = std::min<long>(k, window - 1);
                if (depth <= 0) {
                    pick = 0; // u0 vs u1 differ only in a masked prefix slot
                } else {
                    const auto pa = traceback_path(k - 1, u0, depth);
                    const auto pb = traceback_path(k - 1, u1, depth);
                    pick = lex_before(pb, pa) ? 1 : 0;
                }
            }
            next[v] = pick ? c1 : c0;
            survivors[row + v] = pick;
        }
        cost.swap(next);

        // keep costs small; subtracting a shared constant preserves ties
        double lo = inf;
        for (double c : cost) lo = std::min(lo, c);
        if (lo > 1e12) {
            for (double& c : cost) c -= lo;
        }

        if (k >= window) {
            // commit the symbol leaving the survivor window
            std::uint32_t best_state = 0;
            double best_cost = inf;
            for (std::uint32_t v = 0; v < S; ++v) {
                if (cost[v] < best_cost) {
                    best_cost = cost[v];
                    best_state = v;
                }
            }
            std::uint32_t v = best_state;
            for (long back = k; back > k - window; --back) {
                const std::uint8_t pb = survivors[static_cast<std::size_t>(back % window) * S + v];
                v = (v >> 1) | (pb ? top : 0u);
            }
            if (committed <= k - window) {
                out[static_cast<std::size_t>(k - window)] = sym_of(v & 1u);
                committed = k - window + 1;
            }
        }
    }

    // final traceback from the best end state (lexicographic tie rule)
    std::uint32_t best_state = 0;
    double best_cost = inf;
    for (std::uint32_t v = 0; v < S; ++v) {
        if (cost[v] < best_cost) {
            best_cost = cost[v];
            best_state = v;
        } else if (cost[v] == best_cost && cost[v] < inf) {
            const long depth = std::min<long>(n, window);
            const auto pa = traceback_path(n - 1, best_state, depth);
            const auto pb = traceback_path(n - 1, v, depth);
            if (lex_before(pb, pa)) best_state = v;
        }
    }
    {
        std::uint32_t v = best_state;
        for (long k = n - 1; k >= committed; --k) {
            out[static_cast<std::size_t>(k)] = sym_of(v & 1u);
            const std::uint8_t pb = survivors[static_cast<std::size_t>(k % window) * S + v];
            v = (v >> 1) | (pb ? top : 0u);
        }
    }
    return to_sequence(out);
}

} // namespace imdd
