#include "vlft/sim.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vlft/parallel.hpp"
#include "vlft/rng.hpp"

namespace vlft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    long tau = 0;
    bool error = false;
    long restarts = 0;
    bool censored = false;
};

// Exact integer aggregation: merging is commutative and associative, so
// results are bit-identical for any worker count and schedule.
struct Accum {
    unsigned long long n = 0;
    unsigned __int128 tau_sum = 0;
    unsigned __int128 tau_sq_sum = 0;
    unsigned long long errors = 0;
    unsigned long long restarts = 0;
    unsigned long long censored = 0;

    void add(const Outcome& o) {
        if (o.censored) {
            ++censored;
            return;
        }
        ++n;
        const auto t = static_cast<unsigned __int128>(o.tau);
        tau_sum += t;
        tau_sq_sum += t * t;
        if (o.error) ++errors;
        restarts += static_cast<unsigned long long>(o.restarts);
    }
    void merge(const Accum& other) {
        n += other.n;
        tau_sum += other.tau_sum;
        tau_sq_sum += other.tau_sq_sum;
        errors += other.errors;
        restarts += other.restarts;
        censored += other.censored;
    }
};

long attempt_count_within(const DecodingSchedule& sched, long cap) {
    if (cap < sched.n1) return 0;
    return (cap - sched.n1) / sched.increment + 1;
}

// ---------------------------------------------------------------------------
// Packed kernel: BSC channels. Codewords and noise live in 64-bit words,
// decoding compares Hamming distances (or canonical densities recomputed
// from the distances when force_generic_decoder is set).

struct PackedScratch {
    std::vector<std::uint64_t> codebook;
    std::vector<std::uint64_t> noise;
};

class PackedKernel {
public:
    PackedKernel(const SimConfig& cfg, long horizon)
        : cfg_(cfg),
          p_(*cfg.channel.crossover()),
          m_count_(1L << cfg.k_bits),
          horizon_(horizon),
          words_(static_cast<std::size_t>((horizon + 63) / 64)) {
        // Per-symbol densities for the generic-comparison mode.
        v_agree_ = std::log2(2.0 * (1.0 - p_));    // -inf when p = 1
        v_disagree_ = std::log2(2.0 * p_);         // -inf when p = 0
    }

    long horizon() const { return horizon_; }

    Outcome run_trial(std::uint64_t seed, PackedScratch& s) const {
        Xoshiro256 rng(seed);
        const long message = static_cast<long>(rng.next_below(m_count_));
        draw_codebook(rng, s);

        Outcome out;
        if (cfg_.variant == SimVariant::InfiniteCapped) {
            draw_noise(rng, s);
            const long attempts = attempt_count_within(cfg_.schedule, horizon_);
            for (long j = 1; j <= attempts; ++j) {
                const long n = cfg_.schedule.attempt_time(j);
                if (attempt_succeeds(n, message, s)) {
                    out.tau = n;
                    return out;
                }
            }
            out.tau = horizon_;
            out.censored = true;
            return out;
        }

        const long m_attempts = *cfg_.schedule.attempts;
        for (long round = 1; round <= cfg_.max_rounds; ++round) {
            draw_noise(rng, s);
            for (long j = 1; j <= m_attempts; ++j) {
                const long n = cfg_.schedule.attempt_time(j);
                if (attempt_succeeds(n, message, s)) {
                    out.tau = (round - 1) * horizon_ + n;
                    out.restarts = round - 1;
                    return out;
                }
            }
            if (cfg_.variant == SimVariant::Truncated) {
                out.tau = horizon_;
                out.error = true;
                return out;
            }
        }
        out.tau = cfg_.max_rounds * horizon_;
        out.censored = true;
        return out;
    }

    // Marginal error event at time n over a fresh draw.
    bool zeta_event(std::uint64_t seed, long n, PackedScratch& s) const {
        Xoshiro256 rng(seed);
        const long message = static_cast<long>(rng.next_below(m_count_));
        draw_codebook(rng, s);
        draw_noise(rng, s);
        return !attempt_succeeds(n, message, s);
    }

private:
    void draw_codebook(Xoshiro256& rng, PackedScratch& s) const {
        s.codebook.resize(static_cast<std::size_t>(m_count_) * words_);
        for (auto& w : s.codebook) w = rng.next();
    }

    void draw_noise(Xoshiro256& rng, PackedScratch& s) const {
        s.noise.assign(words_, 0);
        for (long i = 0; i < horizon_; ++i) {
            if (rng.next_bernoulli(p_)) {
                s.noise[i >> 6] |= 1ULL << (i & 63);
            }
        }
    }

    double density_from_distance(long n, long d) const {
        const long agree = n - d;
        double dens = 0.0;
        if (agree > 0) dens += static_cast<double>(agree) * v_agree_;
        if (d > 0) dens += static_cast<double>(d) * v_disagree_;
        return dens;
    }

    bool attempt_succeeds(long n, long message, const PackedScratch& s) const {
        const long full = n >> 6;
        const std::uint64_t last_mask = (n & 63) != 0 ? ((1ULL << (n & 63)) - 1) : 0;

        long d_true = 0;
        for (long w = 0; w < full; ++w) d_true += std::popcount(s.noise[w]);
        if (last_mask != 0) d_true += std::popcount(s.noise[full] & last_mask);

        if (p_ == 0.5 && m_count_ > 1) return false;  // every density ties

        const std::uint64_t* true_cw = s.codebook.data() + message * words_;
        const bool smaller_better = p_ < 0.5;
        const double dens_true =
            cfg_.force_generic_decoder ? density_from_distance(n, d_true) : 0.0;
        for (long c = 0; c < m_count_; ++c) {
            if (c == message) continue;
            const std::uint64_t* cw = s.codebook.data() + c * words_;
            // y = true_cw ^ noise, so d(cw, y) = popcount(cw ^ true_cw ^ noise).
            long d = 0;
            for (long w = 0; w < full; ++w) {
                d += std::popcount(cw[w] ^ true_cw[w] ^ s.noise[w]);
            }
            if (last_mask != 0) {
                d += std::popcount((cw[full] ^ true_cw[full] ^ s.noise[full]) & last_mask);
            }
            if (cfg_.force_generic_decoder) {
                if (density_from_distance(n, d) >= dens_true) return false;
            } else {
                if (smaller_better ? d <= d_true : d >= d_true) return false;
            }
        }
        return true;
    }

    const SimConfig& cfg_;
    double p_;
    long m_count_;
    long horizon_;  // N (Truncated/Repeated) or cap (InfiniteCapped)
    std::size_t words_;
    double v_agree_;
    double v_disagree_;
};

// ---------------------------------------------------------------------------
// Symbol kernel: any DMC. Codewords are symbol vectors; decoding compares
// canonical densities (pair counts dotted with the density table), so ties
// are exact.

struct SymbolScratch {
    std::vector<std::uint8_t> codebook;
    std::vector<std::uint8_t> received;
    std::vector<long> counts;
};

class SymbolKernel {
public:
    SymbolKernel(const SimConfig& cfg, long horizon)
        : cfg_(cfg),
          ch_(cfg.channel),
          in_(ch_.input_alphabet_size()),
          out_(ch_.output_alphabet_size()),
          m_count_(1L << cfg.k_bits),
          horizon_(horizon) {
        input_cdf_.resize(in_);
        double acc = 0.0;
        for (int x = 0; x < in_; ++x) {
            acc += ch_.input_prob(x);
            input_cdf_[x] = acc;
        }
        transition_cdf_.resize(static_cast<std::size_t>(in_) * out_);
        for (int x = 0; x < in_; ++x) {
            acc = 0.0;
            for (int y = 0; y < out_; ++y) {
                acc += ch_.transition(x, y);
                transition_cdf_[static_cast<std::size_t>(x) * out_ + y] = acc;
            }
        }
    }

    long horizon() const { return horizon_; }

    Outcome run_trial(std::uint64_t seed, SymbolScratch& s) const {
        Xoshiro256 rng(seed);
        const long message = static_cast<long>(rng.next_below(m_count_));
        draw_codebook(rng, s);

        Outcome out;
        if (cfg_.variant == SimVariant::InfiniteCapped) {
            draw_received(rng, message, s);
            const long attempts = attempt_count_within(cfg_.schedule, horizon_);
            for (long j = 1; j <= attempts; ++j) {
                const long n = cfg_.schedule.attempt_time(j);
                if (attempt_succeeds(n, message, s)) {
                    out.tau = n;
                    return out;
                }
            }
            out.tau = horizon_;
            out.censored = true;
            return out;
        }

        const long m_attempts = *cfg_.schedule.attempts;
        for (long round = 1; round <= cfg_.max_rounds; ++round) {
            draw_received(rng, message, s);
            for (long j = 1; j <= m_attempts; ++j) {
                const long n = cfg_.schedule.attempt_time(j);
                if (attempt_succeeds(n, message, s)) {
                    out.tau = (round - 1) * horizon_ + n;
                    out.restarts = round - 1;
                    return out;
                }
            }
            if (cfg_.variant == SimVariant::Truncated) {
                out.tau = horizon_;
                out.error = true;
                return out;
            }
        }
        out.tau = cfg_.max_rounds * horizon_;
        out.censored = true;
        return out;
    }

    bool zeta_event(std::uint64_t seed, long n, SymbolScratch& s) const {
        Xoshiro256 rng(seed);
        const long message = static_cast<long>(rng.next_below(m_count_));
        draw_codebook(rng, s);
        draw_received(rng, message, s);
        return !attempt_succeeds(n, message, s);
    }

private:
    int draw_from_cdf(Xoshiro256& rng, const double* cdf, int size) const {
        const double u = rng.next_unit();
        int sym = 0;
        while (sym + 1 < size && u >= cdf[sym]) ++sym;
        return sym;
    }

    void draw_codebook(Xoshiro256& rng, SymbolScratch& s) const {
        s.codebook.resize(static_cast<std::size_t>(m_count_) * horizon_);
        for (auto& sym : s.codebook) {
            sym = static_cast<std::uint8_t>(draw_from_cdf(rng, input_cdf_.data(), in_));
        }
    }

    void draw_received(Xoshiro256& rng, long message, SymbolScratch& s) const {
        s.received.resize(horizon_);
        const std::uint8_t* cw = s.codebook.data() + message * horizon_;
        for (long i = 0; i < horizon_; ++i) {
            const double* row = transition_cdf_.data() + static_cast<std::size_t>(cw[i]) * out_;
            s.received[i] = static_cast<std::uint8_t>(draw_from_cdf(rng, row, out_));
        }
    }

    double density_prefix(const std::uint8_t* cw, const std::uint8_t* y, long n,
                          SymbolScratch& s) const {
        const DensityTable& table = ch_.densities();
        s.counts.assign(table.num_classes(), 0);
        for (long i = 0; i < n; ++i) {
            if (!table.reachable(cw[i], y[i])) return -kInf;
            ++s.counts[table.value_class(cw[i], y[i])];
        }
        double d = 0.0;
        for (int c = 0; c < table.num_classes(); ++c) {
            if (s.counts[c] != 0) d += static_cast<double>(s.counts[c]) * table.class_value(c);
        }
        return d;
    }

    bool attempt_succeeds(long n, long message, SymbolScratch& s) const {
        const double dens_true =
            density_prefix(s.codebook.data() + message * horizon_, s.received.data(), n, s);
        for (long c = 0; c < m_count_; ++c) {
            if (c == message) continue;
            const double dens =
                density_prefix(s.codebook.data() + c * horizon_, s.received.data(), n, s);
            if (dens >= dens_true) return false;
        }
        return true;
    }

    const SimConfig& cfg_;
    const ChannelModel& ch_;
    int in_;
    int out_;
    long m_count_;
    long horizon_;
    std::vector<double> input_cdf_;
    std::vector<double> transition_cdf_;
};

long resolve_horizon(const SimConfig& cfg) {
    if (cfg.variant == SimVariant::InfiniteCapped) {
        if (cfg.cap_symbols > 0) return std::max(cfg.cap_symbols, cfg.schedule.n1);
        const double c = capacity(cfg.channel);
        if (!(c > 0.0)) {
            throw std::invalid_argument(
                "SimConfig: InfiniteCapped needs an explicit cap for zero-capacity channels");
        }
        const long cap = static_cast<long>(std::ceil(64.0 * std::max(cfg.k_bits, 1) / c));
        return std::max(cap, cfg.schedule.n1);
    }
    return cfg.schedule.block_length();
}

template <typename Kernel, typename Scratch>
Accum run_all(const Kernel& kernel, const SimConfig& cfg, int threads) {
    Accum total;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads) if (threads > 1)
    {
        Scratch scratch;
        Accum local;
#pragma omp for schedule(dynamic, 16) nowait
        for (long i = 0; i < cfg.trials; ++i) {
            local.add(kernel.run_trial(trial_seed(cfg.base_seed, i), scratch));
        }
#pragma omp critical
        total.merge(local);
    }
#else
    (void)threads;
    Scratch scratch;
    for (long i = 0; i < cfg.trials; ++i) {
        total.add(kernel.run_trial(trial_seed(cfg.base_seed, i), scratch));
    }
#endif
    return total;
}

SimEstimate finalize(const SimConfig& cfg, const Accum& acc) {
    if (acc.censored * 100 > static_cast<unsigned long long>(cfg.trials)) {
        throw std::runtime_error("simulate_vlft: more than 1% of trials were censored (" +
                                 std::to_string(acc.censored) + "/" +
                                 std::to_string(cfg.trials) + ")");
    }
    SimEstimate est;
    est.trials = static_cast<long>(acc.n);
    est.censored = static_cast<long>(acc.censored);
    if (acc.n == 0) return est;
    const auto n = static_cast<long double>(acc.n);
    const auto sum = static_cast<long double>(acc.tau_sum);
    const auto sq = static_cast<long double>(acc.tau_sq_sum);
    est.mean_tau = static_cast<double>(sum / n);
    if (acc.n > 1) {
        const long double var = (sq - sum * sum / n) / (n - 1.0L);
        est.std_error = static_cast<double>(std::sqrt(std::max(0.0L, var) / n));
    }
    if (cfg.variant == SimVariant::Truncated) {
        const double er = static_cast<double>(acc.errors) / static_cast<double>(acc.n);
        est.error_rate = er;
        est.error_rate_std_error = std::sqrt(er * (1.0 - er) / static_cast<double>(acc.n));
    }
    if (cfg.variant == SimVariant::Repeated) {
        est.restarts_mean = static_cast<double>(acc.restarts) / static_cast<double>(acc.n);
    }
    return est;
}

}  // namespace

std::string to_string(SimVariant v) {
    switch (v) {
        case SimVariant::Truncated: return "truncated";
        case SimVariant::Repeated: return "repeated";
        case SimVariant::InfiniteCapped: return "infinite_capped";
    }
    return "?";
}

void SimConfig::validate() const {
    if (k_bits < 0 || k_bits > 26) {
        throw std::invalid_argument("SimConfig: k must be an integer in [0, 26]");
    }
    if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    schedule.validate();
    if (variant != SimVariant::InfiniteCapped && !schedule.attempts.has_value()) {
        throw std::invalid_argument(
            "SimConfig: Truncated/Repeated variants need a finite attempt budget");
    }
    if (max_rounds < 1) throw std::invalid_argument("SimConfig: max_rounds must be >= 1");
    if (channel.input_alphabet_size() > 256 || channel.output_alphabet_size() > 256) {
        throw std::invalid_argument("SimConfig: alphabets larger than 256 are not supported");
    }
    const long horizon = resolve_horizon(*this);
    const double m_count = std::exp2(k_bits);
    const double bytes = ch_is_packed() ? m_count * ((horizon + 63) / 64) * 8.0
                                        : m_count * static_cast<double>(horizon);
    if (bytes > 512.0 * 1024 * 1024) {
        throw std::invalid_argument("SimConfig: codebook would exceed the 512 MiB budget");
    }
}

bool SimConfig::ch_is_packed() const { return channel.is_bsc(); }

SimEstimate simulate_vlft(const SimConfig& cfg, const SimOptions& opt) {
    cfg.validate();
    const int threads = effective_threads(opt.threads);
    const long horizon = resolve_horizon(cfg);
    Accum acc;
    if (cfg.ch_is_packed()) {
        PackedKernel kernel(cfg, horizon);
        acc = run_all<PackedKernel, PackedScratch>(kernel, cfg, threads);
    } else {
        SymbolKernel kernel(cfg, horizon);
        acc = run_all<SymbolKernel, SymbolScratch>(kernel, cfg, threads);
    }
    return finalize(cfg, acc);
}

SimEstimate simulate_vlft_reference(const SimConfig& cfg) {
    cfg.validate();
    const long horizon = resolve_horizon(cfg);
    Accum acc;
    if (cfg.ch_is_packed()) {
        PackedKernel kernel(cfg, horizon);
        PackedScratch scratch;
        for (long i = 0; i < cfg.trials; ++i) {
            acc.add(kernel.run_trial(trial_seed(cfg.base_seed, i), scratch));
        }
    } else {
        SymbolKernel kernel(cfg, horizon);
        SymbolScratch scratch;
        for (long i = 0; i < cfg.trials; ++i) {
            acc.add(kernel.run_trial(trial_seed(cfg.base_seed, i), scratch));
        }
    }
    return finalize(cfg, acc);
}

ZetaEstimate estimate_zeta(const SimConfig& cfg, long n, const SimOptions& opt) {
    cfg.validate();
    if (n < 0) throw std::invalid_argument("estimate_zeta: n must be >= 0");
    const long horizon = resolve_horizon(cfg);
    if (n > horizon) {
        throw std::invalid_argument("estimate_zeta: n exceeds the schedule block length");
    }
    const int threads = effective_threads(opt.threads);
    unsigned long long events = 0;
    if (cfg.k_bits == 0) {
        // Lone codeword: no competitor can tie or beat it.
        return {0.0, 0.0, cfg.trials};
    }
    if (cfg.ch_is_packed()) {
        PackedKernel kernel(cfg, horizon);
#ifdef _OPENMP
#pragma omp parallel num_threads(threads) if (threads > 1)
        {
            PackedScratch scratch;
            unsigned long long local = 0;
#pragma omp for schedule(dynamic, 16) nowait
            for (long i = 0; i < cfg.trials; ++i) {
                if (kernel.zeta_event(trial_seed(cfg.base_seed, i), n, scratch)) ++local;
            }
#pragma omp critical
            events += local;
        }
#else
        PackedScratch scratch;
        for (long i = 0; i < cfg.trials; ++i) {
            if (kernel.zeta_event(trial_seed(cfg.base_seed, i), n, scratch)) ++events;
        }
#endif
    } else {
        SymbolKernel kernel(cfg, horizon);
        SymbolScratch scratch;
        for (long i = 0; i < cfg.trials; ++i) {
            if (kernel.zeta_event(trial_seed(cfg.base_seed, i), n, scratch)) ++events;
        }
    }
    ZetaEstimate z;
    z.trials = cfg.trials;
    z.p_hat = static_cast<double>(events) / static_cast<double>(cfg.trials);
    z.std_error = std::sqrt(z.p_hat * (1.0 - z.p_hat) / static_cast<double>(cfg.trials));
    return z;
}

}  // namespace vlft
