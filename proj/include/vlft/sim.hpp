#pragma once

#include <cstdint>

#include "vlft/channel.hpp"
#include "vlft/latency.hpp"

namespace vlft {

enum class SimVariant { Truncated, Repeated, InfiniteCapped };
std::string to_string(SimVariant v);

struct SimConfig {
    ChannelModel channel;
    int k_bits = 1;  // M = 2^k, integer k in [0, 26]
    DecodingSchedule schedule = {};
    SimVariant variant = SimVariant::Repeated;
    long trials = 1000;
    std::uint64_t base_seed = 1;
    long cap_symbols = 0;          // InfiniteCapped; 0 -> ceil(64*k/C), at least n1
    long max_rounds = 100000;      // Repeated safety cap; exceeding censors the trial
    bool force_generic_decoder = false;  // bypass the BSC Hamming fast path
    void validate() const;
    bool ch_is_packed() const;  // bit-packed fast path applies (BSC)
};

struct SimEstimate {
    double mean_tau = 0.0;
    double std_error = 0.0;
    long trials = 0;
    double error_rate = 0.0;            // Truncated only
    double error_rate_std_error = 0.0;  // Truncated only
    double restarts_mean = 0.0;         // Repeated only
    long censored = 0;
};

struct SimOptions {
    int threads = 0;  // 0 -> library default (VLFT_THREADS / OpenMP)
};

// Simulate the random-coding VLFT scheme: per trial, draw a fresh codebook
// of M codewords with i.i.d. P_X symbols, pick a message uniformly, transmit
// through the channel, and at each scheduled time decode by information
// density. Success requires the true codeword to be the UNIQUE maximizer;
// ties count as failure. Aggregation uses exact integer sums, so results are
// bit-identical for any worker count.
SimEstimate simulate_vlft(const SimConfig& cfg, const SimOptions& opt = {});

// Serial reference runner: same per-trial kernel, plain loop, no OpenMP.
SimEstimate simulate_vlft_reference(const SimConfig& cfg);

struct ZetaEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

// Monte Carlo frequency of the marginal error event at time n: some wrong
// codeword's density >= the true codeword's density.
ZetaEstimate estimate_zeta(const SimConfig& cfg, long n, const SimOptions& opt = {});

}  // namespace vlft
