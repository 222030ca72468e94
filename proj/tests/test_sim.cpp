#include <cmath>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "vlft/errors.hpp"
#include "vlft/rng.hpp"
#include "vlft/sim.hpp"

using namespace vlft;

TEST_CASE("trial seeding is injective and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 50000; ++i) seen.insert(trial_seed(12345, i));
    CHECK(seen.size() == 50000);
    CHECK(trial_seed(1, 7) == trial_seed(1, 7));
    CHECK(trial_seed(1, 7) != trial_seed(2, 7));
}

TEST_CASE("lone codeword stops at the first attempt with zero variance") {
    SimConfig cfg{.channel = make_bsc(0.0)};
    cfg.k_bits = 0;
    cfg.schedule = {4, 3, 5};
    cfg.variant = SimVariant::Truncated;
    cfg.trials = 200;
    cfg.base_seed = 11;
    const auto est = simulate_vlft(cfg);
    CHECK(est.mean_tau == 4.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.error_rate == 0.0);
}

TEST_CASE("noiseless two-codeword stop time is the first differing prefix") {
    SimConfig cfg{.channel = make_bsc(0.0)};
    cfg.k_bits = 1;
    cfg.schedule = {1, 1, std::nullopt};
    cfg.variant = SimVariant::InfiniteCapped;
    cfg.trials = 20000;
    cfg.base_seed = 3;
    const auto est = simulate_vlft(cfg);
    // geometric(1/2) first-difference time has mean 2
    CHECK(std::abs(est.mean_tau - 2.0) <= 3.0 * est.std_error + 1e-9);
    CHECK(est.mean_tau >= 1.0);
    CHECK(est.censored == 0);
}

TEST_CASE("zeta estimates") {
    SimConfig cfg{.channel = make_bsc(0.0)};
    cfg.k_bits = 1;
    cfg.schedule = {1, 1, 4};
    cfg.variant = SimVariant::Truncated;
    cfg.trials = 40000;
    cfg.base_seed = 5;
    const auto z = estimate_zeta(cfg, 3);
    // both codewords agree on the first three positions w.p. 1/8; ties fail
    CHECK(std::abs(z.p_hat - 0.125) <= 3.0 * z.std_error + 1e-9);
    // RCU dominance: xi_3 = min(1, 2*2^-3) = 0.25
    CHECK(z.p_hat <= 0.25 + 3.0 * z.std_error);

    SimConfig lone = cfg;
    lone.k_bits = 0;
    CHECK(estimate_zeta(lone, 3).p_hat == 0.0);

    CHECK_THROWS_AS(estimate_zeta(cfg, 9), std::invalid_argument);
}

TEST_CASE("zeta dominance on a noisy channel") {
    auto ch = make_bsc(0.1);
    XiSeries xi(ch, 3.0, XiMethod::BscRcuExact);
    SimConfig cfg{.channel = ch};
    cfg.k_bits = 3;
    cfg.schedule = {1, 1, 16};
    cfg.variant = SimVariant::Truncated;
    cfg.trials = 20000;
    cfg.base_seed = 17;
    for (long n : {2L, 5L, 9L, 14L}) {
        const auto z = estimate_zeta(cfg, n);
        CHECK(z.p_hat <= xi.get(n) + 3.0 * z.std_error);
    }
}

TEST_CASE("repeated variant: dominance, zero error, restart accounting") {
    auto ch = make_bsc(0.0789);
    const double c = capacity(ch);
    const long n = choose_block_length(BlockLengthPolicy::log_over_c_delta(0.4), 8.0, c);
    SimConfig cfg{.channel = ch};
    cfg.k_bits = 8;
    cfg.schedule = {1, 1, n};
    cfg.variant = SimVariant::Repeated;
    cfg.trials = 4000;
    cfg.base_seed = 23;
    const auto est = simulate_vlft(cfg);
    XiSeries xi(ch, 8.0, XiMethod::BscRcuExact);
    const auto bound = ell_repeated(xi, n);
    CHECK(est.mean_tau <= bound.expected_latency + 3.0 * est.std_error);
    CHECK(est.error_rate == 0.0);  // the stop rule requires correctness
    CHECK(est.restarts_mean >= 0.0);
    CHECK(est.mean_tau >= 1.0);
}

TEST_CASE("truncated variant error rate is dominated by xi_N") {
    auto ch = make_bsc(0.0789);
    const double c = capacity(ch);
    const long n = choose_block_length(BlockLengthPolicy::log_over_c_delta(0.3), 8.0, c);
    SimConfig cfg{.channel = ch};
    cfg.k_bits = 8;
    cfg.schedule = {1, 1, n};
    cfg.variant = SimVariant::Truncated;
    cfg.trials = 6000;
    cfg.base_seed = 29;
    const auto est = simulate_vlft(cfg);
    XiSeries xi(ch, 8.0, XiMethod::BscRcuExact);
    CHECK(est.error_rate <= xi.get(n) + 3.0 * est.error_rate_std_error);
    CHECK(est.mean_tau <= ell_truncated(xi, n).expected_latency + 3.0 * est.std_error);
}

TEST_CASE("stopping times respect the schedule") {
    auto ch = make_bsc(0.05);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        SimConfig cfg{.channel = ch};
        cfg.k_bits = 2;
        cfg.schedule = {2, 3, 4};  // attempts at 2,5,8,11; N = 11
        cfg.variant = SimVariant::Repeated;
        cfg.trials = 1;
        cfg.base_seed = seed;
        const auto est = simulate_vlft(cfg);
        const long tau = static_cast<long>(est.mean_tau);
        CHECK(tau == est.mean_tau);  // single trial: integral
        const long within = ((tau - 1) % 11) + 1;  // position inside its round
        const bool on_schedule =
            within == 2 || within == 5 || within == 8 || within == 11;
        CHECK(on_schedule);
    }
}

TEST_CASE("worker count and runner choice do not change results") {
    auto ch = make_bsc(0.0789);
    SimConfig cfg{.channel = ch};
    cfg.k_bits = 6;
    cfg.schedule = {1, 2, 16};
    cfg.variant = SimVariant::Repeated;
    cfg.trials = 3000;
    cfg.base_seed = 31;
    const auto ref = simulate_vlft_reference(cfg);
    for (int threads : {1, 2, 4}) {
        SimOptions opt;
        opt.threads = threads;
        const auto est = simulate_vlft(cfg, opt);
        CHECK(est.mean_tau == ref.mean_tau);
        CHECK(est.std_error == ref.std_error);
        CHECK(est.trials == ref.trials);
        CHECK(est.restarts_mean == ref.restarts_mean);
    }
}

TEST_CASE("generic density decoding matches the Hamming fast path") {
    for (double p : {0.1, 0.35, 0.9}) {
        SimConfig fast{.channel = make_bsc(p)};
        fast.k_bits = 4;
        fast.schedule = {2, 2, 9};
        fast.variant = SimVariant::Repeated;
        fast.trials = 2000;
        fast.base_seed = 37;
        SimConfig slow = fast;
        slow.force_generic_decoder = true;
        const auto a = simulate_vlft(fast);
        const auto b = simulate_vlft(slow);
        CHECK(a.mean_tau == b.mean_tau);
        CHECK(a.std_error == b.std_error);
        CHECK(a.restarts_mean == b.restarts_mean);
    }
}

TEST_CASE("symbol-kernel path handles non-BSC channels") {
    auto ch = testutil::random_channel(2, 3, 41);
    SimConfig cfg{.channel = ch};
    cfg.k_bits = 3;
    cfg.schedule = {1, 1, 24};
    cfg.variant = SimVariant::Truncated;
    cfg.trials = 4000;
    cfg.base_seed = 43;
    const auto est = simulate_vlft(cfg);
    CHECK(est.mean_tau >= 1.0);
    CHECK(est.mean_tau <= 24.0);
    // DT bound dominates the true marginal error probability
    XiSeries xi(ch, 3.0, XiMethod::DmcDtConvolution);
    const auto z = estimate_zeta(cfg, 8);
    CHECK(z.p_hat <= xi.get(8) + 3.0 * z.std_error);
    // and the truncated-latency bound dominates the simulated mean
    const auto bound = ell_truncated(xi, 24);
    CHECK(est.mean_tau <= bound.expected_latency + 3.0 * est.std_error);
}

TEST_CASE("pathological channels censor and fail loudly") {
    SimConfig cfg{.channel = make_bsc(0.5)};
    cfg.k_bits = 1;
    cfg.schedule = {1, 1, std::nullopt};
    cfg.variant = SimVariant::InfiniteCapped;
    cfg.cap_symbols = 50;
    cfg.trials = 100;
    cfg.base_seed = 47;
    CHECK_THROWS_AS(simulate_vlft(cfg), std::runtime_error);  // every trial censors
}

TEST_CASE("config validation") {
    SimConfig cfg{.channel = make_bsc(0.1)};
    cfg.k_bits = 30;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.k_bits = 4;
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.trials = 10;
    cfg.variant = SimVariant::Repeated;
    cfg.schedule = {1, 1, std::nullopt};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // needs finite attempts
    cfg.schedule = {1, 1, 8};
    cfg.validate();
}
