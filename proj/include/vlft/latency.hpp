#pragma once

#include <optional>
#include <string>
#include <utility>

#include "vlft/xi.hpp"

namespace vlft {

// Decode attempts at times n_j = n1 + (j-1)*I, j = 1..m (m may be absent
// for schedules that never restart).
struct DecodingSchedule {
    long n1 = 1;
    long increment = 1;
    std::optional<long> attempts;  // m

    long attempt_time(long j) const { return n1 + (j - 1) * increment; }
    // N = n1 + (m-1)*I; only for finite schedules.
    long block_length() const;
    void validate() const;  // throws std::invalid_argument
};

enum class BoundKind { Infinite, Truncated, Repeated, Periodic, Combined, Arq };
std::string to_string(BoundKind k);

// Truncation rule for the infinite sums: stop once xi at the attempt times
// has stayed below `threshold` for `consecutive` attempts AND the attempt
// time exceeds min_time_factor * k/C. The discarded tail is estimated
// geometrically and reported in diagnostics, never added to the bound.
struct TailPolicy {
    double threshold = 1e-12;
    int consecutive = 10;
    double min_time_factor = 2.0;
    long max_time = 0;  // 0 -> max(20000, 64*k/C); exceeding it throws NonConvergenceError
};

struct BoundDiagnostics {
    long truncation_time = -1;   // last attempt time summed (infinite-horizon kinds)
    long attempts_used = 0;
    double tail_estimate = 0.0;  // geometric estimate of the discarded tail
    double xi_at_block_end = 0.0;
    bool unbounded_density = false;  // channel has zero transition entries
    bool feasible = true;
};

struct LatencyBound {
    double expected_latency = 0.0;  // ell, symbols
    double error_bound = 0.0;       // eps
    double throughput = 0.0;        // log2(M) / ell
    BoundKind kind = BoundKind::Infinite;
    BoundDiagnostics diag;
};

// ell <= sum_{n>=0} xi_n, eps = 0.
LatencyBound ell_infinite(const XiSeries& xi, const TailPolicy& tail = {});

// ell = sum_{n<N} xi_n, eps = xi_N.
LatencyBound ell_truncated(const XiSeries& xi, long block_length);

// ell = (1 - xi_N)^-1 sum_{n<N} xi_n, eps = 0. Throws InfeasibleScheduleError
// when xi_N >= 1.
LatencyBound ell_repeated(const XiSeries& xi, long block_length);

// ell = n1 + I * sum_{j>=1} xi_{n_j}, eps = 0.
LatencyBound ell_periodic(const XiSeries& xi, long n1, long increment,
                          const TailPolicy& tail = {});

// ell = (1 - xi_N)^-1 (n1 + I * sum_{j=1}^{m-1} xi_{n_j}), eps = 0.
LatencyBound ell_combined(const XiSeries& xi, const DecodingSchedule& sched);

// ell = N / (1 - xi_N); equals ell_combined with m = 1, n1 = N.
LatencyBound arq_latency(const XiSeries& xi, long block_length);

// Scan [n_lo, n_hi] for the smallest ell; ties resolve to the smaller N.
std::pair<long, LatencyBound> arq_optimize(const XiSeries& xi, long n_lo, long n_hi);

// Zero-error VLFT converse: log2 M* <= ell*C + log2(ell+1) + log2(e).
double converse_max_log_m(double ell, double capacity_bits);

struct BlockLengthPolicy {
    enum class Kind { Fixed, LogOverCDelta, EllPlusLog };
    Kind kind = Kind::Fixed;
    long fixed_n = 0;
    double delta_frac = 0.0;  // N = ceil(k / ((1-delta_frac)*C))
    double a = 0.0, b = 0.0;  // N = ceil(k/C + a*log2(k/C) + b)

    static BlockLengthPolicy fixed(long n);
    static BlockLengthPolicy log_over_c_delta(double delta_frac);
    static BlockLengthPolicy ell_plus_log(double a, double b);
};

struct IncrementPolicy {
    enum class Kind { Fixed, LogLog, LinearLog };
    Kind kind = Kind::Fixed;
    long fixed_i = 1;
    double c = 0.15;  // I = ceil(c*k)

    static IncrementPolicy fixed(long i);
    static IncrementPolicy loglog();
    static IncrementPolicy linear_log(double c);
};

long choose_block_length(const BlockLengthPolicy& policy, double k_bits, double capacity_bits);
long choose_increment(const IncrementPolicy& policy, double k_bits);

// Default attempt budget for finite schedules under a C_Delta target:
// m = ceil(k/(I*C_Delta) - n1/I + 1), which puts N = n1 + (m-1)*I at or
// above k/C_Delta.
long default_attempts(double k_bits, double capacity_bits, double delta_frac, long n1,
                      long increment);

}  // namespace vlft
