#include "vlft/latency.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlft/errors.hpp"

namespace vlft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2E = 1.4426950408889634;

// Ceil with a snap for values that are integral up to fp noise (0.15*20 etc).
long ceil_snap(double x) {
    return static_cast<long>(std::ceil(x - 1e-9));
}

BoundDiagnostics base_diag(const XiSeries& xi) {
    BoundDiagnostics d;
    d.unbounded_density = xi.channel().has_zero_transitions();
    return d;
}

LatencyBound finish(BoundKind kind, double ell, double eps, const XiSeries& xi,
                    BoundDiagnostics diag) {
    LatencyBound b;
    b.kind = kind;
    b.expected_latency = ell;
    b.error_bound = eps;
    b.throughput = ell > 0.0 ? xi.log2_m() / ell : 0.0;
    b.diag = diag;
    return b;
}

struct AttemptSum {
    double value = 0.0;  // sum_{j>=1} xi_{n_j}
    long last_time = 0;
    long attempts = 0;
    double tail_estimate = 0.0;
};

// sum_{j>=1} xi_{n1 + (j-1)I} under the tail policy. Throws
// NonConvergenceError (with the partial ell) past the iteration cap.
AttemptSum sum_attempt_xi(const XiSeries& xi, long n1, long increment, const TailPolicy& tail) {
    const double k = xi.log2_m();
    const double cap_c = capacity(xi.channel());
    double min_time = 0.0;
    if (k > 0.0) min_time = cap_c > 0.0 ? tail.min_time_factor * k / cap_c : kInf;
    long max_time = tail.max_time;
    if (max_time <= 0) {
        max_time = 20000;
        if (cap_c > 0.0 && k > 0.0) {
            max_time = std::max<long>(max_time, static_cast<long>(std::ceil(64.0 * k / cap_c)));
        }
    }

    AttemptSum out;
    int below = 0;
    double prev = -1.0;
    double last = -1.0;
    for (long j = 1;; ++j) {
        const long t = n1 + (j - 1) * increment;
        if (t > max_time) {
            throw NonConvergenceError(
                "attempt-time sum did not satisfy the tail policy by time " +
                    std::to_string(max_time),
                static_cast<double>(n1) + static_cast<double>(increment) * out.value, t);
        }
        const double v = xi.get(t);
        out.value += v;
        out.last_time = t;
        out.attempts = j;
        prev = last;
        last = v;
        below = v < tail.threshold ? below + 1 : 0;
        if (below >= tail.consecutive && static_cast<double>(t) >= min_time) break;
    }
    // Geometric estimate of what the truncation discarded (diagnostics only).
    if (last > 0.0 && prev > 0.0 && last < prev) {
        const double r = last / prev;
        out.tail_estimate = static_cast<double>(increment) * last * r / (1.0 - r);
    }
    return out;
}

}  // namespace

long DecodingSchedule::block_length() const {
    if (!attempts.has_value()) {
        throw std::logic_error("DecodingSchedule: block length undefined for unbounded schedules");
    }
    return n1 + (*attempts - 1) * increment;
}

void DecodingSchedule::validate() const {
    if (n1 < 1) throw std::invalid_argument("DecodingSchedule: n1 must be >= 1");
    if (increment < 1) throw std::invalid_argument("DecodingSchedule: increment must be >= 1");
    if (attempts.has_value() && *attempts < 1) {
        throw std::invalid_argument("DecodingSchedule: attempts must be >= 1");
    }
}

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::Infinite: return "infinite";
        case BoundKind::Truncated: return "truncated";
        case BoundKind::Repeated: return "repeated";
        case BoundKind::Periodic: return "periodic";
        case BoundKind::Combined: return "combined";
        case BoundKind::Arq: return "arq";
    }
    return "?";
}

LatencyBound ell_infinite(const XiSeries& xi, const TailPolicy& tail) {
    return ell_periodic(xi, 1, 1, tail);  // xi_0 + sum_{n>=1} xi_n, identically
}

LatencyBound ell_truncated(const XiSeries& xi, long block_length) {
    if (block_length < 1) throw std::invalid_argument("ell_truncated: N must be >= 1");
    double ell = 0.0;
    for (long n = 0; n < block_length; ++n) ell += xi.get(n);
    const double eps = xi.get(block_length);
    BoundDiagnostics diag = base_diag(xi);
    diag.xi_at_block_end = eps;
    diag.attempts_used = block_length;
    diag.truncation_time = block_length - 1;
    return finish(BoundKind::Truncated, ell, eps, xi, diag);
}

LatencyBound ell_repeated(const XiSeries& xi, long block_length) {
    if (block_length < 1) throw std::invalid_argument("ell_repeated: N must be >= 1");
    const double xi_n = xi.get(block_length);
    if (xi_n >= 1.0) {
        throw InfeasibleScheduleError(
            "ell_repeated: xi_N >= 1 at N = " + std::to_string(block_length) +
                "; restarts never make progress under the bound",
            xi_n);
    }
    double acc = 0.0;
    for (long n = 0; n < block_length; ++n) acc += xi.get(n);
    BoundDiagnostics diag = base_diag(xi);
    diag.xi_at_block_end = xi_n;
    diag.attempts_used = block_length;
    return finish(BoundKind::Repeated, acc / (1.0 - xi_n), 0.0, xi, diag);
}

LatencyBound ell_periodic(const XiSeries& xi, long n1, long increment, const TailPolicy& tail) {
    if (n1 < 1 || increment < 1) {
        throw std::invalid_argument("ell_periodic: n1 and increment must be >= 1");
    }
    const AttemptSum s = sum_attempt_xi(xi, n1, increment, tail);
    const double ell = static_cast<double>(n1) + static_cast<double>(increment) * s.value;
    BoundDiagnostics diag = base_diag(xi);
    diag.truncation_time = s.last_time;
    diag.attempts_used = s.attempts;
    diag.tail_estimate = s.tail_estimate;
    return finish(n1 == 1 && increment == 1 ? BoundKind::Infinite : BoundKind::Periodic, ell, 0.0,
                  xi, diag);
}

LatencyBound ell_combined(const XiSeries& xi, const DecodingSchedule& sched) {
    sched.validate();
    if (!sched.attempts.has_value()) {
        throw std::invalid_argument("ell_combined: schedule must have a finite attempt budget");
    }
    const long m = *sched.attempts;
    const long block = sched.block_length();
    const double xi_n = xi.get(block);
    if (xi_n >= 1.0) {
        throw InfeasibleScheduleError(
            "ell_combined: xi_N >= 1 at N = " + std::to_string(block), xi_n);
    }
    double acc = static_cast<double>(sched.n1);
    for (long j = 1; j < m; ++j) {
        acc += static_cast<double>(sched.increment) * xi.get(sched.attempt_time(j));
    }
    BoundDiagnostics diag = base_diag(xi);
    diag.xi_at_block_end = xi_n;
    diag.attempts_used = m;
    return finish(BoundKind::Combined, acc / (1.0 - xi_n), 0.0, xi, diag);
}

LatencyBound arq_latency(const XiSeries& xi, long block_length) {
    if (block_length < 1) throw std::invalid_argument("arq_latency: N must be >= 1");
    const double xi_n = xi.get(block_length);
    if (xi_n >= 1.0) {
        throw InfeasibleScheduleError(
            "arq_latency: xi_N >= 1 at N = " + std::to_string(block_length), xi_n);
    }
    BoundDiagnostics diag = base_diag(xi);
    diag.xi_at_block_end = xi_n;
    diag.attempts_used = 1;
    return finish(BoundKind::Arq, static_cast<double>(block_length) / (1.0 - xi_n), 0.0, xi,
                  diag);
}

std::pair<long, LatencyBound> arq_optimize(const XiSeries& xi, long n_lo, long n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("arq_optimize: bad range");
    long best_n = -1;
    LatencyBound best;
    for (long n = n_lo; n <= n_hi; ++n) {
        if (xi.get(n) >= 1.0) continue;
        LatencyBound b = arq_latency(xi, n);
        if (best_n < 0 || b.expected_latency < best.expected_latency) {
            best_n = n;
            best = b;
        }
    }
    if (best_n < 0) {
        throw InfeasibleScheduleError("arq_optimize: no feasible block length in range", 1.0);
    }
    return {best_n, best};
}

double converse_max_log_m(double ell, double capacity_bits) {
    if (!(ell >= 0.0)) throw std::invalid_argument("converse_max_log_m: ell must be >= 0");
    if (!(capacity_bits >= 0.0)) {
        throw std::invalid_argument("converse_max_log_m: capacity must be >= 0");
    }
    return ell * capacity_bits + std::log2(ell + 1.0) + kLog2E;
}

BlockLengthPolicy BlockLengthPolicy::fixed(long n) {
    BlockLengthPolicy p;
    p.kind = Kind::Fixed;
    p.fixed_n = n;
    return p;
}

BlockLengthPolicy BlockLengthPolicy::log_over_c_delta(double delta_frac) {
    BlockLengthPolicy p;
    p.kind = Kind::LogOverCDelta;
    p.delta_frac = delta_frac;
    return p;
}

BlockLengthPolicy BlockLengthPolicy::ell_plus_log(double a, double b) {
    BlockLengthPolicy p;
    p.kind = Kind::EllPlusLog;
    p.a = a;
    p.b = b;
    return p;
}

IncrementPolicy IncrementPolicy::fixed(long i) {
    IncrementPolicy p;
    p.kind = Kind::Fixed;
    p.fixed_i = i;
    return p;
}

IncrementPolicy IncrementPolicy::loglog() {
    IncrementPolicy p;
    p.kind = Kind::LogLog;
    return p;
}

IncrementPolicy IncrementPolicy::linear_log(double c) {
    IncrementPolicy p;
    p.kind = Kind::LinearLog;
    p.c = c;
    return p;
}

long choose_block_length(const BlockLengthPolicy& policy, double k_bits, double capacity_bits) {
    switch (policy.kind) {
        case BlockLengthPolicy::Kind::Fixed:
            if (policy.fixed_n < 1) {
                throw std::invalid_argument("choose_block_length: fixed N must be >= 1");
            }
            return policy.fixed_n;
        case BlockLengthPolicy::Kind::LogOverCDelta: {
            if (!(policy.delta_frac > 0.0 && policy.delta_frac < 1.0)) {
                throw std::invalid_argument("choose_block_length: delta fraction not in (0,1)");
            }
            if (!(k_bits > 0.0) || !(capacity_bits > 0.0)) {
                throw std::invalid_argument("choose_block_length: needs k > 0 and C > 0");
            }
            return std::max<long>(1, ceil_snap(k_bits / ((1.0 - policy.delta_frac) * capacity_bits)));
        }
        case BlockLengthPolicy::Kind::EllPlusLog: {
            if (policy.a < 0.0 || policy.b < 0.0) {
                throw std::invalid_argument("choose_block_length: a and b must be >= 0");
            }
            if (!(k_bits > 0.0) || !(capacity_bits > 0.0)) {
                throw std::invalid_argument("choose_block_length: needs k > 0 and C > 0");
            }
            const double base = k_bits / capacity_bits;
            return std::max<long>(1, ceil_snap(base + policy.a * std::log2(base) + policy.b));
        }
    }
    throw std::logic_error("choose_block_length: unknown policy");
}

long choose_increment(const IncrementPolicy& policy, double k_bits) {
    switch (policy.kind) {
        case IncrementPolicy::Kind::Fixed:
            if (policy.fixed_i < 1) {
                throw std::invalid_argument("choose_increment: fixed I must be >= 1");
            }
            return policy.fixed_i;
        case IncrementPolicy::Kind::LogLog: {
            if (!(k_bits > 0.0)) throw std::invalid_argument("choose_increment: needs k > 0");
            return std::max<long>(1, ceil_snap(std::log2(k_bits)));
        }
        case IncrementPolicy::Kind::LinearLog: {
            if (!(policy.c > 0.0)) throw std::invalid_argument("choose_increment: c must be > 0");
            return std::max<long>(1, ceil_snap(policy.c * k_bits));
        }
    }
    throw std::logic_error("choose_increment: unknown policy");
}

long default_attempts(double k_bits, double capacity_bits, double delta_frac, long n1,
                      long increment) {
    if (!(delta_frac > 0.0 && delta_frac < 1.0)) {
        throw std::invalid_argument("default_attempts: delta fraction not in (0,1)");
    }
    if (!(k_bits > 0.0) || !(capacity_bits > 0.0)) {
        throw std::invalid_argument("default_attempts: needs k > 0 and C > 0");
    }
    const double c_delta = (1.0 - delta_frac) * capacity_bits;
    const double m = k_bits / (increment * c_delta) - static_cast<double>(n1) / increment + 1.0;
    return std::max<long>(1, ceil_snap(m));
}

}  // namespace vlft
