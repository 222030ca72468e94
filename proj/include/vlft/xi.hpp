#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "vlft/channel.hpp"

namespace vlft {

enum class XiMethod { BscRcuExact, DmcDtConvolution, ExhaustiveOracle };
enum class MConvention { M, MMinusOne };

std::string to_string(XiMethod m);
std::string to_string(MConvention c);

// RCU decode-failure bound for a BSC with crossover p and multiplier M,
//   xi_n = sum_t C(n,t) p^t (1-p)^(n-t) * min{1, M * sum_{j<=t} C(n,j) 2^-n},
// evaluated in the log domain. M is passed as log2(M) so message counts up
// to 2^1000 stay representable. Returns 1 for n = 0.
double xi_bsc_log2m(int n, double log2_m, double p);

// Same formula with M given directly.
double xi_bsc(int n, double message_count, double p);

// log2(multiplier) for a convention: log2(M) or log2(M-1), with M = 2^k.
double convention_log2_multiplier(double log2_m, MConvention conv);

// Exact RCU expectation (full enumeration over (x^n, y^n, xbar^n)):
//   E[min{1, mult * P[i(Xbar^n;Y^n) >= i(X^n;Y^n) | X^n,Y^n]}],
// ties counted toward failure. Feasible only for tiny n; refuses past the
// oracle limit. n = 0 returns 1.
double xi_exact_oracle(int n, double message_count, const ChannelModel& ch,
                       MConvention conv, int oracle_limit = 6);

// Gridded distribution of the n-fold information density S_n, built by
// repeated convolution. Values are rounded DOWN to the grid at the symbol
// level, which can only increase E[2^-[S-log2M]^+], so the DT bound stays
// an upper bound. Masses below the prune threshold are folded into the
// smallest retained density.
class DensityLattice {
public:
    explicit DensityLattice(double grid_step);  // point mass at 0 (n = 0)

    static DensityLattice single_symbol(const ChannelModel& ch, double grid_step);

    void convolve_with(const DensityLattice& symbol);

    // E[2^-[s - log2M]^+] over the lattice.
    double dt_expectation(double log2_m) const;

    double grid_step() const { return grid_step_; }
    std::size_t support_size() const { return support_.size(); }
    double total_mass() const;
    double pruned_mass() const { return pruned_total_; }

    static constexpr double kPruneThreshold = 1e-18;

private:
    double grid_step_;
    std::vector<std::pair<std::int64_t, double>> support_;  // sorted by grid index
    double pruned_total_ = 0.0;
    void prune();
};

// DT weakening of the RCU bound (gamma = M) for a general DMC:
//   xi_n <= E[2^-[i(X^n;Y^n) - log2 M]^+],
// evaluated on a density lattice with the given grid step.
double xi_dt_dmc(int n, double log2_m, const ChannelModel& ch, double grid_step = 1e-4);

// Memoized xi_0, xi_1, ... for one (channel, M, method, convention) tuple.
// Thread-safe: concurrent readers synchronize on fill; values are pure
// functions of the inputs, so fill order never changes results.
class XiSeries {
public:
    XiSeries(ChannelModel ch, double log2_m, XiMethod method,
             MConvention conv = MConvention::M, double grid_step = 1e-4,
             int oracle_limit = 6, bool parallel_fill = true);

    double get(long n) const;
    void ensure(long n) const;  // prefill [0, n]

    const ChannelModel& channel() const { return ch_; }
    double log2_m() const { return log2_m_; }
    XiMethod method() const { return method_; }
    MConvention convention() const { return conv_; }

private:
    void fill_locked(long n) const;
    double compute_bsc(long n) const;

    ChannelModel ch_;
    double log2_m_;
    XiMethod method_;
    MConvention conv_;
    double grid_step_;
    int oracle_limit_;
    bool parallel_fill_;
    double log2_mult_;  // per convention

    mutable std::mutex mu_;
    mutable std::vector<double> cache_;
    mutable DensityLattice lattice_;  // DmcDtConvolution state
    mutable long lattice_n_ = 0;
};

}  // namespace vlft
