#include "vlft/xi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "vlft/errors.hpp"

namespace vlft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2E = 1.4426950408889634;  // 1/ln 2

// Neumaier compensated summation.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    double value() const { return s + c; }
};

double logaddexp2(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp2(lo - hi)) * kLog2E;
}

// log2(i!) grown on demand with long double accumulation; thread-local so
// parallel series fills never contend.
const std::vector<double>& log2_factorials(long n) {
    thread_local std::vector<double> table{0.0};
    thread_local long double acc = 0.0L;
    while (static_cast<long>(table.size()) <= n) {
        acc += std::log2(static_cast<long double>(table.size()));
        table.push_back(static_cast<double>(acc));
    }
    return table;
}

double log2_choose(long n, long t) {
    const auto& lf = log2_factorials(n);
    return lf[n] - lf[t] - lf[n - t];
}

// Formula of the BSC RCU bound with an arbitrary multiplier in the union
// term (log2_mult = log2 M or log2(M-1)). xi_0 is pinned to 1.
double xi_bsc_multiplier(int n, double log2_mult, double p) {
    if (n < 0) throw std::invalid_argument("xi_bsc: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("xi_bsc: p must be in [0,1]");
    if (std::isnan(log2_mult)) throw std::domain_error("xi_bsc: multiplier is NaN");
    if (n == 0) return 1.0;
    if (log2_mult == -kInf) return 0.0;
    // mult*2^-n >= 1 already at t = 0, so the min clamps for every t.
    if (log2_mult >= static_cast<double>(n)) return 1.0;
    if (p == 0.0) return std::min(1.0, std::exp2(log2_mult - n));
    if (p == 1.0) return std::min(1.0, std::exp2(log2_mult));

    const double lp = std::log2(p);
    const double lq = std::log1p(-p) * kLog2E;

    // Inner cumulative sum_{j<=t} C(n,j) 2^-n: log domain while tiny,
    // compensated linear once it crosses 2^-40.
    double log_inner = -kInf;
    KahanSum lin_inner;
    bool linear = false;

    KahanSum outer;
    KahanSum pmf_cum;
    for (long t = 0; t <= n; ++t) {
        const double lterm = log2_choose(n, t) - n;
        double l_inner;
        if (!linear) {
            log_inner = logaddexp2(log_inner, lterm);
            if (log_inner >= -40.0) {
                linear = true;
                lin_inner.add(std::exp2(log_inner));
            }
            l_inner = log_inner;
        } else {
            lin_inner.add(std::exp2(lterm));
            l_inner = std::log2(lin_inner.value());
        }
        const double shifted = log2_mult + l_inner;
        if (shifted >= 0.0) {
            // min{1,...} = 1 from here on; the remaining outer mass is the
            // binomial tail, which is 1 minus what we have accumulated.
            const double rest = 1.0 - pmf_cum.value();
            if (rest > 0.0) outer.add(rest);
            break;
        }
        const double lpmf = log2_choose(n, t) + t * lp + (n - t) * lq;
        pmf_cum.add(std::exp2(lpmf));
        outer.add(std::exp2(lpmf + shifted));
    }
    return std::clamp(outer.value(), 0.0, 1.0);
}

}  // namespace

std::string to_string(XiMethod m) {
    switch (m) {
        case XiMethod::BscRcuExact: return "bsc_rcu_exact";
        case XiMethod::DmcDtConvolution: return "dmc_dt_convolution";
        case XiMethod::ExhaustiveOracle: return "exhaustive_oracle";
    }
    return "?";
}

std::string to_string(MConvention c) {
    return c == MConvention::M ? "M" : "M_minus_one";
}

double xi_bsc_log2m(int n, double log2_m, double p) {
    return xi_bsc_multiplier(n, log2_m, p);
}

double xi_bsc(int n, double message_count, double p) {
    if (!(message_count >= 1.0)) throw std::domain_error("xi_bsc: message count must be >= 1");
    return xi_bsc_multiplier(n, std::log2(message_count), p);
}

double convention_log2_multiplier(double log2_m, MConvention conv) {
    if (conv == MConvention::M) return log2_m;
    if (log2_m <= 0.0) return -kInf;  // M = 1: zero competitors
    const double down = std::exp2(-log2_m);
    if (down == 0.0) return log2_m;  // M - 1 == M at double precision
    return log2_m + std::log1p(-down) * kLog2E;
}

double xi_exact_oracle(int n, double message_count, const ChannelModel& ch,
                       MConvention conv, int oracle_limit) {
    if (n < 0) throw std::invalid_argument("xi_exact_oracle: n must be >= 0");
    if (!(message_count >= 1.0)) {
        throw std::domain_error("xi_exact_oracle: message count must be >= 1");
    }
    if (n == 0) return 1.0;
    if (n > oracle_limit) {
        throw OracleLimitError("xi_exact_oracle: n = " + std::to_string(n) +
                               " exceeds oracle limit " + std::to_string(oracle_limit));
    }
    const int in = ch.input_alphabet_size();
    const int out = ch.output_alphabet_size();
    const double work = std::pow(in, 2.0 * n) * std::pow(out, n);
    if (work > 3e7) {
        throw OracleLimitError("xi_exact_oracle: enumeration infeasible for this alphabet/n");
    }
    const double mult = conv == MConvention::M ? message_count : message_count - 1.0;
    if (mult <= 0.0) return 0.0;

    const DensityTable& table = ch.densities();
    const long num_x = static_cast<long>(std::llround(std::pow(in, n)));
    const long num_y = static_cast<long>(std::llround(std::pow(out, n)));

    // Enumerate input sequences once: symbols and canonical prior P_X^n(x^n).
    std::vector<std::vector<int>> x_seqs(num_x, std::vector<int>(n));
    std::vector<double> x_prior(num_x, 1.0);
    for (long xi = 0; xi < num_x; ++xi) {
        long rem = xi;
        for (int i = n - 1; i >= 0; --i) {
            x_seqs[xi][i] = static_cast<int>(rem % in);
            rem /= in;
        }
        for (int i = 0; i < n; ++i) x_prior[xi] *= ch.input_prob(x_seqs[xi][i]);
    }

    // Canonical density: value-class counts dotted in class order, so equal
    // class multisets give bit-identical doubles and ties stay exact.
    std::vector<long> counts(table.num_classes());
    auto density_of = [&](const std::vector<int>& xs, const std::vector<int>& ys,
                          bool& reachable) {
        std::fill(counts.begin(), counts.end(), 0L);
        reachable = true;
        for (int i = 0; i < n; ++i) {
            if (!table.reachable(xs[i], ys[i])) {
                reachable = false;
                return -kInf;
            }
            ++counts[table.value_class(xs[i], ys[i])];
        }
        double d = 0.0;
        for (int c = 0; c < table.num_classes(); ++c) {
            if (counts[c] != 0) d += static_cast<double>(counts[c]) * table.class_value(c);
        }
        return d;
    };

    std::vector<int> y_seq(n, 0);
    std::vector<double> dens(num_x);
    std::vector<double> weight(num_x);  // joint P(x^n, y^n)
    KahanSum acc;
    for (long yi = 0; yi < num_y; ++yi) {
        long rem = yi;
        for (int i = n - 1; i >= 0; --i) {
            y_seq[i] = static_cast<int>(rem % out);
            rem /= out;
        }
        for (long xi = 0; xi < num_x; ++xi) {
            bool reachable = true;
            dens[xi] = density_of(x_seqs[xi], y_seq, reachable);
            double w = x_prior[xi];
            for (int i = 0; i < n; ++i) w *= ch.transition(x_seqs[xi][i], y_seq[i]);
            weight[xi] = w;
        }
        // Competitor tail probabilities: sort (density, prior) and suffix-sum.
        std::vector<std::pair<double, double>> comp(num_x);
        for (long xi = 0; xi < num_x; ++xi) comp[xi] = {dens[xi], x_prior[xi]};
        std::sort(comp.begin(), comp.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> suffix(num_x + 1, 0.0);
        for (long i = num_x - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + comp[i].second;

        for (long xi = 0; xi < num_x; ++xi) {
            if (weight[xi] <= 0.0) continue;
            // Ties count: competitors with density >= the true density.
            const auto it = std::lower_bound(
                comp.begin(), comp.end(), dens[xi],
                [](const auto& a, double v) { return a.first < v; });
            const double q = suffix[it - comp.begin()];
            acc.add(weight[xi] * std::min(1.0, mult * q));
        }
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

DensityLattice::DensityLattice(double grid_step) : grid_step_(grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("DensityLattice: grid_step must be > 0");
    support_.emplace_back(0, 1.0);
}

DensityLattice DensityLattice::single_symbol(const ChannelModel& ch, double grid_step) {
    DensityLattice lat(grid_step);
    lat.support_.clear();
    std::map<std::int64_t, double> acc;
    const DensityTable& table = ch.densities();
    for (int x = 0; x < ch.input_alphabet_size(); ++x) {
        const double px = ch.input_prob(x);
        if (px == 0.0) continue;
        for (int y = 0; y < ch.output_alphabet_size(); ++y) {
            const double w = px * ch.transition(x, y);
            if (w == 0.0) continue;
            // Round the density DOWN to the grid; this can only inflate the
            // DT expectation, keeping the upper bound valid.
            const auto idx =
                static_cast<std::int64_t>(std::floor(table.value(x, y) / grid_step));
            acc[idx] += w;
        }
    }
    for (const auto& [idx, m] : acc) lat.support_.emplace_back(idx, m);
    if (lat.support_.empty()) {
        throw std::invalid_argument("DensityLattice: channel has no reachable mass");
    }
    return lat;
}

void DensityLattice::convolve_with(const DensityLattice& symbol) {
    if (symbol.grid_step_ != grid_step_) {
        throw std::invalid_argument("DensityLattice: mismatched grid steps");
    }
    std::vector<std::pair<std::int64_t, double>> next;
    next.reserve(support_.size() * symbol.support_.size());
    for (const auto& [ia, ma] : support_) {
        for (const auto& [ib, mb] : symbol.support_) {
            next.emplace_back(ia + ib, ma * mb);
        }
    }
    std::sort(next.begin(), next.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    support_.clear();
    for (const auto& [idx, m] : next) {
        if (!support_.empty() && support_.back().first == idx) {
            support_.back().second += m;
        } else {
            support_.emplace_back(idx, m);
        }
    }
    prune();
    const double total = total_mass();
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::logic_error("DensityLattice: mass drifted to " + std::to_string(total));
    }
}

void DensityLattice::prune() {
    double moved = 0.0;
    std::size_t keep = 0;
    for (const auto& [idx, m] : support_) {
        if (m < kPruneThreshold) {
            moved += m;
        } else {
            support_[keep++] = {idx, m};
        }
    }
    support_.resize(keep);
    if (moved > 0.0) {
        if (support_.empty()) throw std::logic_error("DensityLattice: pruned all mass");
        support_.front().second += moved;  // smallest retained density
        pruned_total_ += moved;
    }
}

double DensityLattice::dt_expectation(double log2_m) const {
    KahanSum acc;
    for (const auto& [idx, m] : support_) {
        const double excess = static_cast<double>(idx) * grid_step_ - log2_m;
        acc.add(excess > 0.0 ? m * std::exp2(-excess) : m);
    }
    return acc.value();
}

double DensityLattice::total_mass() const {
    KahanSum acc;
    for (const auto& [idx, m] : support_) acc.add(m);
    return acc.value();
}

double xi_dt_dmc(int n, double log2_m, const ChannelModel& ch, double grid_step) {
    if (n < 0) throw std::invalid_argument("xi_dt_dmc: n must be >= 0");
    if (n == 0) return 1.0;
    DensityLattice lat(grid_step);
    const DensityLattice symbol = DensityLattice::single_symbol(ch, grid_step);
    for (int i = 0; i < n; ++i) lat.convolve_with(symbol);
    return std::min(1.0, lat.dt_expectation(log2_m));
}

XiSeries::XiSeries(ChannelModel ch, double log2_m, XiMethod method, MConvention conv,
                   double grid_step, int oracle_limit, bool parallel_fill)
    : ch_(std::move(ch)),
      log2_m_(log2_m),
      method_(method),
      conv_(conv),
      grid_step_(grid_step),
      oracle_limit_(oracle_limit),
      parallel_fill_(parallel_fill),
      log2_mult_(convention_log2_multiplier(log2_m, conv)),
      lattice_(grid_step) {
    if (!(log2_m >= 0.0)) throw std::domain_error("XiSeries: log2(M) must be >= 0");
    if (method_ == XiMethod::BscRcuExact && !ch_.is_bsc()) {
        throw std::invalid_argument("XiSeries: BscRcuExact requires a BSC channel");
    }
}

double XiSeries::compute_bsc(long n) const {
    return xi_bsc_multiplier(static_cast<int>(n), log2_mult_, *ch_.crossover());
}

void XiSeries::fill_locked(long n) const {
    if (n < static_cast<long>(cache_.size())) return;
    switch (method_) {
        case XiMethod::BscRcuExact: {
            const long old = static_cast<long>(cache_.size());
            cache_.resize(n + 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel_fill_ && (n + 1 - old) > 16)
#endif
            for (long i = old; i <= n; ++i) cache_[i] = compute_bsc(i);
            break;
        }
        case XiMethod::DmcDtConvolution: {
            if (cache_.empty()) cache_.push_back(1.0);
            const DensityLattice symbol = DensityLattice::single_symbol(ch_, grid_step_);
            while (static_cast<long>(cache_.size()) <= n) {
                lattice_.convolve_with(symbol);
                ++lattice_n_;
                cache_.push_back(std::min(1.0, lattice_.dt_expectation(log2_m_)));
            }
            break;
        }
        case XiMethod::ExhaustiveOracle: {
            while (static_cast<long>(cache_.size()) <= n) {
                const long i = static_cast<long>(cache_.size());
                cache_.push_back(xi_exact_oracle(static_cast<int>(i), std::exp2(log2_m_), ch_,
                                                 conv_, oracle_limit_));
            }
            break;
        }
    }
}

double XiSeries::get(long n) const {
    if (n < 0) throw std::invalid_argument("XiSeries::get: n must be >= 0");
    std::lock_guard<std::mutex> lock(mu_);
    fill_locked(n);
    return cache_[n];
}

void XiSeries::ensure(long n) const {
    if (n < 0) return;
    std::lock_guard<std::mutex> lock(mu_);
    fill_locked(n);
}

}  // namespace vlft
