#include "vlft/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vlft {

namespace {

constexpr double kDistTol = 1e-12;

void check_probability_vector(const std::vector<double>& v, const std::string& what) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument(what + " has an entry outside [0,1]");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kDistTol) {
        throw std::invalid_argument(what + " does not sum to 1 (got " + std::to_string(sum) + ")");
    }
}

}  // namespace

DensityTable::DensityTable(int input_size, int output_size,
                           const std::vector<double>& transition_row_major,
                           const std::vector<double>& input_dist)
    : in_(input_size),
      out_(output_size),
      values_(static_cast<std::size_t>(input_size) * output_size, 0.0),
      reachable_(static_cast<std::size_t>(input_size) * output_size, 0),
      p_out_(output_size, 0.0) {
    for (int y = 0; y < out_; ++y) {
        double py = 0.0;
        for (int x = 0; x < in_; ++x) py += input_dist[x] * transition_row_major[idx(x, y)];
        p_out_[y] = py;
    }
    class_of_.assign(values_.size(), -1);
    for (int x = 0; x < in_; ++x) {
        for (int y = 0; y < out_; ++y) {
            const double pyx = transition_row_major[idx(x, y)];
            if (pyx > 0.0 && p_out_[y] > 0.0) {
                reachable_[idx(x, y)] = 1;
                const double v = std::log2(pyx / p_out_[y]);
                values_[idx(x, y)] = v;
                int cls = -1;
                for (std::size_t c = 0; c < class_values_.size(); ++c) {
                    if (class_values_[c] == v) {
                        cls = static_cast<int>(c);
                        break;
                    }
                }
                if (cls < 0) {
                    cls = static_cast<int>(class_values_.size());
                    class_values_.push_back(v);
                }
                class_of_[idx(x, y)] = cls;
            }
        }
    }
}

double DensityTable::value(int x, int y) const {
    if (!reachable(x, y)) {
        throw std::domain_error("information density undefined for unreachable pair (" +
                                std::to_string(x) + "," + std::to_string(y) + ")");
    }
    return values_[idx(x, y)];
}

namespace {

std::vector<double> flatten_checked(const std::vector<std::vector<double>>& transition,
                                    const std::vector<double>& input_dist) {
    if (transition.empty()) throw std::invalid_argument("transition matrix is empty");
    const std::size_t in = transition.size();
    const std::size_t out = transition[0].size();
    if (out == 0) throw std::invalid_argument("transition matrix has no output symbols");
    if (input_dist.size() != in) {
        throw std::invalid_argument("input_dist size does not match transition rows");
    }
    std::vector<double> flat;
    flat.reserve(in * out);
    for (std::size_t x = 0; x < in; ++x) {
        if (transition[x].size() != out) {
            throw std::invalid_argument("transition rows have inconsistent lengths");
        }
        check_probability_vector(transition[x], "transition row " + std::to_string(x));
        flat.insert(flat.end(), transition[x].begin(), transition[x].end());
    }
    check_probability_vector(input_dist, "input_dist");
    return flat;
}

bool any_zero_transition(const std::vector<double>& flat) {
    for (double v : flat) {
        if (v == 0.0) return true;
    }
    return false;
}

}  // namespace

ChannelModel::ChannelModel(std::vector<std::vector<double>> transition,
                           std::vector<double> input_dist)
    : in_(static_cast<int>(transition.size())),
      out_(static_cast<int>(transition.empty() ? 0 : transition[0].size())),
      transition_(flatten_checked(transition, input_dist)),
      input_dist_(std::move(input_dist)),
      crossover_(std::nullopt),
      has_zero_transitions_(any_zero_transition(transition_)),
      table_(in_, out_, transition_, input_dist_) {}

ChannelModel make_bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("BSC crossover probability must be in [0,1]");
    }
    ChannelModel ch({{1.0 - p, p}, {p, 1.0 - p}}, {0.5, 0.5});
    ch.crossover_ = p;
    return ch;
}

double information_density(const ChannelModel& ch, std::span<const int> x_seq,
                           std::span<const int> y_seq) {
    if (x_seq.size() != y_seq.size()) {
        throw std::invalid_argument("information_density: sequence lengths differ");
    }
    const DensityTable& table = ch.densities();
    const int in = table.input_size();
    const int out = table.output_size();
    std::vector<long> counts(table.num_classes(), 0);
    for (std::size_t i = 0; i < x_seq.size(); ++i) {
        const int x = x_seq[i];
        const int y = y_seq[i];
        if (x < 0 || x >= in || y < 0 || y >= out) {
            throw std::domain_error("information_density: symbol outside alphabet");
        }
        if (!table.reachable(x, y)) {
            throw std::domain_error("information_density: unreachable (x,y) pair at position " +
                                    std::to_string(i));
        }
        ++counts[table.value_class(x, y)];
    }
    double sum = 0.0;
    for (int c = 0; c < table.num_classes(); ++c) {
        if (counts[c] != 0) sum += static_cast<double>(counts[c]) * table.class_value(c);
    }
    return sum;
}

double capacity(const ChannelModel& ch) {
    const DensityTable& table = ch.densities();
    double sum = 0.0;
    for (int x = 0; x < ch.input_alphabet_size(); ++x) {
        const double px = ch.input_prob(x);
        if (px == 0.0) continue;
        for (int y = 0; y < ch.output_alphabet_size(); ++y) {
            const double pyx = ch.transition(x, y);
            if (pyx == 0.0) continue;
            sum += px * pyx * table.value(x, y);
        }
    }
    return std::max(0.0, sum);
}

double lautum(const ChannelModel& ch) {
    const DensityTable& table = ch.densities();
    double sum = 0.0;
    for (int x = 0; x < ch.input_alphabet_size(); ++x) {
        const double px = ch.input_prob(x);
        if (px == 0.0) continue;
        for (int y = 0; y < ch.output_alphabet_size(); ++y) {
            const double py = table.output_marginal(y);
            if (py == 0.0) continue;
            if (!table.reachable(x, y)) {
                // P(y|x) = 0 on a pair the product measure hits: divergent.
                return std::numeric_limits<double>::infinity();
            }
            sum += px * py * table.value(x, y);
        }
    }
    return std::max(0.0, -sum);
}

}  // namespace vlft
