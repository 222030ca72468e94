#pragma once

#include <optional>
#include <span>
#include <vector>

namespace vlft {

// Per-symbol information density i(x;y) = log2(P(y|x)/P_Y(y)) for every (x,y)
// pair, together with the output marginal P_Y induced by the input
// distribution. Pairs with P(y|x) = 0 are tagged unreachable instead of
// carrying -inf values.
class DensityTable {
public:
    DensityTable(int input_size, int output_size,
                 const std::vector<double>& transition_row_major,
                 const std::vector<double>& input_dist);

    int input_size() const { return in_; }
    int output_size() const { return out_; }

    bool reachable(int x, int y) const { return reachable_[idx(x, y)] != 0; }
    // Density in bits; throws std::domain_error for unreachable pairs.
    double value(int x, int y) const;
    double output_marginal(int y) const { return p_out_[y]; }

    // Reachable pairs grouped by bit-identical density value. Sequence
    // densities are computed as class-count dot products in class order, so
    // two sequences with the same class counts get bit-identical densities
    // and decoder ties stay exact.
    int num_classes() const { return static_cast<int>(class_values_.size()); }
    int value_class(int x, int y) const { return class_of_[idx(x, y)]; }  // -1 if unreachable
    double class_value(int c) const { return class_values_[c]; }

private:
    int idx(int x, int y) const { return x * out_ + y; }
    int in_;
    int out_;
    std::vector<double> values_;
    std::vector<unsigned char> reachable_;
    std::vector<double> p_out_;
    std::vector<int> class_of_;
    std::vector<double> class_values_;
};

// Discrete memoryless channel with a fixed input distribution. Immutable
// after construction; the density table and output marginal are computed
// once and cached.
class ChannelModel {
public:
    ChannelModel(std::vector<std::vector<double>> transition, std::vector<double> input_dist);

    int input_alphabet_size() const { return in_; }
    int output_alphabet_size() const { return out_; }
    double transition(int x, int y) const { return transition_[x * out_ + y]; }
    double input_prob(int x) const { return input_dist_[x]; }

    std::optional<double> crossover() const { return crossover_; }
    bool is_bsc() const { return crossover_.has_value(); }

    const DensityTable& densities() const { return table_; }

    // True when some input can produce an output that another input cannot;
    // the information density then has no uniform bound over sequences.
    bool has_zero_transitions() const { return has_zero_transitions_; }

private:
    friend ChannelModel make_bsc(double p);
    int in_;
    int out_;
    std::vector<double> transition_;  // row-major P(y|x)
    std::vector<double> input_dist_;
    std::optional<double> crossover_;
    bool has_zero_transitions_;
    DensityTable table_;
};

ChannelModel make_bsc(double p);

// i(x^n;y^n) in bits, summed canonically over pair counts so that equal
// pair multisets give bit-identical values (ties in decoders stay exact).
// Empty sequences return exactly 0.
double information_density(const ChannelModel& ch, std::span<const int> x_seq,
                           std::span<const int> y_seq);

// E[i(X;Y)] in bits under the stored input distribution.
double capacity(const ChannelModel& ch);

// Lautum information L = -E[i(Xbar;Y)] with Xbar ~ P_X independent of Y.
// Returns +infinity when some pair with P_X(x)P_Y(y) > 0 has P(y|x) = 0.
double lautum(const ChannelModel& ch);

}  // namespace vlft
