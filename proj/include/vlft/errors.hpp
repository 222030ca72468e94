#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vlft {

// Restart-based schedule whose block end has xi_N >= 1: the renewal bound diverges.
class InfeasibleScheduleError : public std::runtime_error {
public:
    InfeasibleScheduleError(std::string msg, double xi_at_block_end)
        : std::runtime_error(std::move(msg)), xi_at_block_end_(xi_at_block_end) {}
    double xi_at_block_end() const { return xi_at_block_end_; }

private:
    double xi_at_block_end_;
};

// Infinite-horizon sum that did not meet the tail policy within its iteration cap.
// Carries the partial sum so callers can inspect how far it got.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string msg, double partial_sum, long last_time)
        : std::runtime_error(std::move(msg)), partial_sum_(partial_sum), last_time_(last_time) {}
    double partial_sum() const { return partial_sum_; }
    long last_time() const { return last_time_; }

private:
    double partial_sum_;
    long last_time_;
};

class OracleLimitError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Config validation collects every problem before failing.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string out = "invalid config:";
        for (const auto& p : ps) {
            out += "\n  - ";
            out += p;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

}  // namespace vlft
