#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlft/latency.hpp"
#include "vlft/sim.hpp"

namespace vlft {

struct CurveSpec {
    std::string label;
    BoundKind kind = BoundKind::Infinite;
    BlockLengthPolicy block_length;
    IncrementPolicy increment = IncrementPolicy::fixed(1);
    long n1 = 0;         // 0 -> default: Combined uses I, Periodic uses 1
    long m_override = 0; // 0 -> default_attempts / derived from the block policy
    std::optional<XiMethod> xi_method;
    std::optional<MConvention> convention;
    double arq_lo_factor = 1.0;  // ARQ scan range [ceil(lo*k/C), ceil(hi*k/C)]
    double arq_hi_factor = 4.0;
    bool simulate = false;  // fill sim columns (needs a simulation block)
    std::optional<SimVariant> sim_variant;  // default: derived from kind
};

struct SimBlock {
    long trials = 10000;
    std::uint64_t seed = 1;
};

struct SweepConfig {
    std::optional<ChannelModel> channel;
    std::vector<double> k_list;
    std::vector<CurveSpec> curves;
    std::optional<XiMethod> xi_method;  // default: BSC -> exact, else DT
    MConvention convention = MConvention::M;
    double grid_step = 1e-4;
    std::optional<SimBlock> simulation;
    std::string output_path;
    int threads = 0;
};

// One output row. Schedule fields use +inf for unbounded values; an
// infeasible point keeps its schedule and reports ell = +inf, throughput 0.
struct SweepRow {
    std::string label;
    double k = 0;
    double m_log2 = 0;
    double block_length = 0;  // N
    double n1 = 0;
    double increment = 0;  // I
    double attempts = 0;   // m
    double ell = 0;
    double epsilon = 0;
    double throughput = 0;
    double converse_log_m = 0;
    std::optional<double> sim_mean;
    std::optional<double> sim_stderr;
    bool infeasible = false;
};

std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> parse_csv(std::istream& in);

// Accepts a JSON file path or a builtin preset name ("fig1", "fig2").
SweepConfig load_config(const std::string& path_or_preset);
SweepConfig parse_config(const nlohmann::json& doc);

std::vector<std::string> preset_names();
nlohmann::json preset_json(const std::string& name);

}  // namespace vlft
