#include "vlft/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "vlft/errors.hpp"
#include "vlft/parallel.hpp"
#include "vlft/rng.hpp"

namespace vlft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using nlohmann::json;

const std::vector<double> kDefaultKGrid = {8,  12, 16,  24,  32,  48, 64,
                                           96, 128, 192, 256, 384, 512};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

long ceil_snap(double x) { return static_cast<long>(std::ceil(x - 1e-9)); }

long ceil_div(long a, long b) { return a <= 0 ? 0 : (a + b - 1) / b; }

// --- config parsing --------------------------------------------------------

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& context, std::vector<std::string>& problems) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            problems.push_back("unknown key '" + it.key() + "' in " + context);
        }
    }
}

double get_number(const json& j, const std::string& key, const std::string& context,
                  std::vector<std::string>& problems, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        problems.push_back("'" + key + "' in " + context + " must be a number");
        return fallback;
    }
    return j.at(key).get<double>();
}

std::optional<ChannelModel> parse_channel(const json& j, std::vector<std::string>& problems) {
    if (!j.is_object()) {
        problems.push_back("'channel' must be an object ({\"bsc\": p} or a transition matrix)");
        return std::nullopt;
    }
    check_keys(j, {"bsc", "transition", "input_dist"}, "channel", problems);
    try {
        if (j.contains("bsc")) {
            if (j.contains("transition") || j.contains("input_dist")) {
                problems.push_back("channel: give either 'bsc' or a transition matrix, not both");
                return std::nullopt;
            }
            if (!j.at("bsc").is_number()) {
                problems.push_back("channel.bsc must be a number");
                return std::nullopt;
            }
            return make_bsc(j.at("bsc").get<double>());
        }
        if (j.contains("transition") && j.contains("input_dist")) {
            auto transition = j.at("transition").get<std::vector<std::vector<double>>>();
            auto input_dist = j.at("input_dist").get<std::vector<double>>();
            return ChannelModel(std::move(transition), std::move(input_dist));
        }
        problems.push_back("channel: needs 'bsc' or both 'transition' and 'input_dist'");
    } catch (const std::exception& e) {
        problems.push_back(std::string("channel: ") + e.what());
    }
    return std::nullopt;
}

std::optional<XiMethod> parse_method(const json& j, const std::string& context,
                                     std::vector<std::string>& problems) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "bsc_rcu_exact") return XiMethod::BscRcuExact;
    if (s == "dmc_dt_convolution") return XiMethod::DmcDtConvolution;
    if (s == "exhaustive_oracle") return XiMethod::ExhaustiveOracle;
    problems.push_back("unknown xi_method '" + s + "' in " + context);
    return std::nullopt;
}

std::optional<MConvention> parse_convention(const json& j, const std::string& context,
                                            std::vector<std::string>& problems) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "M") return MConvention::M;
    if (s == "M_minus_one") return MConvention::MMinusOne;
    problems.push_back("unknown m_convention '" + s + "' in " + context);
    return std::nullopt;
}

std::optional<SimVariant> parse_variant(const json& j, const std::string& context,
                                        std::vector<std::string>& problems) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "truncated") return SimVariant::Truncated;
    if (s == "repeated") return SimVariant::Repeated;
    if (s == "infinite_capped") return SimVariant::InfiniteCapped;
    problems.push_back("unknown sim variant '" + s + "' in " + context);
    return std::nullopt;
}

std::optional<BoundKind> parse_kind(const std::string& s) {
    if (s == "infinite") return BoundKind::Infinite;
    if (s == "truncated") return BoundKind::Truncated;
    if (s == "repeated") return BoundKind::Repeated;
    if (s == "periodic") return BoundKind::Periodic;
    if (s == "combined") return BoundKind::Combined;
    if (s == "arq") return BoundKind::Arq;
    return std::nullopt;
}

BlockLengthPolicy parse_block_policy(const json& j, const std::string& context,
                                     std::vector<std::string>& problems) {
    BlockLengthPolicy p;
    if (!j.is_object()) {
        problems.push_back(context + ".block_length must be an object");
        return p;
    }
    check_keys(j, {"policy", "N", "delta_frac", "a", "b"}, context + ".block_length", problems);
    const std::string kind = j.value("policy", "");
    if (kind == "fixed") {
        p = BlockLengthPolicy::fixed(static_cast<long>(
            get_number(j, "N", context + ".block_length", problems, 0)));
        if (p.fixed_n < 1) problems.push_back(context + ".block_length.N must be >= 1");
    } else if (kind == "log_over_c_delta") {
        const double d = get_number(j, "delta_frac", context + ".block_length", problems, 0.0);
        if (!(d > 0.0 && d < 1.0)) {
            problems.push_back(context + ".block_length.delta_frac must be in (0,1)");
        }
        p = BlockLengthPolicy::log_over_c_delta(d);
    } else if (kind == "ell_plus_log") {
        const double a = get_number(j, "a", context + ".block_length", problems, 0.0);
        const double b = get_number(j, "b", context + ".block_length", problems, 0.0);
        if (a < 0 || b < 0) problems.push_back(context + ".block_length: a, b must be >= 0");
        p = BlockLengthPolicy::ell_plus_log(a, b);
    } else {
        problems.push_back("unknown block_length policy '" + kind + "' in " + context);
    }
    return p;
}

IncrementPolicy parse_increment_policy(const json& j, const std::string& context,
                                       std::vector<std::string>& problems) {
    IncrementPolicy p = IncrementPolicy::fixed(1);
    if (!j.is_object()) {
        problems.push_back(context + ".increment must be an object");
        return p;
    }
    check_keys(j, {"policy", "I", "c"}, context + ".increment", problems);
    const std::string kind = j.value("policy", "");
    if (kind == "fixed") {
        p = IncrementPolicy::fixed(
            static_cast<long>(get_number(j, "I", context + ".increment", problems, 1)));
        if (p.fixed_i < 1) problems.push_back(context + ".increment.I must be >= 1");
    } else if (kind == "loglog") {
        p = IncrementPolicy::loglog();
    } else if (kind == "linear_log") {
        const double c = get_number(j, "c", context + ".increment", problems, 0.15);
        if (!(c > 0.0)) problems.push_back(context + ".increment.c must be > 0");
        p = IncrementPolicy::linear_log(c);
    } else {
        problems.push_back("unknown increment policy '" + kind + "' in " + context);
    }
    return p;
}

CurveSpec parse_curve(const json& j, int index, std::vector<std::string>& problems) {
    CurveSpec c;
    const std::string context = "curves[" + std::to_string(index) + "]";
    if (!j.is_object()) {
        problems.push_back(context + " must be an object");
        return c;
    }
    check_keys(j,
               {"label", "kind", "block_length", "increment", "n1", "m", "xi_method",
                "m_convention", "arq_range", "simulate", "sim_variant"},
               context, problems);
    c.label = j.value("label", "");
    if (c.label.empty()) problems.push_back(context + ": 'label' is required");
    if (c.label.find(',') != std::string::npos || c.label.find('\n') != std::string::npos) {
        problems.push_back(context + ": label must not contain commas or newlines");
    }
    const std::string kind_s = j.value("kind", "");
    if (auto k = parse_kind(kind_s)) {
        c.kind = *k;
    } else {
        problems.push_back(context + ": unknown kind '" + kind_s + "'");
        return c;
    }
    const bool needs_block = c.kind == BoundKind::Truncated || c.kind == BoundKind::Repeated ||
                             c.kind == BoundKind::Combined;
    if (j.contains("block_length")) {
        c.block_length = parse_block_policy(j.at("block_length"), context, problems);
    } else if (needs_block) {
        problems.push_back(context + ": kind '" + kind_s + "' requires 'block_length'");
    }
    if (j.contains("increment")) {
        c.increment = parse_increment_policy(j.at("increment"), context, problems);
    }
    c.n1 = static_cast<long>(get_number(j, "n1", context, problems, 0));
    if (j.contains("n1") && c.n1 < 1) problems.push_back(context + ".n1 must be >= 1");
    c.m_override = static_cast<long>(get_number(j, "m", context, problems, 0));
    if (j.contains("m") && c.m_override < 1) problems.push_back(context + ".m must be >= 1");
    if (j.contains("xi_method")) {
        c.xi_method = parse_method(j.at("xi_method"), context, problems);
    }
    if (j.contains("m_convention")) {
        c.convention = parse_convention(j.at("m_convention"), context, problems);
    }
    if (j.contains("arq_range")) {
        const json& r = j.at("arq_range");
        check_keys(r, {"lo_factor", "hi_factor"}, context + ".arq_range", problems);
        c.arq_lo_factor = get_number(r, "lo_factor", context + ".arq_range", problems, 1.0);
        c.arq_hi_factor = get_number(r, "hi_factor", context + ".arq_range", problems, 4.0);
        if (!(c.arq_lo_factor > 0.0) || c.arq_hi_factor < c.arq_lo_factor) {
            problems.push_back(context + ".arq_range: need 0 < lo_factor <= hi_factor");
        }
    }
    if (j.contains("simulate")) {
        if (!j.at("simulate").is_boolean()) {
            problems.push_back(context + ".simulate must be a boolean");
        } else {
            c.simulate = j.at("simulate").get<bool>();
        }
    }
    if (j.contains("sim_variant")) {
        c.sim_variant = parse_variant(j.at("sim_variant"), context, problems);
    }
    return c;
}

}  // namespace

SweepConfig parse_config(const json& doc) {
    std::vector<std::string> problems;
    SweepConfig cfg;
    if (!doc.is_object()) {
        throw ConfigError({"config root must be a JSON object"});
    }
    check_keys(doc,
               {"channel", "k_list", "curves", "xi_method", "m_convention", "grid_step",
                "simulation", "output", "threads"},
               "config", problems);

    if (doc.contains("channel")) {
        cfg.channel = parse_channel(doc.at("channel"), problems);
    } else {
        problems.push_back("missing 'channel'");
    }

    if (doc.contains("k_list")) {
        if (!doc.at("k_list").is_array() || doc.at("k_list").empty()) {
            problems.push_back("'k_list' must be a nonempty array");
        } else {
            for (const auto& v : doc.at("k_list")) {
                if (!v.is_number()) {
                    problems.push_back("'k_list' entries must be numbers");
                    break;
                }
                cfg.k_list.push_back(v.get<double>());
            }
            for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
                const double k = cfg.k_list[i];
                if (std::abs(k - std::round(k)) > 1e-9 || k < 1) {
                    problems.push_back("'k_list' entries must be integers >= 1 (got " +
                                       std::to_string(k) + ")");
                    break;
                }
                if (i > 0 && !(cfg.k_list[i] > cfg.k_list[i - 1])) {
                    problems.push_back("'k_list' must be strictly increasing");
                    break;
                }
            }
        }
    } else {
        cfg.k_list = kDefaultKGrid;
    }

    if (doc.contains("curves")) {
        if (!doc.at("curves").is_array()) {
            problems.push_back("'curves' must be an array");
        } else {
            int idx = 0;
            for (const auto& cj : doc.at("curves")) {
                cfg.curves.push_back(parse_curve(cj, idx++, problems));
            }
            for (std::size_t i = 0; i < cfg.curves.size(); ++i) {
                for (std::size_t j = i + 1; j < cfg.curves.size(); ++j) {
                    if (!cfg.curves[i].label.empty() &&
                        cfg.curves[i].label == cfg.curves[j].label) {
                        problems.push_back("duplicate curve label '" + cfg.curves[i].label + "'");
                    }
                }
            }
        }
    } else {
        problems.push_back("missing 'curves'");
    }

    if (doc.contains("xi_method")) {
        cfg.xi_method = parse_method(doc.at("xi_method"), "config", problems);
    }
    if (doc.contains("m_convention")) {
        if (auto c = parse_convention(doc.at("m_convention"), "config", problems)) {
            cfg.convention = *c;
        }
    }
    cfg.grid_step = get_number(doc, "grid_step", "config", problems, 1e-4);
    if (!(cfg.grid_step > 0.0)) problems.push_back("'grid_step' must be > 0");

    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        check_keys(s, {"trials", "seed"}, "simulation", problems);
        SimBlock sim{};
        sim.trials = static_cast<long>(get_number(s, "trials", "simulation", problems, 10000));
        if (sim.trials < 1) problems.push_back("simulation.trials must be >= 1");
        sim.seed = static_cast<std::uint64_t>(get_number(s, "seed", "simulation", problems, 1));
        cfg.simulation = sim;
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, {"path", "format"}, "output", problems);
        cfg.output_path = o.value("path", "");
        const std::string fmt = o.value("format", "csv");
        if (fmt != "csv") problems.push_back("output.format: only 'csv' is supported");
    }
    if (doc.contains("threads")) {
        cfg.threads = static_cast<int>(get_number(doc, "threads", "config", problems, 0));
    }

    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2"}; }

json preset_json(const std::string& name) {
    json doc;
    doc["channel"] = {{"bsc", 0.0789}};
    doc["k_list"] = kDefaultKGrid;
    if (name == "fig1") {
        doc["curves"] = json::array({
            {{"label", "n_infinite"}, {"kind", "infinite"}},
            {{"label", "ell_plus_log_a10_b30"},
             {"kind", "repeated"},
             {"block_length", {{"policy", "ell_plus_log"}, {"a", 10.0}, {"b", 30.0}}}},
            {{"label", "delta_0.3C"},
             {"kind", "repeated"},
             {"block_length", {{"policy", "log_over_c_delta"}, {"delta_frac", 0.3}}}},
            {{"label", "delta_0.4C"},
             {"kind", "repeated"},
             {"block_length", {{"policy", "log_over_c_delta"}, {"delta_frac", 0.4}}}},
        });
        return doc;
    }
    if (name == "fig2") {
        const json block = {{"policy", "log_over_c_delta"}, {"delta_frac", 0.4}};
        doc["curves"] = json::array({
            {{"label", "I_1"},
             {"kind", "combined"},
             {"block_length", block},
             {"increment", {{"policy", "fixed"}, {"I", 1}}}},
            {{"label", "I_loglog"},
             {"kind", "combined"},
             {"block_length", block},
             {"increment", {{"policy", "loglog"}}}},
            {{"label", "I_linear_0.15"},
             {"kind", "combined"},
             {"block_length", block},
             {"increment", {{"policy", "linear_log"}, {"c", 0.15}}}},
            {{"label", "arq_nstar"}, {"kind", "arq"}},
        });
        return doc;
    }
    throw ConfigError({"unknown preset '" + name + "'"});
}

SweepConfig load_config(const std::string& path_or_preset) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), path_or_preset) != names.end()) {
        return parse_config(preset_json(path_or_preset));
    }
    std::ifstream in(path_or_preset);
    if (!in) {
        throw ConfigError({"cannot open config file: " + path_or_preset});
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError({std::string("JSON parse error in ") + path_or_preset + ": " +
                           e.what()});
    }
    return parse_config(doc);
}

// --- sweep evaluation -------------------------------------------------------

namespace {

struct PointResult {
    SweepRow row;
    bool wants_sim = false;
    SimVariant sim_variant = SimVariant::Repeated;
    DecodingSchedule sim_schedule;
};

XiMethod default_method(const SweepConfig& cfg) {
    if (cfg.xi_method) return *cfg.xi_method;
    return cfg.channel->is_bsc() ? XiMethod::BscRcuExact : XiMethod::DmcDtConvolution;
}

PointResult evaluate_point(const SweepConfig& cfg, const CurveSpec& curve, double k,
                           XiSeries& xi, double cap_c) {
    PointResult pr;
    SweepRow& row = pr.row;
    row.label = curve.label;
    row.k = k;
    row.m_log2 = k;

    DecodingSchedule sched;
    LatencyBound bound;
    bool infeasible = false;
    double xi_block_end = 0.0;

    try {
        switch (curve.kind) {
            case BoundKind::Infinite: {
                sched = {1, 1, std::nullopt};
                bound = ell_infinite(xi);
                break;
            }
            case BoundKind::Truncated: {
                const long n = choose_block_length(curve.block_length, k, cap_c);
                sched = {1, 1, n};
                bound = ell_truncated(xi, n);
                break;
            }
            case BoundKind::Repeated: {
                const long n = choose_block_length(curve.block_length, k, cap_c);
                sched = {1, 1, n};
                bound = ell_repeated(xi, n);
                break;
            }
            case BoundKind::Periodic: {
                const long inc = choose_increment(curve.increment, k);
                const long n1 = curve.n1 > 0 ? curve.n1 : 1;
                sched = {n1, inc, std::nullopt};
                bound = ell_periodic(xi, n1, inc);
                break;
            }
            case BoundKind::Combined: {
                const long inc = choose_increment(curve.increment, k);
                const long n1 = curve.n1 > 0 ? curve.n1 : inc;
                long m = curve.m_override;
                if (m <= 0) {
                    if (curve.block_length.kind == BlockLengthPolicy::Kind::LogOverCDelta) {
                        m = default_attempts(k, cap_c, curve.block_length.delta_frac, n1, inc);
                    } else {
                        const long target = choose_block_length(curve.block_length, k, cap_c);
                        m = 1 + ceil_div(target - n1, inc);
                    }
                }
                sched = {n1, inc, m};
                bound = ell_combined(xi, sched);
                break;
            }
            case BoundKind::Arq: {
                const long lo = std::max<long>(1, ceil_snap(curve.arq_lo_factor * k / cap_c));
                const long hi = std::max<long>(lo, ceil_snap(curve.arq_hi_factor * k / cap_c));
                auto [n_star, b] = arq_optimize(xi, lo, hi);
                sched = {n_star, n_star, 1};
                bound = b;
                break;
            }
        }
    } catch (const InfeasibleScheduleError& e) {
        infeasible = true;
        xi_block_end = e.xi_at_block_end();
    } catch (const NonConvergenceError&) {
        infeasible = true;
        xi_block_end = 1.0;
    }

    row.n1 = static_cast<double>(sched.n1);
    row.increment = static_cast<double>(sched.increment);
    row.attempts = sched.attempts ? static_cast<double>(*sched.attempts) : kInf;
    row.block_length = sched.attempts ? static_cast<double>(sched.block_length()) : kInf;

    if (infeasible) {
        row.infeasible = true;
        row.ell = kInf;
        row.epsilon = std::min(1.0, xi_block_end);
        row.throughput = 0.0;
        row.converse_log_m = kInf;
        return pr;
    }

    row.ell = bound.expected_latency;
    row.epsilon = bound.error_bound;
    row.throughput = bound.throughput;
    row.converse_log_m = converse_max_log_m(bound.expected_latency, cap_c);

    if (curve.simulate && cfg.simulation) {
        pr.wants_sim = true;
        pr.sim_schedule = sched;
        if (curve.sim_variant) {
            pr.sim_variant = *curve.sim_variant;
        } else {
            switch (curve.kind) {
                case BoundKind::Truncated: pr.sim_variant = SimVariant::Truncated; break;
                case BoundKind::Infinite:
                case BoundKind::Periodic: pr.sim_variant = SimVariant::InfiniteCapped; break;
                case BoundKind::Arq:
                    pr.sim_variant = SimVariant::Repeated;
                    pr.sim_schedule = {sched.n1, 1, 1};
                    break;
                default: pr.sim_variant = SimVariant::Repeated; break;
            }
        }
        if (pr.sim_variant == SimVariant::InfiniteCapped) {
            pr.sim_schedule.attempts = std::nullopt;
        }
    }
    return pr;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    if (!cfg.channel) throw ConfigError({"sweep config has no channel"});
    for (const auto& c : cfg.curves) {
        if (c.label.empty()) throw ConfigError({"curve with empty label"});
    }
    const double cap_c = capacity(*cfg.channel);
    const auto n_k = static_cast<long>(cfg.k_list.size());
    const auto n_curves = static_cast<long>(cfg.curves.size());
    std::vector<PointResult> results(static_cast<std::size_t>(n_k) * n_curves);

    const int threads = effective_threads(cfg.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1 && n_k > 1)
#endif
    for (long ki = 0; ki < n_k; ++ki) {
        const double k = cfg.k_list[ki];
        // One series per (method, convention) shared by all curves at this k.
        std::map<std::pair<XiMethod, MConvention>, std::unique_ptr<XiSeries>> series;
        for (long ci = 0; ci < n_curves; ++ci) {
            const CurveSpec& curve = cfg.curves[ci];
            const XiMethod method = curve.xi_method.value_or(default_method(cfg));
            const MConvention conv = curve.convention.value_or(cfg.convention);
            auto key = std::make_pair(method, conv);
            auto it = series.find(key);
            if (it == series.end()) {
                it = series
                         .emplace(key, std::make_unique<XiSeries>(*cfg.channel, k, method, conv,
                                                                  cfg.grid_step))
                         .first;
            }
            results[ci * n_k + ki] = evaluate_point(cfg, curve, k, *it->second, cap_c);
        }
    }

    // Simulation pass (serial over rows; trials parallelize internally).
    if (cfg.simulation) {
        for (auto& pr : results) {
            if (!pr.wants_sim || pr.row.infeasible) continue;
            SimConfig sc{.channel = *cfg.channel};
            sc.k_bits = static_cast<int>(std::llround(pr.row.k));
            sc.schedule = pr.sim_schedule;
            sc.variant = pr.sim_variant;
            sc.trials = cfg.simulation->trials;
            sc.base_seed = mix64(cfg.simulation->seed ^ fnv1a(pr.row.label) ^
                                 static_cast<std::uint64_t>(std::llround(pr.row.k)));
            SimOptions so;
            so.threads = cfg.threads;
            const SimEstimate est = simulate_vlft(sc, so);
            pr.row.sim_mean = est.mean_tau;
            pr.row.sim_stderr = est.std_error;
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(results.size());
    for (auto& pr : results) rows.push_back(std::move(pr.row));
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.label != b.label) return a.label < b.label;
        return a.k < b.k;
    });
    return rows;
}

// --- CSV --------------------------------------------------------------------

namespace {

const char* kCsvHeader =
    "label,k,M_log2,N,n_1,I,m,ell,epsilon,throughput,converse_log_m,sim_mean,sim_stderr";

std::string fmt_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_num(*v) : std::string();
}

}  // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.label;
        out += ',';
        out += fmt_num(r.k);
        out += ',';
        out += fmt_num(r.m_log2);
        out += ',';
        out += fmt_num(r.block_length);
        out += ',';
        out += fmt_num(r.n1);
        out += ',';
        out += fmt_num(r.increment);
        out += ',';
        out += fmt_num(r.attempts);
        out += ',';
        out += fmt_num(r.ell);
        out += ',';
        out += fmt_num(r.epsilon);
        out += ',';
        out += fmt_num(r.throughput);
        out += ',';
        out += fmt_num(r.converse_log_m);
        out += ',';
        out += fmt_opt(r.sim_mean);
        out += ',';
        out += fmt_opt(r.sim_stderr);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open output file: " + path);
    out << rows_to_csv(rows);
    if (!out) throw std::runtime_error("emit_csv: write failed for: " + path);
}

std::vector<SweepRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty input");
    if (line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header: " + line);
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cells.size() != 13) {
            throw std::runtime_error("parse_csv: expected 13 columns, got " +
                                     std::to_string(cells.size()));
        }
        auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
        SweepRow r;
        r.label = cells[0];
        r.k = num(cells[1]);
        r.m_log2 = num(cells[2]);
        r.block_length = num(cells[3]);
        r.n1 = num(cells[4]);
        r.increment = num(cells[5]);
        r.attempts = num(cells[6]);
        r.ell = num(cells[7]);
        r.epsilon = num(cells[8]);
        r.throughput = num(cells[9]);
        r.converse_log_m = num(cells[10]);
        if (!cells[11].empty()) r.sim_mean = num(cells[11]);
        if (!cells[12].empty()) r.sim_stderr = num(cells[12]);
        r.infeasible = std::isinf(r.ell);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace vlft
