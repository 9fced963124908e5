#pragma once

// Experiment execution and CSV output.
//
// Trace file columns (fixed order):
//   slot, avg_reward, avg_reward_normalized, accumulated_regret, pct_correct,
//   chosen_arm, oracle_arm, accumulated_pseudo_regret
// Metric columns are seed means; chosen_arm and oracle_arm come from the first seed.
//
// Summary columns:
//   policy, kind, num_seeds, final_avg_reward_mean, final_avg_reward_std,
//   final_avg_reward_normalized_mean, final_avg_reward_normalized_std,
//   final_regret_mean, final_regret_std, final_pct_correct_mean, final_pct_correct_std

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "plcbandit/config.hpp"
#include "plcbandit/errors.hpp"
#include "plcbandit/simulator.hpp"

namespace plcbandit {

/// Output directory or file could not be written.
class IoError : public Error
{
public:
    using Error::Error;
};

inline constexpr std::string_view kTraceHeader =
    "slot,avg_reward,avg_reward_normalized,accumulated_regret,pct_correct,chosen_arm,oracle_arm,accumulated_pseudo_regret";
inline constexpr std::string_view kSummaryHeader =
    "policy,kind,num_seeds,final_avg_reward_mean,final_avg_reward_std,final_avg_reward_normalized_mean,"
    "final_avg_reward_normalized_std,final_regret_mean,final_regret_std,final_pct_correct_mean,final_pct_correct_std";
inline constexpr std::string_view kSweepSummaryHeader =
    "parameter,value,policy,kind,num_seeds,final_avg_reward_mean,final_avg_reward_std,final_avg_reward_normalized_mean,"
    "final_avg_reward_normalized_std,final_regret_mean,final_regret_std,final_pct_correct_mean,final_pct_correct_std";

namespace detail {

inline void append_number(std::string& out, double v)
{
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

inline std::string trace_csv(const AggregateMetrics& m)
{
    std::string out(kTraceHeader);
    out += '\n';
    out.reserve(m.avg_reward.mean.size() * 160);
    for (std::size_t i = 0; i < m.avg_reward.mean.size(); ++i)
    {
        out += std::to_string(i + 1);
        for (double v : {m.avg_reward.mean[i], m.avg_reward_normalized.mean[i], m.accumulated_regret.mean[i], m.pct_correct.mean[i]})
        {
            out += ',';
            append_number(out, v);
        }
        out += ',';
        out += std::to_string(m.chosen_arms[i]);
        out += ',';
        out += std::to_string(m.oracle_arms[i]);
        out += ',';
        append_number(out, m.accumulated_pseudo_regret.mean[i]);
        out += '\n';
    }
    return out;
}

inline std::string summary_fields(const AggregateMetrics& m)
{
    std::string out = m.label + ',' + std::string(to_string(m.kind)) + ',' + std::to_string(m.num_seeds);
    for (const FinalStats* s : {&m.final_avg_reward, &m.final_avg_reward_normalized, &m.final_regret, &m.final_pct_correct})
    {
        out += ',';
        append_number(out, s->mean);
        out += ',';
        append_number(out, s->stddev);
    }
    return out;
}

/// Tracks written files so a failed experiment leaves nothing behind.
class OutputSet
{
public:
    explicit OutputSet(std::filesystem::path dir)
        : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
        {
            throw IoError("cannot create output directory '" + dir_.string() + "'");
        }
    }

    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet()
    {
        if (!committed_)
        {
            for (const auto& p : written_)
            {
                std::error_code ec;
                std::filesystem::remove(p, ec);
            }
        }
    }

    std::filesystem::path write(const std::string& name, const std::string& contents)
    {
        const std::filesystem::path path = dir_ / name;
        written_.push_back(path);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out)
        {
            throw IoError("cannot write '" + path.string() + "'");
        }
        return path;
    }

    void commit() { committed_ = true; }
    const std::vector<std::filesystem::path>& files() const { return written_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

inline std::string format_value(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

} // namespace detail

inline std::string trace_file_name(const std::string& label) { return "trace_" + label + ".csv"; }

inline std::vector<AggregateMetrics> simulate(const ExperimentConfig& config)
{
    const Scenario scenario = to_scenario(config);
    const std::vector<PolicySpec> policies = to_policy_specs(config);
    return replicate(scenario, policies, static_cast<std::size_t>(config.execution.num_seeds),
                     static_cast<std::size_t>(config.execution.parallelism));
}

/// Runs every configured policy and writes one trace per policy plus summary.csv.
/// Returns the written paths.
inline std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir)
{
    const std::vector<AggregateMetrics> results = simulate(config);
    detail::OutputSet out(output_dir);
    std::string summary(kSummaryHeader);
    summary += '\n';
    for (const AggregateMetrics& m : results)
    {
        out.write(trace_file_name(m.label), detail::trace_csv(m));
        summary += detail::summary_fields(m);
        summary += '\n';
    }
    out.write("summary.csv", summary);
    out.commit();
    return out.files();
}

enum class SweepParameter
{
    discount,
    window_slots,
    num_relays,
};

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view name)
{
    if (name == "discount")
    {
        return SweepParameter::discount;
    }
    if (name == "window_slots")
    {
        return SweepParameter::window_slots;
    }
    if (name == "num_relays")
    {
        return SweepParameter::num_relays;
    }
    return std::nullopt;
}

inline std::string_view to_string(SweepParameter p)
{
    switch (p)
    {
    case SweepParameter::discount: return "discount";
    case SweepParameter::window_slots: return "window_slots";
    case SweepParameter::num_relays: return "num_relays";
    }
    return "?";
}

/// Whether a policy's behaviour depends on the swept parameter.
inline bool sweep_applies(SweepParameter p, PolicyKind kind)
{
    switch (p)
    {
    case SweepParameter::discount: return kind == PolicyKind::ducb || kind == PolicyKind::cducb;
    case SweepParameter::window_slots: return kind == PolicyKind::cwucb;
    case SweepParameter::num_relays: return true;
    }
    return false;
}

/// Parses a comma-separated value list and checks each value against the parameter's constraints.
inline std::vector<double> parse_sweep_values(SweepParameter p, std::string_view list)
{
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= list.size())
    {
        const std::size_t comma = std::min(list.find(',', pos), list.size());
        const std::string item = detail::trim(list.substr(pos, comma - pos));
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v))
        {
            throw ConfigError("sweep value '" + item + "' is not a number");
        }
        switch (p)
        {
        case SweepParameter::discount:
            if (!(v > 0.0 && v <= 1.0))
            {
                throw ConfigError("discount sweep values must lie in (0, 1]");
            }
            break;
        case SweepParameter::window_slots:
            if (v < 1.0 || v != std::floor(v))
            {
                throw ConfigError("window_slots sweep values must be integers >= 1");
            }
            break;
        case SweepParameter::num_relays:
            if (v < 2.0 || v != std::floor(v))
            {
                throw ConfigError("num_relays sweep values must be integers >= 2");
            }
            break;
        }
        values.push_back(v);
        pos = comma + 1;
        if (comma == list.size())
        {
            break;
        }
    }
    if (values.empty())
    {
        throw ConfigError("sweep needs at least one value");
    }
    return values;
}

/// Copy of `config` with the parameter set to `value` and only the affected policies kept.
inline ExperimentConfig apply_sweep_value(const ExperimentConfig& config, SweepParameter p, double value)
{
    ExperimentConfig c = config;
    std::vector<PolicySection> kept;
    for (PolicySection ps : c.policies)
    {
        if (!sweep_applies(p, ps.kind))
        {
            continue;
        }
        if (p == SweepParameter::discount)
        {
            ps.discount = value;
        }
        else if (p == SweepParameter::window_slots)
        {
            ps.window_slots = static_cast<std::int64_t>(value);
        }
        kept.push_back(ps);
    }
    if (p == SweepParameter::num_relays)
    {
        c.scenario.num_relays = static_cast<std::int64_t>(value);
        for (PolicySection& ps : kept)
        {
            // a pinned relay that no longer exists maps to the last one
            ps.fixed_arm = std::min<ArmId>(ps.fixed_arm, static_cast<ArmId>(value));
        }
        if (c.scenario.horizon_slots < static_cast<std::int64_t>(value))
        {
            throw ConfigError("horizon_slots is smaller than the swept relay count");
        }
    }
    if (kept.empty())
    {
        throw ConfigError("no configured policy depends on '" + std::string(to_string(p)) + "'");
    }
    c.policies = std::move(kept);
    return c;
}

struct SweepPoint
{
    double value = 0.0;
    std::vector<AggregateMetrics> results;
};

inline std::vector<SweepPoint> simulate_sweep(const ExperimentConfig& config, SweepParameter p, std::vector<double> values)
{
    std::stable_sort(values.begin(), values.end());
    std::vector<SweepPoint> out;
    for (double v : values)
    {
        out.push_back({v, simulate(apply_sweep_value(config, p, v))});
    }
    return out;
}

inline std::string sweep_trace_file_name(SweepParameter p, double value, const std::string& label)
{
    return "sweep_" + std::string(to_string(p)) + "_" + detail::format_value(value) + "_" + label + ".csv";
}

/// One trace per (value, affected policy) plus sweep_<param>_summary.csv with rows sorted by value.
inline std::vector<std::filesystem::path> sweep(const ExperimentConfig& config, SweepParameter p, const std::vector<double>& values,
                                                const std::filesystem::path& output_dir)
{
    const std::vector<SweepPoint> points = simulate_sweep(config, p, values);
    detail::OutputSet out(output_dir);
    std::string summary(kSweepSummaryHeader);
    summary += '\n';
    for (const SweepPoint& point : points)
    {
        for (const AggregateMetrics& m : point.results)
        {
            out.write(sweep_trace_file_name(p, point.value, m.label), detail::trace_csv(m));
            summary += std::string(to_string(p)) + ',' + detail::format_value(point.value) + ',' + detail::summary_fields(m) + '\n';
        }
    }
    out.write("sweep_" + std::string(to_string(p)) + "_summary.csv", summary);
    out.commit();
    return out.files();
}

} // namespace plcbandit
