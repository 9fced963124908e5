#pragma once

// Experiment configuration: a sectioned key = value text format with strict
// parsing (unknown sections and keys are errors), serialization that round-trips
// exactly, and conversion into a Scenario plus policy set.
//
// See docs/config.md for the key reference.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "plcbandit/channel.hpp"
#include "plcbandit/errors.hpp"
#include "plcbandit/noise_capacity.hpp"
#include "plcbandit/policies.hpp"
#include "plcbandit/simulator.hpp"

namespace plcbandit {

struct ScenarioSection
{
    std::int64_t horizon_slots = 20000;
    std::uint64_t seed = 1;
    double fluctuation_sigma_db = 3.0;
    /// Hop-length multiplier applied per wrap when the relay list is extended.
    double relay_extension_length_factor = 1.1;
    /// Truncates or extends the relay list (see resize_relays); unset keeps it as listed.
    std::optional<std::int64_t> num_relays;

    friend bool operator==(const ScenarioSection&, const ScenarioSection&) = default;
};

/// OFDM system description. Only f_start_hz, spacing_hz and used_subcarriers
/// shape the simulation; the rest is carried as metadata.
struct GridSection
{
    double f_start_hz = 60937.5;
    double spacing_hz = 4687.5;
    std::int64_t used_subcarriers = 102;
    std::int64_t subcarriers = 128;
    std::int64_t cyclic_prefix_samples = 30;
    double ofdm_interval_us = 640.0;
    double sampling_frequency_hz = 600000.0;
    std::string modulation = "QPSK";

    FrequencyGrid grid() const { return FrequencyGrid::from_spacing(f_start_hz, spacing_hz, static_cast<std::size_t>(used_subcarriers)); }

    friend bool operator==(const GridSection&, const GridSection&) = default;
};

struct LinkSection
{
    double tx_psd_w_per_hz = 1e-8;
    double noise_psd_w_per_hz = 1e-10;
    double snr_gap = 10.0;

    friend bool operator==(const LinkSection&, const LinkSection&) = default;
};

struct RelaySection
{
    std::string cable = "default";
    double source_hop_length_m = 100.0;
    double relay_hop_length_m = 100.0;
    double relay_impedance_ohm = 100.0;
    double destination_impedance_ohm = 100.0;
    double noise_phase_offset_rad = 0.0;

    friend bool operator==(const RelaySection&, const RelaySection&) = default;
};

struct PolicySection
{
    std::string label;
    PolicyKind kind = PolicyKind::ucb;
    double exploration_xi = 0.5;
    double discount = 0.99;
    std::optional<std::int64_t> window_slots;  ///< unset: t_ac_slots / 4
    std::optional<double> padding_scale;       ///< unset: per-listing default
    std::optional<double> reward_bound;        ///< unset: calibrated per seed
    ArmId fixed_arm = 0;                       ///< fixed kind only; 0 draws from the seed

    friend bool operator==(const PolicySection&, const PolicySection&) = default;
};

struct ExecutionSection
{
    std::int64_t num_seeds = 20;
    std::string output_dir = "results";
    std::int64_t parallelism = 1;

    friend bool operator==(const ExecutionSection&, const ExecutionSection&) = default;
};

struct ExperimentConfig
{
    ScenarioSection scenario;
    GridSection grid;
    LinkSection link;
    std::map<std::string, CablePrimaryParams> cables;
    std::int64_t t_ac_slots = 32;
    std::vector<NoiseClass> noise_classes;
    std::vector<RelaySection> relays;
    std::vector<PolicySection> policies;
    ExecutionSection execution;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Built-in values used for anything a config file leaves out.
inline ExperimentConfig default_experiment_config()
{
    ExperimentConfig c;
    c.cables["default"] = CablePrimaryParams{0.1, 0.5e-6, 5e-5, 150e-12};
    c.noise_classes = {{1.0, 0.0, 0.0}, {8.0, 0.0, 12.0}, {4.0, 1.0, 30.0}};
    const std::vector<std::array<double, 3>> relays = {
        {150.0, 200.0, 0.0}, {200.0, 150.0, 1.05}, {250.0, 250.0, 2.1}, {300.0, 200.0, 0.5}, {350.0, 300.0, 1.6}, {400.0, 400.0, 2.6}};
    for (const auto& [a, b, phase] : relays)
    {
        RelaySection r;
        r.source_hop_length_m = a;
        r.relay_hop_length_m = b;
        r.noise_phase_offset_rad = phase;
        c.relays.push_back(r);
    }
    for (PolicyKind k : kAllPolicyKinds)
    {
        PolicySection p;
        p.label = std::string(to_string(k));
        p.kind = k;
        if (k == PolicyKind::fixed)
        {
            p.fixed_arm = 6;
        }
        c.policies.push_back(p);
    }
    return c;
}

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RawEntry
{
    std::string value;
    std::size_t line = 0;
};

struct RawSection
{
    std::string name;
    std::size_t line = 0;
    std::map<std::string, RawEntry> entries;
    std::vector<std::string> order;
};

inline std::vector<RawSection> tokenize(std::string_view text)
{
    std::vector<RawSection> sections;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        if (comment != std::string_view::npos)
        {
            raw = raw.substr(0, comment);
        }
        const std::string line = trim(raw);
        if (line.empty())
        {
            if (end == text.size())
            {
                break;
            }
            continue;
        }
        if (line.front() == '[')
        {
            if (line.back() != ']')
            {
                throw ConfigError("malformed section header '" + line + "'", line_no);
            }
            std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name.empty())
            {
                throw ConfigError("empty section name", line_no);
            }
            if (!seen.insert(name).second)
            {
                throw ConfigError("duplicate section [" + name + "]", line_no);
            }
            sections.push_back({name, line_no, {}, {}});
        }
        else
        {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
            }
            if (sections.empty())
            {
                throw ConfigError("key outside of any section", line_no);
            }
            std::string key = trim(std::string_view(line).substr(0, eq));
            std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key.empty())
            {
                throw ConfigError("missing key name", line_no);
            }
            RawSection& sec = sections.back();
            if (sec.entries.count(key) != 0)
            {
                throw ConfigError("duplicate key '" + sec.name + "." + key + "'", line_no);
            }
            sec.entries[key] = {value, line_no};
            sec.order.push_back(key);
        }
        if (end == text.size())
        {
            break;
        }
    }
    return sections;
}

/// Typed reader over one section; every key must be consumed exactly once.
class SectionReader
{
public:
    explicit SectionReader(const RawSection& section)
        : section_(section)
    {}

    template <typename T>
    void read(const std::string& key, T& target)
    {
        const auto it = section_.entries.find(key);
        if (it == section_.entries.end())
        {
            return;
        }
        used_.insert(key);
        target = convert<T>(key, it->second);
    }

    /// "auto" leaves the optional empty.
    template <typename T>
    void read_optional(const std::string& key, std::optional<T>& target)
    {
        const auto it = section_.entries.find(key);
        if (it == section_.entries.end())
        {
            return;
        }
        used_.insert(key);
        if (it->second.value == "auto")
        {
            target.reset();
            return;
        }
        target = convert<T>(key, it->second);
    }

    bool has(const std::string& key) const { return section_.entries.count(key) != 0; }

    std::size_t line_of(const std::string& key) const
    {
        const auto it = section_.entries.find(key);
        return it == section_.entries.end() ? section_.line : it->second.line;
    }

    void reject_unknown() const
    {
        for (const std::string& key : section_.order)
        {
            if (used_.count(key) == 0)
            {
                throw ConfigError("unknown key '" + section_.name + "." + key + "'", section_.entries.at(key).line);
            }
        }
    }

private:
    template <typename T>
    T convert(const std::string& key, const RawEntry& e) const
    {
        const std::string where = section_.name + "." + key;
        if constexpr (std::is_same_v<T, std::string>)
        {
            if (e.value.empty())
            {
                throw ConfigError("empty value for '" + where + "'", e.line);
            }
            return e.value;
        }
        else
        {
            T out{};
            const char* first = e.value.data();
            const char* last = first + e.value.size();
            const auto [ptr, ec] = std::from_chars(first, last, out);
            if (ec != std::errc{} || ptr != last || e.value.empty())
            {
                throw ConfigError("'" + where + "' expects " + type_name<T>() + ", got '" + e.value + "'", e.line);
            }
            if constexpr (std::is_floating_point_v<T>)
            {
                if (!std::isfinite(out))
                {
                    throw ConfigError("'" + where + "' must be finite", e.line);
                }
            }
            return out;
        }
    }

    template <typename T>
    static std::string type_name()
    {
        if constexpr (std::is_floating_point_v<T>)
        {
            return "a number";
        }
        else if constexpr (std::is_unsigned_v<T>)
        {
            return "a non-negative integer";
        }
        else
        {
            return "an integer";
        }
    }

    const RawSection& section_;
    std::set<std::string> used_;
};

inline std::optional<std::int64_t> indexed_suffix(const std::string& name, const std::string& prefix)
{
    if (name.rfind(prefix, 0) != 0)
    {
        return std::nullopt;
    }
    const std::string rest = name.substr(prefix.size());
    std::int64_t idx = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), idx);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || rest.empty())
    {
        return std::nullopt;
    }
    return idx;
}

inline void check(bool ok, const SectionReader& r, const std::string& section, const std::string& key, const std::string& what)
{
    if (!ok)
    {
        throw ConfigError("'" + section + "." + key + "' " + what, r.line_of(key));
    }
}

} // namespace detail

/// Parses and validates a config. Sections that are absent keep their
/// built-in defaults; the only required key is scenario.horizon_slots. A file
/// that lists any [relay.*], [noise.class.*] or [policy.*] section replaces the
/// whole built-in list of that kind.
inline ExperimentConfig parse_config(std::string_view text)
{
    using detail::check;
    ExperimentConfig c = default_experiment_config();
    const std::vector<detail::RawSection> sections = detail::tokenize(text);

    std::map<std::int64_t, std::pair<RelaySection, std::size_t>> relays;
    std::map<std::int64_t, std::pair<NoiseClass, std::size_t>> classes;
    std::vector<PolicySection> policies;
    std::map<std::string, CablePrimaryParams> cables;
    bool saw_scenario_horizon = false;
    std::size_t scenario_line = 0;

    for (const detail::RawSection& sec : sections)
    {
        detail::SectionReader r(sec);
        const std::string& n = sec.name;
        if (n == "scenario")
        {
            scenario_line = sec.line;
            saw_scenario_horizon = r.has("horizon_slots");
            r.read("horizon_slots", c.scenario.horizon_slots);
            r.read("seed", c.scenario.seed);
            r.read("fluctuation_sigma_db", c.scenario.fluctuation_sigma_db);
            r.read("relay_extension_length_factor", c.scenario.relay_extension_length_factor);
            r.read_optional("num_relays", c.scenario.num_relays);
            check(!c.scenario.num_relays || *c.scenario.num_relays >= 2, r, n, "num_relays", "must be >= 2");
            check(c.scenario.horizon_slots >= 1, r, n, "horizon_slots", "must be >= 1");
            check(c.scenario.fluctuation_sigma_db >= 0.0, r, n, "fluctuation_sigma_db", "must be >= 0");
            check(c.scenario.relay_extension_length_factor >= 1.0, r, n, "relay_extension_length_factor", "must be >= 1");
        }
        else if (n == "grid")
        {
            r.read("f_start_hz", c.grid.f_start_hz);
            r.read("spacing_hz", c.grid.spacing_hz);
            r.read("used_subcarriers", c.grid.used_subcarriers);
            r.read("subcarriers", c.grid.subcarriers);
            r.read("cyclic_prefix_samples", c.grid.cyclic_prefix_samples);
            r.read("ofdm_interval_us", c.grid.ofdm_interval_us);
            r.read("sampling_frequency_hz", c.grid.sampling_frequency_hz);
            r.read("modulation", c.grid.modulation);
            check(c.grid.f_start_hz > 0.0, r, n, "f_start_hz", "must be > 0");
            check(c.grid.spacing_hz > 0.0, r, n, "spacing_hz", "must be > 0");
            check(c.grid.used_subcarriers >= 2, r, n, "used_subcarriers", "must be >= 2");
            check(c.grid.subcarriers >= c.grid.used_subcarriers, r, n, "subcarriers", "must be >= used_subcarriers");
            check(c.grid.cyclic_prefix_samples >= 0, r, n, "cyclic_prefix_samples", "must be >= 0");
            check(c.grid.ofdm_interval_us > 0.0, r, n, "ofdm_interval_us", "must be > 0");
            check(c.grid.sampling_frequency_hz > 0.0, r, n, "sampling_frequency_hz", "must be > 0");
        }
        else if (n == "link")
        {
            r.read("tx_psd_w_per_hz", c.link.tx_psd_w_per_hz);
            r.read("noise_psd_w_per_hz", c.link.noise_psd_w_per_hz);
            r.read("snr_gap", c.link.snr_gap);
            check(c.link.tx_psd_w_per_hz > 0.0, r, n, "tx_psd_w_per_hz", "must be > 0");
            check(c.link.noise_psd_w_per_hz > 0.0, r, n, "noise_psd_w_per_hz", "must be > 0");
            check(c.link.snr_gap >= 1.0, r, n, "snr_gap", "must be >= 1");
        }
        else if (n == "noise")
        {
            r.read("t_ac_slots", c.t_ac_slots);
            check(c.t_ac_slots >= 1, r, n, "t_ac_slots", "must be >= 1");
        }
        else if (n == "execution")
        {
            r.read("num_seeds", c.execution.num_seeds);
            r.read("output_dir", c.execution.output_dir);
            r.read("parallelism", c.execution.parallelism);
            check(c.execution.num_seeds >= 1, r, n, "num_seeds", "must be >= 1");
            check(c.execution.parallelism >= 1, r, n, "parallelism", "must be >= 1");
        }
        else if (n.rfind("cable.", 0) == 0)
        {
            const std::string name = n.substr(6);
            if (name.empty())
            {
                throw ConfigError("cable section needs a name", sec.line);
            }
            CablePrimaryParams p{};
            for (const char* key : {"resistance_per_m", "inductance_per_m", "conductance_per_m", "capacitance_per_m"})
            {
                check(r.has(key), r, n, key, "is required");
            }
            r.read("resistance_per_m", p.resistance_per_m);
            r.read("inductance_per_m", p.inductance_per_m);
            r.read("conductance_per_m", p.conductance_per_m);
            r.read("capacitance_per_m", p.capacitance_per_m);
            check(p.resistance_per_m > 0.0, r, n, "resistance_per_m", "must be > 0");
            check(p.inductance_per_m > 0.0, r, n, "inductance_per_m", "must be > 0");
            check(p.conductance_per_m > 0.0, r, n, "conductance_per_m", "must be > 0");
            check(p.capacitance_per_m > 0.0, r, n, "capacitance_per_m", "must be > 0");
            cables[name] = p;
        }
        else if (const auto idx = detail::indexed_suffix(n, "relay."))
        {
            if (*idx < 1)
            {
                throw ConfigError("relay sections are numbered from 1", sec.line);
            }
            RelaySection rs;
            r.read("cable", rs.cable);
            r.read("source_hop_length_m", rs.source_hop_length_m);
            r.read("relay_hop_length_m", rs.relay_hop_length_m);
            r.read("relay_impedance_ohm", rs.relay_impedance_ohm);
            r.read("destination_impedance_ohm", rs.destination_impedance_ohm);
            r.read("noise_phase_offset_rad", rs.noise_phase_offset_rad);
            check(rs.source_hop_length_m >= 0.0, r, n, "source_hop_length_m", "must be >= 0");
            check(rs.relay_hop_length_m >= 0.0, r, n, "relay_hop_length_m", "must be >= 0");
            check(rs.relay_impedance_ohm > 0.0, r, n, "relay_impedance_ohm", "must be > 0");
            check(rs.destination_impedance_ohm > 0.0, r, n, "destination_impedance_ohm", "must be > 0");
            relays[*idx] = {rs, sec.line};
        }
        else if (const auto cidx = detail::indexed_suffix(n, "noise.class."))
        {
            if (*cidx < 1)
            {
                throw ConfigError("noise class sections are numbered from 1", sec.line);
            }
            NoiseClass nc;
            r.read("amplitude", nc.amplitude);
            r.read("phase_rad", nc.phase);
            r.read("exponent", nc.exponent);
            check(nc.amplitude >= 0.0, r, n, "amplitude", "must be >= 0");
            check(nc.exponent >= 0.0, r, n, "exponent", "must be >= 0");
            classes[*cidx] = {nc, sec.line};
        }
        else if (n.rfind("policy.", 0) == 0)
        {
            PolicySection ps;
            ps.label = n.substr(7);
            if (ps.label.empty() || ps.label.find_first_of(" \t/\\,") != std::string::npos)
            {
                throw ConfigError("policy label must be non-empty without spaces, commas or slashes", sec.line);
            }
            std::string kind_name;
            check(r.has("kind"), r, n, "kind", "is required");
            r.read("kind", kind_name);
            const auto kind = parse_policy_kind(kind_name);
            check(kind.has_value(), r, n, "kind",
                  "must be one of fixed, random, oracle, ucb, d-ucb, cd-ucb, cw-ucb (got '" + kind_name + "')");
            ps.kind = *kind;
            r.read("exploration_xi", ps.exploration_xi);
            r.read("discount", ps.discount);
            r.read_optional("window_slots", ps.window_slots);
            r.read_optional("padding_scale", ps.padding_scale);
            r.read_optional("reward_bound", ps.reward_bound);
            r.read("fixed_arm", ps.fixed_arm);
            check(ps.exploration_xi > 0.0, r, n, "exploration_xi", "must be > 0");
            check(ps.discount > 0.0 && ps.discount <= 1.0, r, n, "discount", "must lie in (0, 1]");
            check(!ps.window_slots || *ps.window_slots >= 1, r, n, "window_slots", "must be >= 1");
            check(!ps.padding_scale || *ps.padding_scale > 0.0, r, n, "padding_scale", "must be > 0");
            check(!ps.reward_bound || *ps.reward_bound > 0.0, r, n, "reward_bound", "must be > 0");
            policies.push_back(ps);
        }
        else
        {
            throw ConfigError("unknown section [" + n + "]", sec.line);
        }
        r.reject_unknown();
    }

    if (!saw_scenario_horizon)
    {
        throw ConfigError("missing required key 'scenario.horizon_slots'", scenario_line);
    }
    if (!cables.empty())
    {
        for (const auto& [name, p] : cables)
        {
            c.cables[name] = p;
        }
    }
    if (!relays.empty())
    {
        c.relays.clear();
        std::int64_t expected = 1;
        for (const auto& [idx, entry] : relays)
        {
            if (idx != expected)
            {
                throw ConfigError("relay sections must be numbered 1..N without gaps (missing relay." + std::to_string(expected) + ")",
                                  entry.second);
            }
            if (c.cables.count(entry.first.cable) == 0)
            {
                throw ConfigError("relay." + std::to_string(idx) + ".cable refers to unknown cable '" + entry.first.cable + "'",
                                  entry.second);
            }
            c.relays.push_back(entry.first);
            ++expected;
        }
    }
    if (!classes.empty())
    {
        c.noise_classes.clear();
        std::int64_t expected = 1;
        for (const auto& [idx, entry] : classes)
        {
            if (idx != expected)
            {
                throw ConfigError("noise class sections must be numbered 1..L without gaps", entry.second);
            }
            c.noise_classes.push_back(entry.first);
            ++expected;
        }
    }
    const std::size_t relay_count = c.scenario.num_relays ? static_cast<std::size_t>(*c.scenario.num_relays) : c.relays.size();
    if (!policies.empty())
    {
        c.policies = std::move(policies);
    }
    else
    {
        // the built-in fixed policy pins the last built-in relay; follow a shorter relay list
        for (PolicySection& p : c.policies)
        {
            p.fixed_arm = std::min<ArmId>(p.fixed_arm, relay_count);
        }
    }
    if (relay_count < 2)
    {
        throw ConfigError("at least 2 relays are required");
    }
    if (c.scenario.horizon_slots < static_cast<std::int64_t>(relay_count))
    {
        throw ConfigError("scenario.horizon_slots must be at least the number of relays");
    }
    for (const PolicySection& p : c.policies)
    {
        if (p.fixed_arm > relay_count)
        {
            throw ConfigError("policy." + p.label + ".fixed_arm exceeds the number of relays");
        }
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Full serialization; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c)
{
    using detail::format_double;
    std::ostringstream os;
    os << "[scenario]\n"
       << "horizon_slots = " << c.scenario.horizon_slots << "\n"
       << "seed = " << c.scenario.seed << "\n"
       << "fluctuation_sigma_db = " << format_double(c.scenario.fluctuation_sigma_db) << "\n"
       << "relay_extension_length_factor = " << format_double(c.scenario.relay_extension_length_factor) << "\n"
       << "num_relays = " << (c.scenario.num_relays ? std::to_string(*c.scenario.num_relays) : "auto") << "\n\n";
    os << "[grid]\n"
       << "f_start_hz = " << format_double(c.grid.f_start_hz) << "\n"
       << "spacing_hz = " << format_double(c.grid.spacing_hz) << "\n"
       << "used_subcarriers = " << c.grid.used_subcarriers << "\n"
       << "subcarriers = " << c.grid.subcarriers << "\n"
       << "cyclic_prefix_samples = " << c.grid.cyclic_prefix_samples << "\n"
       << "ofdm_interval_us = " << format_double(c.grid.ofdm_interval_us) << "\n"
       << "sampling_frequency_hz = " << format_double(c.grid.sampling_frequency_hz) << "\n"
       << "modulation = " << c.grid.modulation << "\n\n";
    os << "[link]\n"
       << "tx_psd_w_per_hz = " << format_double(c.link.tx_psd_w_per_hz) << "\n"
       << "noise_psd_w_per_hz = " << format_double(c.link.noise_psd_w_per_hz) << "\n"
       << "snr_gap = " << format_double(c.link.snr_gap) << "\n\n";
    for (const auto& [name, p] : c.cables)
    {
        os << "[cable." << name << "]\n"
           << "resistance_per_m = " << format_double(p.resistance_per_m) << "\n"
           << "inductance_per_m = " << format_double(p.inductance_per_m) << "\n"
           << "conductance_per_m = " << format_double(p.conductance_per_m) << "\n"
           << "capacitance_per_m = " << format_double(p.capacitance_per_m) << "\n\n";
    }
    os << "[noise]\nt_ac_slots = " << c.t_ac_slots << "\n\n";
    for (std::size_t i = 0; i < c.noise_classes.size(); ++i)
    {
        const NoiseClass& nc = c.noise_classes[i];
        os << "[noise.class." << i + 1 << "]\n"
           << "amplitude = " << format_double(nc.amplitude) << "\n"
           << "phase_rad = " << format_double(nc.phase) << "\n"
           << "exponent = " << format_double(nc.exponent) << "\n\n";
    }
    for (std::size_t i = 0; i < c.relays.size(); ++i)
    {
        const RelaySection& r = c.relays[i];
        os << "[relay." << i + 1 << "]\n"
           << "cable = " << r.cable << "\n"
           << "source_hop_length_m = " << format_double(r.source_hop_length_m) << "\n"
           << "relay_hop_length_m = " << format_double(r.relay_hop_length_m) << "\n"
           << "relay_impedance_ohm = " << format_double(r.relay_impedance_ohm) << "\n"
           << "destination_impedance_ohm = " << format_double(r.destination_impedance_ohm) << "\n"
           << "noise_phase_offset_rad = " << format_double(r.noise_phase_offset_rad) << "\n\n";
    }
    for (const PolicySection& p : c.policies)
    {
        os << "[policy." << p.label << "]\n"
           << "kind = " << to_string(p.kind) << "\n"
           << "exploration_xi = " << format_double(p.exploration_xi) << "\n"
           << "discount = " << format_double(p.discount) << "\n"
           << "window_slots = " << (p.window_slots ? std::to_string(*p.window_slots) : "auto") << "\n"
           << "padding_scale = " << (p.padding_scale ? format_double(*p.padding_scale) : "auto") << "\n"
           << "reward_bound = " << (p.reward_bound ? format_double(*p.reward_bound) : "auto") << "\n"
           << "fixed_arm = " << p.fixed_arm << "\n\n";
    }
    os << "[execution]\n"
       << "num_seeds = " << c.execution.num_seeds << "\n"
       << "output_dir = " << c.execution.output_dir << "\n"
       << "parallelism = " << c.execution.parallelism << "\n";
    return os.str();
}

/// Relay list of length n: truncation keeps the first n relays; extension
/// appends copies of relay (k mod M) with both hop lengths multiplied by
/// relay_extension_length_factor^(k / M), k the 0-based position, M the listed count.
inline std::vector<RelaySection> resize_relays(const ExperimentConfig& c, std::size_t n)
{
    const std::vector<RelaySection>& base = c.relays;
    std::vector<RelaySection> out;
    for (std::size_t k = 0; k < n; ++k)
    {
        RelaySection r = base[k % base.size()];
        const double factor = std::pow(c.scenario.relay_extension_length_factor, static_cast<double>(k / base.size()));
        r.source_hop_length_m *= factor;
        r.relay_hop_length_m *= factor;
        out.push_back(r);
    }
    return out;
}

/// Relay list after applying scenario.num_relays.
inline std::vector<RelaySection> effective_relays(const ExperimentConfig& c)
{
    return c.scenario.num_relays ? resize_relays(c, static_cast<std::size_t>(*c.scenario.num_relays)) : c.relays;
}

inline Scenario to_scenario(const ExperimentConfig& c)
{
    Scenario s;
    for (const RelaySection& r : effective_relays(c))
    {
        const CablePrimaryParams& cable = c.cables.at(r.cable);
        RelaySpec spec;
        spec.source_hop = {cable, r.source_hop_length_m};
        spec.relay_hop = {cable, r.relay_hop_length_m};
        spec.relay_impedance_ohm = r.relay_impedance_ohm;
        spec.destination_impedance_ohm = r.destination_impedance_ohm;
        spec.noise_phase_offset_rad = r.noise_phase_offset_rad;
        s.relays.push_back(spec);
    }
    s.noise = {c.noise_classes, c.t_ac_slots};
    s.budget = {c.link.tx_psd_w_per_hz, c.link.noise_psd_w_per_hz, c.link.snr_gap, c.grid.grid()};
    s.horizon_slots = c.scenario.horizon_slots;
    s.fluctuation_sigma_db = c.scenario.fluctuation_sigma_db;
    s.seed = c.scenario.seed;
    validate(s);
    return s;
}

inline PolicySpec to_policy_spec(const ExperimentConfig& c, const PolicySection& p)
{
    PolicySpec spec;
    spec.label = p.label;
    spec.kind = p.kind;
    spec.config.num_arms = effective_relays(c).size();
    spec.config.exploration_xi = p.exploration_xi;
    spec.config.discount = p.discount;
    spec.config.t_ac_slots = c.t_ac_slots;
    spec.config.window_slots = p.window_slots.value_or(std::max<std::int64_t>(1, c.t_ac_slots / 4));
    spec.config.padding_scale = p.padding_scale;
    spec.config.fixed_arm = p.fixed_arm;
    spec.calibrate_reward_bound = !p.reward_bound.has_value();
    spec.config.reward_bound = p.reward_bound.value_or(1.0);
    validate(spec.config);
    return spec;
}

inline std::vector<PolicySpec> to_policy_specs(const ExperimentConfig& c)
{
    std::vector<PolicySpec> out;
    for (const PolicySection& p : c.policies)
    {
        out.push_back(to_policy_spec(c, p));
    }
    return out;
}

} // namespace plcbandit
