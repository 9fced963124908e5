#pragma once

// N-relay two-hop scenario, per-slot reward generation, policy driver and the
// reward / regret / percentage-correct metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "plcbandit/channel.hpp"
#include "plcbandit/errors.hpp"
#include "plcbandit/noise_capacity.hpp"
#include "plcbandit/policies.hpp"

namespace plcbandit {

using Rng = std::mt19937_64;

struct RelaySpec
{
    LineSegment source_hop; ///< S -> R_i
    LineSegment relay_hop;  ///< R_i -> D
    double relay_impedance_ohm = 100.0;
    double destination_impedance_ohm = 100.0;
    /// Added to every noise-class phase on this route.
    double noise_phase_offset_rad = 0.0;

    friend bool operator==(const RelaySpec&, const RelaySpec&) = default;
};

struct Scenario
{
    std::vector<RelaySpec> relays;
    CyclostationaryNoiseModel noise;
    LinkBudget budget;
    std::int64_t horizon_slots = 0;
    double fluctuation_sigma_db = 3.0;
    std::uint64_t seed = 1;

    std::size_t num_arms() const noexcept { return relays.size(); }
};

inline void validate(const Scenario& s)
{
    if (s.relays.size() < 2)
    {
        throw ConfigError("scenario needs at least 2 relays");
    }
    if (s.horizon_slots < static_cast<std::int64_t>(s.relays.size()))
    {
        throw ConfigError("horizon_slots must be at least the number of relays");
    }
    if (!(std::isfinite(s.fluctuation_sigma_db) && s.fluctuation_sigma_db >= 0.0))
    {
        throw ConfigError("fluctuation_sigma_db must be >= 0");
    }
    validate(s.noise);
    validate(s.budget);
    for (const RelaySpec& r : s.relays)
    {
        for (double z : {r.relay_impedance_ohm, r.destination_impedance_ohm})
        {
            if (!(std::isfinite(z) && z > 0.0))
            {
                throw ConfigError("node impedances must be > 0");
            }
        }
        if (!std::isfinite(r.noise_phase_offset_rad))
        {
            throw ConfigError("noise phase offset must be finite");
        }
    }
}

/// 64-bit seed for an independent stream `stream` derived from `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace stream {
inline constexpr std::uint64_t environment = 0x454e56;
inline constexpr std::uint64_t calibration = 0x43414c;
inline constexpr std::uint64_t policy = 0x504f4c;
} // namespace stream

struct ArmChannels
{
    TransferFunction first_hop;
    TransferFunction second_hop;
};

/// Per-hop transfer functions of every relay route, each hop terminated independently.
inline std::vector<ArmChannels> build_arm_channels(const Scenario& scenario)
{
    const FrequencyGrid& grid = scenario.budget.grid;
    std::vector<ArmChannels> out;
    out.reserve(scenario.relays.size());
    for (std::size_t i = 0; i < scenario.relays.size(); ++i)
    {
        const RelaySpec& r = scenario.relays[i];
        try
        {
            out.push_back({transfer_function(abcd_of_segment(r.source_hop, grid), Complex{r.relay_impedance_ohm, 0.0}),
                           transfer_function(abcd_of_segment(r.relay_hop, grid), Complex{r.destination_impedance_ohm, 0.0})});
        }
        catch (const Error& e)
        {
            throw ComputationError("relay " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

/// Cyclostationary noise multiplier of a route at slot t, normalised to a unit cycle mean.
inline double route_noise_scale(const Scenario& scenario, ArmId arm, std::int64_t t)
{
    const double offset = scenario.relays.at(arm - 1).noise_phase_offset_rad;
    return noise_power(scenario.noise, t, offset) / cycle_average_noise_power(scenario.noise, offset);
}

/// End-to-end capacity with every per-hop fluctuation at 1 (its median).
inline double arm_mean_reward(const Scenario& scenario, std::span<const ArmChannels> channels, ArmId arm, std::int64_t t)
{
    const double scale = route_noise_scale(scenario, arm, t);
    const ArmChannels& ch = channels[arm - 1];
    return two_hop_capacity(ch.first_hop, ch.second_hop, scenario.budget, scale, scale).end_to_end;
}

/// Log-normal multiplier 10^(sigma_db * z / 10), z standard normal.
inline double draw_fluctuation(double sigma_db, Rng& rng)
{
    std::normal_distribution<double> z(0.0, 1.0);
    return std::pow(10.0, sigma_db * z(rng) / 10.0);
}

struct RewardDraw
{
    double reward = 0.0;
    std::array<double, 2> fluctuation{1.0, 1.0};
};

inline RewardDraw draw_reward(const Scenario& scenario, std::span<const ArmChannels> channels, ArmId arm, std::int64_t t, Rng& rng)
{
    RewardDraw out;
    out.fluctuation = {draw_fluctuation(scenario.fluctuation_sigma_db, rng), draw_fluctuation(scenario.fluctuation_sigma_db, rng)};
    const double scale = route_noise_scale(scenario, arm, t);
    const ArmChannels& ch = channels[arm - 1];
    out.reward = two_hop_capacity(ch.first_hop, ch.second_hop, scenario.budget, scale * out.fluctuation[0], scale * out.fluctuation[1])
                     .end_to_end;
    return out;
}

/// Channels plus per-phase caches of noise scale and mean reward. Immutable
/// after construction, so one instance can serve concurrent runs.
class RewardModel
{
public:
    explicit RewardModel(Scenario scenario)
        : scenario_(std::move(scenario))
    {
        validate(scenario_);
        channels_ = build_arm_channels(scenario_);
        const std::size_t arms = scenario_.num_arms();
        const auto period = static_cast<std::size_t>(scenario_.noise.t_ac_slots);
        scales_.resize(period * arms);
        means_.resize(period * arms);
        for (std::size_t phase = 0; phase < period; ++phase)
        {
            for (ArmId arm = 1; arm <= arms; ++arm)
            {
                scales_[phase * arms + arm - 1] = route_noise_scale(scenario_, arm, static_cast<std::int64_t>(phase));
                means_[phase * arms + arm - 1] = arm_mean_reward(scenario_, channels_, arm, static_cast<std::int64_t>(phase));
            }
        }
    }

    const Scenario& scenario() const noexcept { return scenario_; }
    const std::vector<ArmChannels>& channels() const noexcept { return channels_; }
    std::size_t num_arms() const noexcept { return scenario_.num_arms(); }

    std::span<const double> mean_rewards(std::int64_t t) const
    {
        const std::size_t arms = num_arms();
        return std::span<const double>(means_).subspan(phase_of(t) * arms, arms);
    }

    double mean_reward(ArmId arm, std::int64_t t) const { return mean_rewards(t)[arm - 1]; }

    double reward(ArmId arm, std::int64_t t, double first_fluctuation, double second_fluctuation) const
    {
        const double scale = scales_[phase_of(t) * num_arms() + arm - 1];
        const ArmChannels& ch = channels_[arm - 1];
        return two_hop_capacity(ch.first_hop, ch.second_hop, scenario_.budget, scale * first_fluctuation, scale * second_fluctuation)
            .end_to_end;
    }

    /// Largest reward seen over ten mains cycles of every arm, drawn from a
    /// stream independent of the run itself.
    double calibrate_reward_bound(std::uint64_t seed) const
    {
        Rng rng(derive_seed(seed, stream::calibration));
        double best = 0.0;
        const std::int64_t slots = 10 * scenario_.noise.t_ac_slots;
        for (std::int64_t t = 1; t <= slots; ++t)
        {
            for (ArmId arm = 1; arm <= num_arms(); ++arm)
            {
                const double f1 = draw_fluctuation(scenario_.fluctuation_sigma_db, rng);
                const double f2 = draw_fluctuation(scenario_.fluctuation_sigma_db, rng);
                best = std::max(best, reward(arm, t, f1, f2));
            }
        }
        if (!(best > 0.0))
        {
            throw ComputationError("every calibration reward is zero; the reward bound is undefined");
        }
        return best;
    }

private:
    std::size_t phase_of(std::int64_t t) const { return static_cast<std::size_t>(t % scenario_.noise.t_ac_slots); }

    Scenario scenario_;
    std::vector<ArmChannels> channels_;
    std::vector<double> scales_;
    std::vector<double> means_;
};

struct SlotRecord
{
    std::int64_t slot = 0;
    ArmId chosen_arm = 0;
    double reward = 0.0;
    ArmId oracle_arm = 0;
    double oracle_mean_reward = 0.0;
    double chosen_mean_reward = 0.0;
    double instantaneous_regret = 0.0;
    double oracle_reward = 0.0; ///< realised reward of the oracle arm in the same slot
};

/// Running traces indexed by slot - 1.
struct RunMetrics
{
    std::vector<double> avg_reward;
    std::vector<double> avg_reward_normalized;
    std::vector<double> accumulated_regret;
    std::vector<double> pct_correct;
    std::vector<double> accumulated_pseudo_regret;

    double final_avg_reward() const { return avg_reward.back(); }
    double final_regret() const { return accumulated_regret.back(); }
    double final_pct_correct() const { return pct_correct.back(); }
};

struct RunResult
{
    std::vector<SlotRecord> records;
    RunMetrics metrics;
    double reward_bound = 0.0;
    std::size_t clamp_count = 0;
    std::vector<std::size_t> selection_counts; ///< index 0 unused
};

/// Drives one policy through the horizon. Regret is measured against the
/// fluctuation-free means; rewards fed to the policy are realised draws.
/// The environment stream depends only on the scenario seed, so every policy
/// sees the same channel realisation for a given seed.
inline RunResult run(const RewardModel& model, PolicyKind kind, const PolicyConfig& config)
{
    const Scenario& scenario = model.scenario();
    const std::size_t arms = model.num_arms();
    if (config.num_arms != arms)
    {
        throw ConfigError("policy num_arms (" + std::to_string(config.num_arms) + ") differs from scenario relays (" +
                          std::to_string(arms) + ")");
    }
    std::unique_ptr<Policy> policy = make_policy(kind, config);
    Rng env(derive_seed(scenario.seed, stream::environment));

    const auto horizon = static_cast<std::size_t>(scenario.horizon_slots);
    RunResult out;
    out.reward_bound = config.reward_bound;
    out.records.reserve(horizon);
    out.selection_counts.assign(arms + 1, 0);
    RunMetrics& m = out.metrics;
    for (auto* trace : {&m.avg_reward, &m.avg_reward_normalized, &m.accumulated_regret, &m.pct_correct, &m.accumulated_pseudo_regret})
    {
        trace->reserve(horizon);
    }

    std::vector<double> fluctuation(2 * arms);
    double reward_sum = 0.0;
    double regret = 0.0;
    double pseudo_regret = 0.0;
    std::size_t correct = 0;
    for (std::int64_t t = 1; t <= scenario.horizon_slots; ++t)
    {
        for (double& f : fluctuation)
        {
            f = draw_fluctuation(scenario.fluctuation_sigma_db, env);
        }
        const std::span<const double> means = model.mean_rewards(t);
        Selection selection;
        try
        {
            selection = policy->select(means);
        }
        catch (const SequencingError& e)
        {
            throw SequencingError("slot " + std::to_string(t) + ": " + e.what());
        }

        SlotRecord rec;
        rec.slot = t;
        rec.chosen_arm = selection.arm;
        rec.reward = model.reward(selection.arm, t, fluctuation[2 * (selection.arm - 1)], fluctuation[2 * (selection.arm - 1) + 1]);
        rec.oracle_arm = argmax_lowest(means);
        rec.oracle_mean_reward = means[rec.oracle_arm - 1];
        rec.chosen_mean_reward = means[selection.arm - 1];
        rec.instantaneous_regret = rec.oracle_mean_reward - rec.chosen_mean_reward;
        rec.oracle_reward = rec.oracle_arm == rec.chosen_arm
                                ? rec.reward
                                : model.reward(rec.oracle_arm, t, fluctuation[2 * (rec.oracle_arm - 1)], fluctuation[2 * (rec.oracle_arm - 1) + 1]);
        policy->observe(selection, rec.reward);

        ++out.selection_counts[selection.arm];
        reward_sum += rec.reward;
        regret += rec.instantaneous_regret;
        pseudo_regret += rec.oracle_reward - rec.reward;
        if (rec.chosen_mean_reward >= rec.oracle_mean_reward)
        {
            ++correct;
        }
        const double elapsed = static_cast<double>(t);
        m.avg_reward.push_back(reward_sum / elapsed);
        m.avg_reward_normalized.push_back(reward_sum / elapsed / config.reward_bound);
        m.accumulated_regret.push_back(regret);
        m.pct_correct.push_back(100.0 * static_cast<double>(correct) / elapsed);
        m.accumulated_pseudo_regret.push_back(pseudo_regret);
        out.records.push_back(rec);
    }
    out.clamp_count = policy->history().clamp_count();
    return out;
}

inline RunResult run(const Scenario& scenario, PolicyKind kind, const PolicyConfig& config)
{
    return run(RewardModel(scenario), kind, config);
}

/// One entry of a policy set handed to replicate().
struct PolicySpec
{
    std::string label;
    PolicyKind kind = PolicyKind::ucb;
    PolicyConfig config;
    /// Replace config.reward_bound with the per-seed calibration maximum.
    bool calibrate_reward_bound = true;
};

struct TraceStats
{
    std::vector<double> mean;
    std::vector<double> stddev;
};

struct FinalStats
{
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_seed;
};

struct AggregateMetrics
{
    std::string label;
    PolicyKind kind = PolicyKind::ucb;
    std::size_t num_seeds = 0;
    TraceStats avg_reward;
    TraceStats avg_reward_normalized;
    TraceStats accumulated_regret;
    TraceStats pct_correct;
    TraceStats accumulated_pseudo_regret;
    FinalStats final_avg_reward;
    FinalStats final_avg_reward_normalized;
    FinalStats final_regret;
    FinalStats final_pct_correct;
    /// Arm traces of the first seed.
    std::vector<ArmId> chosen_arms;
    std::vector<ArmId> oracle_arms;
    std::size_t clamp_count = 0;
};

namespace detail {

/// Welford accumulator over traces, fed in seed order.
class TraceAccumulator
{
public:
    void add(const std::vector<double>& trace)
    {
        if (count_ == 0)
        {
            mean_.assign(trace.size(), 0.0);
            m2_.assign(trace.size(), 0.0);
        }
        ++count_;
        const double n = static_cast<double>(count_);
        for (std::size_t i = 0; i < trace.size(); ++i)
        {
            const double delta = trace[i] - mean_[i];
            mean_[i] += delta / n;
            m2_[i] += delta * (trace[i] - mean_[i]);
        }
    }

    TraceStats finish() const
    {
        TraceStats out{mean_, std::vector<double>(mean_.size(), 0.0)};
        if (count_ > 1)
        {
            for (std::size_t i = 0; i < m2_.size(); ++i)
            {
                out.stddev[i] = std::sqrt(m2_[i] / static_cast<double>(count_ - 1));
            }
        }
        return out;
    }

private:
    std::size_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

inline FinalStats final_stats(std::vector<double> values)
{
    FinalStats out;
    TraceAccumulator acc;
    for (double v : values)
    {
        acc.add({v});
    }
    const TraceStats s = acc.finish();
    out.mean = s.mean.empty() ? 0.0 : s.mean[0];
    out.stddev = s.stddev.empty() ? 0.0 : s.stddev[0];
    out.per_seed = std::move(values);
    return out;
}

} // namespace detail

/// Runs every policy for seeds scenario.seed, scenario.seed + 1, ... and
/// aggregates the traces. Replicas may execute on `parallelism` threads; results
/// are merged in seed order so the output does not depend on the thread count.
inline std::vector<AggregateMetrics> replicate(const Scenario& scenario, std::span<const PolicySpec> policies, std::size_t num_seeds,
                                               std::size_t parallelism = 1)
{
    if (num_seeds < 1)
    {
        throw ConfigError("num_seeds must be >= 1");
    }
    parallelism = std::max<std::size_t>(parallelism, 1);
    validate(scenario);

    struct Accumulators
    {
        detail::TraceAccumulator avg_reward, avg_reward_normalized, regret, pct, pseudo;
        std::vector<double> final_reward, final_reward_normalized, final_regret, final_pct;
    };
    std::vector<Accumulators> acc(policies.size());
    std::vector<AggregateMetrics> out(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i)
    {
        out[i].label = policies[i].label;
        out[i].kind = policies[i].kind;
        out[i].num_seeds = num_seeds;
    }

    auto run_replica = [&](std::size_t replica) {
        Scenario s = scenario;
        s.seed = scenario.seed + replica;
        const RewardModel model(s);
        std::vector<RunResult> results;
        results.reserve(policies.size());
        double bound = 0.0;
        for (std::size_t i = 0; i < policies.size(); ++i)
        {
            PolicyConfig cfg = policies[i].config;
            if (policies[i].calibrate_reward_bound)
            {
                if (bound == 0.0)
                {
                    bound = model.calibrate_reward_bound(s.seed);
                }
                cfg.reward_bound = bound;
            }
            cfg.rng_seed = derive_seed(s.seed, stream::policy + i);
            results.push_back(run(model, policies[i].kind, cfg));
        }
        return results;
    };

    for (std::size_t batch_start = 0; batch_start < num_seeds; batch_start += parallelism)
    {
        const std::size_t batch = std::min(parallelism, num_seeds - batch_start);
        std::vector<std::vector<RunResult>> results(batch);
        std::vector<std::exception_ptr> errors(batch);
        if (batch == 1)
        {
            results[0] = run_replica(batch_start);
        }
        else
        {
            std::vector<std::thread> workers;
            workers.reserve(batch);
            for (std::size_t j = 0; j < batch; ++j)
            {
                workers.emplace_back([&, j] {
                    try
                    {
                        results[j] = run_replica(batch_start + j);
                    }
                    catch (...)
                    {
                        errors[j] = std::current_exception();
                    }
                });
            }
            for (std::thread& w : workers)
            {
                w.join();
            }
            for (const std::exception_ptr& e : errors)
            {
                if (e)
                {
                    std::rethrow_exception(e);
                }
            }
        }
        for (std::size_t j = 0; j < batch; ++j)
        {
            for (std::size_t i = 0; i < policies.size(); ++i)
            {
                const RunResult& r = results[j][i];
                Accumulators& a = acc[i];
                a.avg_reward.add(r.metrics.avg_reward);
                a.avg_reward_normalized.add(r.metrics.avg_reward_normalized);
                a.regret.add(r.metrics.accumulated_regret);
                a.pct.add(r.metrics.pct_correct);
                a.pseudo.add(r.metrics.accumulated_pseudo_regret);
                a.final_reward.push_back(r.metrics.final_avg_reward());
                a.final_reward_normalized.push_back(r.metrics.avg_reward_normalized.back());
                a.final_regret.push_back(r.metrics.final_regret());
                a.final_pct.push_back(r.metrics.final_pct_correct());
                out[i].clamp_count += r.clamp_count;
                if (batch_start + j == 0)
                {
                    out[i].chosen_arms.reserve(r.records.size());
                    out[i].oracle_arms.reserve(r.records.size());
                    for (const SlotRecord& rec : r.records)
                    {
                        out[i].chosen_arms.push_back(rec.chosen_arm);
                        out[i].oracle_arms.push_back(rec.oracle_arm);
                    }
                }
            }
        }
    }

    for (std::size_t i = 0; i < policies.size(); ++i)
    {
        Accumulators& a = acc[i];
        out[i].avg_reward = a.avg_reward.finish();
        out[i].avg_reward_normalized = a.avg_reward_normalized.finish();
        out[i].accumulated_regret = a.regret.finish();
        out[i].pct_correct = a.pct.finish();
        out[i].accumulated_pseudo_regret = a.pseudo.finish();
        out[i].final_avg_reward = detail::final_stats(std::move(a.final_reward));
        out[i].final_avg_reward_normalized = detail::final_stats(std::move(a.final_reward_normalized));
        out[i].final_regret = detail::final_stats(std::move(a.final_regret));
        out[i].final_pct_correct = detail::final_stats(std::move(a.final_pct));
    }
    return out;
}

} // namespace plcbandit
