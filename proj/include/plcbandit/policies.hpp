#pragma once

// Relay selection policies behind one select/observe interface: fixed, random,
// oracle (perfect channel knowledge) and the upper-confidence-bound family
// UCB, discounted UCB, cyclo-discounted UCB and cyclic-window UCB.
//
// Slots and arms are 1-based throughout. An index "at time t" weights the
// recorded samples s = 1..min(t, history size); a policy choosing for slot t
// therefore evaluates its index at t over the t-1 rewards observed so far.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plcbandit/errors.hpp"

namespace plcbandit {

using ArmId = std::size_t;

enum class PolicyKind
{
    fixed,
    random,
    oracle,
    ucb,
    ducb,
    cducb,
    cwucb,
};

inline constexpr std::array<PolicyKind, 7> kAllPolicyKinds{PolicyKind::fixed, PolicyKind::random, PolicyKind::oracle, PolicyKind::ucb,
                                                           PolicyKind::ducb,  PolicyKind::cducb,  PolicyKind::cwucb};

inline std::string_view to_string(PolicyKind kind)
{
    switch (kind)
    {
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::random: return "random";
    case PolicyKind::oracle: return "oracle";
    case PolicyKind::ucb: return "ucb";
    case PolicyKind::ducb: return "d-ucb";
    case PolicyKind::cducb: return "cd-ucb";
    case PolicyKind::cwucb: return "cw-ucb";
    }
    return "?";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view name)
{
    for (PolicyKind k : kAllPolicyKinds)
    {
        if (to_string(k) == name)
        {
            return k;
        }
    }
    return std::nullopt;
}

inline bool is_ucb_family(PolicyKind kind)
{
    return kind == PolicyKind::ucb || kind == PolicyKind::ducb || kind == PolicyKind::cducb || kind == PolicyKind::cwucb;
}

/// Padding multiplier used by each published listing: B for plain UCB, 2B for the rest.
inline double default_padding_scale(PolicyKind kind) { return kind == PolicyKind::ucb ? 1.0 : 2.0; }

struct PolicyConfig
{
    std::size_t num_arms = 1;
    double reward_bound = 1.0;   ///< B
    double exploration_xi = 0.5; ///< xi
    double discount = 0.99;      ///< gamma_d
    std::int64_t window_slots = 8;
    std::int64_t t_ac_slots = 32;
    std::uint64_t rng_seed = 0;
    std::optional<double> padding_scale; ///< defaults to default_padding_scale(kind)
    ArmId fixed_arm = 0;                 ///< fixed policy only; 0 draws the arm from the seed

    friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

inline void validate(const PolicyConfig& c)
{
    if (c.num_arms < 1)
    {
        throw ConfigError("num_arms must be >= 1");
    }
    if (!(std::isfinite(c.reward_bound) && c.reward_bound > 0.0))
    {
        throw ConfigError("reward_bound must be > 0");
    }
    if (!(std::isfinite(c.exploration_xi) && c.exploration_xi > 0.0))
    {
        throw ConfigError("exploration_xi must be > 0");
    }
    if (!(c.discount > 0.0 && c.discount <= 1.0))
    {
        throw ConfigError("discount must lie in (0, 1]");
    }
    if (c.window_slots < 1)
    {
        throw ConfigError("window_slots must be >= 1");
    }
    if (c.t_ac_slots < 1)
    {
        throw ConfigError("t_ac_slots must be >= 1");
    }
    if (c.padding_scale && !(std::isfinite(*c.padding_scale) && *c.padding_scale > 0.0))
    {
        throw ConfigError("padding_scale must be > 0");
    }
    if (c.fixed_arm > c.num_arms)
    {
        throw ConfigError("fixed_arm exceeds num_arms");
    }
}

/// Chosen arm and its clamped reward for every elapsed slot.
class RewardHistory
{
public:
    RewardHistory(std::size_t num_arms, double reward_bound)
        : num_arms_(num_arms)
        , reward_bound_(reward_bound)
    {
        if (num_arms < 1 || !(reward_bound > 0.0))
        {
            throw PreconditionError("history needs num_arms >= 1 and reward_bound > 0");
        }
    }

    /// Records the reward of `arm` for the next slot, clamped into [0, reward_bound].
    void append(ArmId arm, double reward)
    {
        if (arm < 1 || arm > num_arms_)
        {
            throw PreconditionError("arm id out of range");
        }
        if (!std::isfinite(reward))
        {
            throw PreconditionError("reward must be finite");
        }
        const double stored = std::clamp(reward, 0.0, reward_bound_);
        if (stored != reward)
        {
            ++clamp_count_;
        }
        arms_.push_back(arm);
        rewards_.push_back(stored);
    }

    std::size_t size() const noexcept { return arms_.size(); }
    std::size_t num_arms() const noexcept { return num_arms_; }
    double reward_bound() const noexcept { return reward_bound_; }
    std::size_t clamp_count() const noexcept { return clamp_count_; }

    ArmId arm_at(std::size_t slot) const { return arms_.at(slot - 1); }
    double reward_at(std::size_t slot) const { return rewards_.at(slot - 1); }

    /// Plays per arm over slots 1..min(t, size); entry 0 is unused.
    std::vector<std::size_t> play_counts(std::size_t t) const
    {
        std::vector<std::size_t> counts(num_arms_ + 1, 0);
        const std::size_t upto = std::min(t, size());
        for (std::size_t s = 0; s < upto; ++s)
        {
            ++counts[arms_[s]];
        }
        return counts;
    }
    std::vector<std::size_t> play_counts() const { return play_counts(size()); }

private:
    std::size_t num_arms_;
    double reward_bound_;
    std::size_t clamp_count_ = 0;
    std::vector<ArmId> arms_;
    std::vector<double> rewards_;
};

struct IndexBreakdown
{
    ArmId arm = 0;
    double empirical_mean = 0.0;
    double padding = 0.0;
    double index = 0.0;
    double effective_count = 0.0;
    /// Argument of the logarithm in the padding: t for UCB, the summed effective counts otherwise.
    double effective_total = 0.0;
};

enum class SelectionPhase
{
    initialization,
    steady,
};

struct Selection
{
    std::int64_t slot = 0;
    ArmId arm = 0;
    SelectionPhase phase = SelectionPhase::steady;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Appends the reward for `selection`, which must be the next slot of `history`.
inline void observe(RewardHistory& history, const Selection& selection, double reward)
{
    if (selection.slot != static_cast<std::int64_t>(history.size()) + 1)
    {
        throw SequencingError("observe for slot " + std::to_string(selection.slot) + " but history holds " +
                              std::to_string(history.size()) + " slots");
    }
    history.append(selection.arm, reward);
}

namespace detail {

struct WeightedSums
{
    double reward = 0.0;
    double count = 0.0;
};

/// Padding is +inf for a zero effective count (the arm is re-explored) and
/// when the log argument is below 1.
inline double padding_term(double scale, double xi, double log_argument, double effective_count)
{
    if (!(effective_count > 0.0) || log_argument < 1.0)
    {
        return std::numeric_limits<double>::infinity();
    }
    return scale * std::sqrt(xi * std::log(log_argument) / effective_count);
}

inline std::vector<IndexBreakdown> finish_indices(std::span<const WeightedSums> sums, double padding_scale, double xi,
                                                  std::optional<double> log_argument)
{
    double total = 0.0;
    for (const WeightedSums& w : sums)
    {
        total += w.count;
    }
    const double log_arg = log_argument.value_or(total);
    std::vector<IndexBreakdown> out(sums.size());
    for (std::size_t k = 0; k < sums.size(); ++k)
    {
        IndexBreakdown& b = out[k];
        b.arm = k + 1;
        b.effective_count = sums[k].count;
        b.effective_total = log_arg;
        b.empirical_mean = sums[k].count > 0.0 ? sums[k].reward / sums[k].count : 0.0;
        b.padding = padding_term(padding_scale, xi, log_arg, sums[k].count);
        b.index = b.empirical_mean + b.padding;
    }
    return out;
}

inline void require_index_inputs(const RewardHistory& history, std::int64_t t)
{
    if (t < 1)
    {
        throw PreconditionError("index time must be >= 1");
    }
    const std::vector<std::size_t> counts = history.play_counts(static_cast<std::size_t>(t));
    for (std::size_t k = 1; k < counts.size(); ++k)
    {
        if (counts[k] == 0)
        {
            throw PreconditionError("arm " + std::to_string(k) + " has not been played by time " + std::to_string(t));
        }
    }
}

inline double padding_scale_for(PolicyKind kind, const PolicyConfig& config)
{
    return config.padding_scale.value_or(default_padding_scale(kind)) * config.reward_bound;
}

/// Half-width h of the rectangular window: |d| < W/2  <=>  |d| <= h for integer d.
inline std::int64_t window_half_width(std::int64_t window_slots) { return (window_slots - 1) / 2; }

/// Number of complete mains cycles up to time t.
inline std::int64_t complete_cycles(std::int64_t t, std::int64_t t_ac_slots) { return t / t_ac_slots; }

/// Accumulates the periodic window copies p = 0..P centred on t - p*T_AC.
/// Overlapping copies add, so a sample covered twice counts twice.
inline void accumulate_cyclic_window(const RewardHistory& history, std::int64_t t, std::int64_t window_slots, std::int64_t t_ac_slots,
                                     std::span<WeightedSums> sums)
{
    const std::int64_t last = std::min<std::int64_t>(t, static_cast<std::int64_t>(history.size()));
    const std::int64_t h = window_half_width(window_slots);
    const std::int64_t cycles = complete_cycles(t, t_ac_slots);
    for (std::int64_t p = 0; p <= cycles; ++p)
    {
        const std::int64_t centre = t - p * t_ac_slots;
        const std::int64_t lo = std::max<std::int64_t>(1, centre - h);
        const std::int64_t hi = std::min(last, centre + h);
        for (std::int64_t s = lo; s <= hi; ++s)
        {
            WeightedSums& w = sums[history.arm_at(static_cast<std::size_t>(s)) - 1];
            w.reward += history.reward_at(static_cast<std::size_t>(s));
            w.count += 1.0;
        }
    }
}

} // namespace detail

/// Plain UCB: sample means, padding B*sqrt(xi*log(t)/N_t(k)).
inline std::vector<IndexBreakdown> ucb_indices(const RewardHistory& history, const PolicyConfig& config, std::int64_t t)
{
    detail::require_index_inputs(history, t);
    std::vector<detail::WeightedSums> sums(history.num_arms());
    const std::size_t last = std::min(static_cast<std::size_t>(t), history.size());
    for (std::size_t s = 1; s <= last; ++s)
    {
        detail::WeightedSums& w = sums[history.arm_at(s) - 1];
        w.reward += history.reward_at(s);
        w.count += 1.0;
    }
    return detail::finish_indices(sums, detail::padding_scale_for(PolicyKind::ucb, config), config.exploration_xi, static_cast<double>(t));
}

/// Discounted UCB: sample s weighted by gamma^(t-s).
inline std::vector<IndexBreakdown> ducb_indices(const RewardHistory& history, const PolicyConfig& config, std::int64_t t)
{
    detail::require_index_inputs(history, t);
    std::vector<detail::WeightedSums> sums(history.num_arms());
    const std::size_t last = std::min(static_cast<std::size_t>(t), history.size());
    for (std::size_t s = 1; s <= last; ++s)
    {
        const double weight = std::pow(config.discount, static_cast<double>(t - static_cast<std::int64_t>(s)));
        detail::WeightedSums& w = sums[history.arm_at(s) - 1];
        w.reward += weight * history.reward_at(s);
        w.count += weight;
    }
    return detail::finish_indices(sums, detail::padding_scale_for(PolicyKind::ducb, config), config.exploration_xi, std::nullopt);
}

/// Cyclo-discounted UCB. Each complete mains cycle (t - p*T_AC, t - (p-1)*T_AC]
/// and the leading partial cycle [1, t - P*T_AC] are discounted separately from
/// their own right edge, which gives sample s the weight gamma^((t - s) mod T_AC).
inline std::vector<IndexBreakdown> cducb_indices(const RewardHistory& history, const PolicyConfig& config, std::int64_t t)
{
    detail::require_index_inputs(history, t);
    std::vector<detail::WeightedSums> sums(history.num_arms());
    const std::size_t last = std::min(static_cast<std::size_t>(t), history.size());
    for (std::size_t s = 1; s <= last; ++s)
    {
        const std::int64_t lag = (t - static_cast<std::int64_t>(s)) % config.t_ac_slots;
        const double weight = std::pow(config.discount, static_cast<double>(lag));
        detail::WeightedSums& w = sums[history.arm_at(s) - 1];
        w.reward += weight * history.reward_at(s);
        w.count += weight;
    }
    return detail::finish_indices(sums, detail::padding_scale_for(PolicyKind::cducb, config), config.exploration_xi, std::nullopt);
}

/// Cyclic-window UCB: rectangular windows |s - t + p*T_AC| < W/2 for p = 0..P.
inline std::vector<IndexBreakdown> cwucb_indices(const RewardHistory& history, const PolicyConfig& config, std::int64_t t)
{
    detail::require_index_inputs(history, t);
    std::vector<detail::WeightedSums> sums(history.num_arms());
    detail::accumulate_cyclic_window(history, t, config.window_slots, config.t_ac_slots, sums);
    return detail::finish_indices(sums, detail::padding_scale_for(PolicyKind::cwucb, config), config.exploration_xi, std::nullopt);
}

inline std::vector<IndexBreakdown> indices_for(PolicyKind kind, const RewardHistory& history, const PolicyConfig& config, std::int64_t t)
{
    switch (kind)
    {
    case PolicyKind::ucb: return ucb_indices(history, config, t);
    case PolicyKind::ducb: return ducb_indices(history, config, t);
    case PolicyKind::cducb: return cducb_indices(history, config, t);
    case PolicyKind::cwucb: return cwucb_indices(history, config, t);
    default: throw PreconditionError(std::string(to_string(kind)) + " has no confidence index");
    }
}

/// Lowest arm id among the maxima.
inline ArmId argmax_lowest(std::span<const double> values)
{
    if (values.empty())
    {
        throw PreconditionError("argmax of an empty set");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
    {
        if (values[k] > values[best])
        {
            best = k;
        }
    }
    return best + 1;
}

inline ArmId argmax_index(std::span<const IndexBreakdown> indices)
{
    std::vector<double> values(indices.size());
    std::transform(indices.begin(), indices.end(), values.begin(), [](const IndexBreakdown& b) { return b.index; });
    return argmax_lowest(values);
}

/// Stateful selection policy. select() and observe() must alternate; select()
/// always chooses for slot history().size() + 1.
class Policy
{
public:
    Policy(PolicyKind kind, PolicyConfig config)
        : kind_(kind)
        , config_(std::move(config))
        , history_((validate(config_), config_.num_arms), config_.reward_bound)
    {}

    virtual ~Policy() = default;
    Policy(const Policy&) = delete;
    Policy& operator=(const Policy&) = delete;

    PolicyKind kind() const noexcept { return kind_; }
    const PolicyConfig& config() const noexcept { return config_; }
    const RewardHistory& history() const noexcept { return history_; }
    std::int64_t next_slot() const noexcept { return static_cast<std::int64_t>(history_.size()) + 1; }

    /// `true_means` is only consulted by the oracle policy.
    Selection select(std::span<const double> true_means = {})
    {
        if (pending_)
        {
            throw SequencingError("select called twice without observe (slot " + std::to_string(pending_->slot) + ")");
        }
        pending_ = choose(next_slot(), true_means);
        return *pending_;
    }

    void observe(const Selection& selection, double reward)
    {
        if (!pending_ || !(*pending_ == selection))
        {
            throw SequencingError("observe for slot " + std::to_string(selection.slot) + " does not match the pending selection");
        }
        pending_.reset();
        ingest(selection.arm, reward);
    }

    /// Feeds a logged (arm, reward) pair as the next slot without selecting.
    void replay(ArmId arm, double reward)
    {
        if (pending_)
        {
            throw SequencingError("replay while a selection is pending");
        }
        ingest(arm, reward);
    }

protected:
    virtual Selection choose(std::int64_t t, std::span<const double> true_means) = 0;
    virtual void record(ArmId /*arm*/, double /*stored_reward*/) {}

private:
    void ingest(ArmId arm, double reward)
    {
        history_.append(arm, reward);
        record(arm, history_.reward_at(history_.size()));
    }

    PolicyKind kind_;
    PolicyConfig config_;
    RewardHistory history_;
    std::optional<Selection> pending_;
};

class FixedPolicy final : public Policy
{
public:
    explicit FixedPolicy(PolicyConfig config)
        : Policy(PolicyKind::fixed, std::move(config))
    {
        if (this->config().fixed_arm != 0)
        {
            arm_ = this->config().fixed_arm;
        }
        else
        {
            std::mt19937_64 rng(this->config().rng_seed);
            arm_ = std::uniform_int_distribution<ArmId>(1, this->config().num_arms)(rng);
        }
    }

    ArmId arm() const noexcept { return arm_; }

protected:
    Selection choose(std::int64_t t, std::span<const double>) override { return {t, arm_, SelectionPhase::steady}; }

private:
    ArmId arm_ = 1;
};

class RandomPolicy final : public Policy
{
public:
    explicit RandomPolicy(PolicyConfig config)
        : Policy(PolicyKind::random, std::move(config))
        , rng_(this->config().rng_seed)
        , dist_(1, this->config().num_arms)
    {}

protected:
    Selection choose(std::int64_t t, std::span<const double>) override { return {t, dist_(rng_), SelectionPhase::steady}; }

private:
    std::mt19937_64 rng_;
    std::uniform_int_distribution<ArmId> dist_;
};

/// Exhaustive search with perfect channel knowledge: argmax of the true means.
class OraclePolicy final : public Policy
{
public:
    explicit OraclePolicy(PolicyConfig config)
        : Policy(PolicyKind::oracle, std::move(config))
    {}

protected:
    Selection choose(std::int64_t t, std::span<const double> true_means) override
    {
        if (true_means.size() != config().num_arms)
        {
            throw ConfigError("oracle policy needs the true mean reward of every arm");
        }
        return {t, argmax_lowest(true_means), SelectionPhase::steady};
    }
};

/// Shared initialization sweep and argmax for the confidence-index policies.
class IndexPolicy : public Policy
{
public:
    using Policy::Policy;

    /// Index breakdown the next select() would use. Requires every arm played.
    std::vector<IndexBreakdown> indices() const { return indices_at(next_slot()); }

protected:
    virtual std::vector<IndexBreakdown> indices_at(std::int64_t t) const = 0;

    double padding_scale() const { return detail::padding_scale_for(kind(), config()); }

    Selection choose(std::int64_t t, std::span<const double>) override
    {
        if (t <= static_cast<std::int64_t>(config().num_arms))
        {
            return {t, static_cast<ArmId>(t), SelectionPhase::initialization};
        }
        const std::vector<IndexBreakdown> current = indices_at(t);
        return {t, argmax_index(current), SelectionPhase::steady};
    }
};

class UcbPolicy final : public IndexPolicy
{
public:
    explicit UcbPolicy(PolicyConfig config)
        : IndexPolicy(PolicyKind::ucb, std::move(config))
        , sums_(this->config().num_arms)
    {}

protected:
    std::vector<IndexBreakdown> indices_at(std::int64_t t) const override
    {
        return detail::finish_indices(sums_, padding_scale(), config().exploration_xi, static_cast<double>(t));
    }

    void record(ArmId arm, double reward) override
    {
        sums_[arm - 1].reward += reward;
        sums_[arm - 1].count += 1.0;
    }

private:
    std::vector<detail::WeightedSums> sums_;
};

/// Running sums are kept at weights gamma^(h - s), h = history size, and
/// scaled by one more gamma^(t - h) when the index is evaluated.
class DucbPolicy final : public IndexPolicy
{
public:
    explicit DucbPolicy(PolicyConfig config)
        : IndexPolicy(PolicyKind::ducb, std::move(config))
        , sums_(this->config().num_arms)
    {}

protected:
    std::vector<IndexBreakdown> indices_at(std::int64_t t) const override
    {
        const double lift = std::pow(config().discount, static_cast<double>(t - static_cast<std::int64_t>(history().size())));
        std::vector<detail::WeightedSums> scaled(sums_);
        for (detail::WeightedSums& w : scaled)
        {
            w.reward *= lift;
            w.count *= lift;
        }
        return detail::finish_indices(scaled, padding_scale(), config().exploration_xi, std::nullopt);
    }

    void record(ArmId arm, double reward) override
    {
        const double g = config().discount;
        for (detail::WeightedSums& w : sums_)
        {
            w.reward *= g;
            w.count *= g;
        }
        sums_[arm - 1].reward += reward;
        sums_[arm - 1].count += 1.0;
    }

private:
    std::vector<detail::WeightedSums> sums_;
};

/// Samples are accumulated per phase (slot mod T_AC); the cyclic discount
/// gamma^((t - s) mod T_AC) only depends on the phase, so each evaluation costs
/// O(arms * T_AC) regardless of the horizon.
class CducbPolicy final : public IndexPolicy
{
public:
    explicit CducbPolicy(PolicyConfig config)
        : IndexPolicy(PolicyKind::cducb, std::move(config))
        , period_(static_cast<std::size_t>(this->config().t_ac_slots))
        , phase_sums_(this->config().num_arms * period_)
        , powers_(period_)
    {
        for (std::size_t j = 0; j < period_; ++j)
        {
            powers_[j] = std::pow(this->config().discount, static_cast<double>(j));
        }
    }

protected:
    std::vector<IndexBreakdown> indices_at(std::int64_t t) const override
    {
        const std::size_t arms = config().num_arms;
        const std::size_t t_phase = static_cast<std::size_t>(t) % period_;
        std::vector<detail::WeightedSums> sums(arms);
        for (std::size_t k = 0; k < arms; ++k)
        {
            for (std::size_t phase = 0; phase < period_; ++phase)
            {
                const detail::WeightedSums& acc = phase_sums_[k * period_ + phase];
                if (acc.count == 0.0)
                {
                    continue;
                }
                const double weight = powers_[(t_phase + period_ - phase) % period_];
                sums[k].reward += weight * acc.reward;
                sums[k].count += weight * acc.count;
            }
        }
        return detail::finish_indices(sums, padding_scale(), config().exploration_xi, std::nullopt);
    }

    void record(ArmId arm, double reward) override
    {
        const std::size_t phase = history().size() % period_;
        detail::WeightedSums& acc = phase_sums_[(arm - 1) * period_ + phase];
        acc.reward += reward;
        acc.count += 1.0;
    }

private:
    std::size_t period_;
    std::vector<detail::WeightedSums> phase_sums_;
    std::vector<double> powers_;
};

/// Recomputes the periodic window sums from the retained history at each selection.
class CwucbPolicy final : public IndexPolicy
{
public:
    explicit CwucbPolicy(PolicyConfig config)
        : IndexPolicy(PolicyKind::cwucb, std::move(config))
    {}

protected:
    std::vector<IndexBreakdown> indices_at(std::int64_t t) const override
    {
        std::vector<detail::WeightedSums> sums(config().num_arms);
        detail::accumulate_cyclic_window(history(), t, config().window_slots, config().t_ac_slots, sums);
        return detail::finish_indices(sums, padding_scale(), config().exploration_xi, std::nullopt);
    }
};

inline std::unique_ptr<Policy> make_policy(PolicyKind kind, PolicyConfig config)
{
    switch (kind)
    {
    case PolicyKind::fixed: return std::make_unique<FixedPolicy>(std::move(config));
    case PolicyKind::random: return std::make_unique<RandomPolicy>(std::move(config));
    case PolicyKind::oracle: return std::make_unique<OraclePolicy>(std::move(config));
    case PolicyKind::ucb: return std::make_unique<UcbPolicy>(std::move(config));
    case PolicyKind::ducb: return std::make_unique<DucbPolicy>(std::move(config));
    case PolicyKind::cducb: return std::make_unique<CducbPolicy>(std::move(config));
    case PolicyKind::cwucb: return std::make_unique<CwucbPolicy>(std::move(config));
    }
    throw PreconditionError("unknown policy kind");
}

} // namespace plcbandit
