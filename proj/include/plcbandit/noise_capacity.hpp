#pragma once

// Cyclostationary (mains-synchronous) noise power, per-link achievable rate
// and fixed-rate two-hop end-to-end capacity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "plcbandit/channel.hpp"
#include "plcbandit/errors.hpp"

namespace plcbandit {

struct NoiseClass
{
    double amplitude = 0.0; ///< A_l
    double phase = 0.0;     ///< theta_l, rad
    double exponent = 0.0;  ///< n_l

    friend bool operator==(const NoiseClass&, const NoiseClass&) = default;
};

struct CyclostationaryNoiseModel
{
    std::vector<NoiseClass> classes;
    std::int64_t t_ac_slots = 1; ///< mains period in slots

    friend bool operator==(const CyclostationaryNoiseModel&, const CyclostationaryNoiseModel&) = default;
};

inline void validate(const CyclostationaryNoiseModel& model)
{
    if (model.classes.empty())
    {
        throw ConfigError("noise model needs at least one class");
    }
    if (model.t_ac_slots < 1)
    {
        throw ConfigError("t_ac_slots must be >= 1");
    }
    for (const NoiseClass& c : model.classes)
    {
        if (!(std::isfinite(c.amplitude) && c.amplitude >= 0.0) || !(std::isfinite(c.exponent) && c.exponent >= 0.0) ||
            !std::isfinite(c.phase))
        {
            throw ConfigError("noise class requires finite amplitude >= 0, exponent >= 0 and phase");
        }
    }
}

/// Instantaneous noise power at slot `t`, with every class phase shifted by
/// `extra_phase` radians. The slot index is reduced modulo t_ac_slots before the
/// sine is evaluated, so the result is bit-exactly periodic.
inline double noise_power(const CyclostationaryNoiseModel& model, std::int64_t t, double extra_phase = 0.0)
{
    if (t < 0)
    {
        throw PreconditionError("noise_power requires t >= 0");
    }
    const std::int64_t period = std::max<std::int64_t>(model.t_ac_slots, 1);
    const double cycle_fraction = static_cast<double>(t % period) / static_cast<double>(period);
    double total = 0.0;
    for (const NoiseClass& c : model.classes)
    {
        total += c.amplitude * std::pow(std::abs(std::sin(2.0 * std::numbers::pi * cycle_fraction + c.phase + extra_phase)), c.exponent);
    }
    return total;
}

/// Mean of noise_power over one period of slots.
inline double cycle_average_noise_power(const CyclostationaryNoiseModel& model, double extra_phase = 0.0)
{
    double sum = 0.0;
    for (std::int64_t t = 0; t < model.t_ac_slots; ++t)
    {
        sum += noise_power(model, t, extra_phase);
    }
    return sum / static_cast<double>(model.t_ac_slots);
}

struct LinkBudget
{
    double tx_psd = 0.0;         ///< S_T, W/Hz
    double noise_psd_ref = 0.0;  ///< N_0 reference level, W/Hz
    double snr_gap = 1.0;        ///< Gamma, linear
    FrequencyGrid grid{1.0, 2.0, 2};

    friend bool operator==(const LinkBudget&, const LinkBudget&) = default;
};

inline void validate(const LinkBudget& b)
{
    if (!(std::isfinite(b.tx_psd) && b.tx_psd > 0.0))
    {
        throw ConfigError("tx_psd must be > 0");
    }
    if (!(std::isfinite(b.noise_psd_ref) && b.noise_psd_ref > 0.0))
    {
        throw ConfigError("noise_psd_ref must be > 0");
    }
    if (!(std::isfinite(b.snr_gap) && b.snr_gap >= 1.0))
    {
        throw ConfigError("snr_gap must be >= 1");
    }
}

struct CapacityResult
{
    std::vector<double> link_rates; ///< bit/s per hop
    double end_to_end = 0.0;        ///< bit/s
};

/// Achievable rate in bit/s: trapezoidal integral over the grid of
/// log2(1 + S_T |H|^2 / (noise_scale * N_0 * Gamma)).
inline double link_rate(const TransferFunction& h, const LinkBudget& budget, double noise_scale)
{
    if (!(std::isfinite(noise_scale) && noise_scale > 0.0))
    {
        throw PreconditionError("link_rate requires noise_scale > 0");
    }
    if (!(h.grid == budget.grid) || h.h.size() != budget.grid.size())
    {
        throw DimensionError("link_rate: transfer function grid differs from link budget grid");
    }
    const double snr_scale = budget.tx_psd / (noise_scale * budget.noise_psd_ref * budget.snr_gap);
    const double df = budget.grid.spacing_hz();
    double integral = 0.0;
    const std::size_t n = h.h.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const double value = std::log2(1.0 + snr_scale * std::norm(h.h[i]));
        integral += (i == 0 || i + 1 == n) ? 0.5 * value : value;
    }
    return integral * df;
}

/// Fixed-rate two-hop capacity: half of the weaker hop.
inline double end_to_end_capacity(std::span<const double> rates)
{
    if (rates.size() != 2)
    {
        throw DimensionError("end_to_end_capacity expects exactly two hop rates");
    }
    for (double r : rates)
    {
        if (!(r >= 0.0))
        {
            throw PreconditionError("hop rates must be non-negative");
        }
    }
    return 0.5 * std::min(rates[0], rates[1]);
}

inline CapacityResult two_hop_capacity(const TransferFunction& first_hop, const TransferFunction& second_hop, const LinkBudget& budget,
                                       double first_noise_scale, double second_noise_scale)
{
    CapacityResult out;
    out.link_rates = {link_rate(first_hop, budget, first_noise_scale), link_rate(second_hop, budget, second_noise_scale)};
    out.end_to_end = end_to_end_capacity(out.link_rates);
    return out;
}

} // namespace plcbandit
