#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <array>
#include <cmath>
#include <random>

#include "plcbandit/noise_capacity.hpp"

namespace {

using namespace plcbandit;
using Real = boost::multiprecision::cpp_bin_float_50;

CyclostationaryNoiseModel default_noise()
{
    return {{{1.0, 0.0, 0.0}, {8.0, 0.0, 12.0}, {4.0, 1.0, 30.0}}, 32};
}

Real hp_noise(const CyclostationaryNoiseModel& m, std::int64_t t)
{
    const Real two_pi = 2 * boost::math::constants::pi<Real>();
    Real total = 0;
    for (const NoiseClass& c : m.classes)
    {
        const Real angle = two_pi * Real(t % m.t_ac_slots) / Real(m.t_ac_slots) + Real(c.phase);
        const Real s = abs(sin(angle));
        total += Real(c.amplitude) * (c.exponent == 0.0 ? Real(1) : pow(s, Real(c.exponent)));
    }
    return total;
}

LinkBudget budget()
{
    return {1e-8, 1e-10, 10.0, FrequencyGrid::from_spacing(60937.5, 4687.5, 102)};
}

TransferFunction hop(double length)
{
    const FrequencyGrid g = budget().grid;
    return transfer_function(abcd_of_segment({{0.1, 0.5e-6, 5e-5, 150e-12}, length}, g), Complex{100.0, 0.0});
}

TEST(Noise, SingleClassPeak)
{
    const CyclostationaryNoiseModel m{{{2.0, 0.0, 2.0}}, 4};
    EXPECT_EQ(noise_power(m, 1), 2.0);
}

TEST(Noise, VanishesAtZeroPhase)
{
    const CyclostationaryNoiseModel m{{{8.0, 0.0, 12.0}, {3.0, 0.0, 1.0}}, 32};
    EXPECT_EQ(noise_power(m, 0), 0.0);
}

TEST(Noise, ZeroExponentIsConstantBackground)
{
    const CyclostationaryNoiseModel m{{{1.5, 0.0, 0.0}}, 8};
    for (std::int64_t t = 0; t < 16; ++t)
    {
        EXPECT_EQ(noise_power(m, t), 1.5);
    }
}

TEST(Noise, MatchesHighPrecisionOverTwentySlots)
{
    const CyclostationaryNoiseModel m = default_noise();
    for (std::int64_t t = 0; t < 20; ++t)
    {
        const double want = static_cast<double>(hp_noise(m, t));
        EXPECT_NEAR(noise_power(m, t), want, 1e-12 * want) << "t=" << t;
    }
}

TEST(Noise, PeriodicAndNonNegative)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> amp(0.0, 10.0);
    std::uniform_real_distribution<double> phase(-3.2, 3.2);
    std::uniform_real_distribution<double> expo(0.0, 40.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        CyclostationaryNoiseModel m{{}, 1 + trial % 40};
        for (int l = 0; l < 3; ++l)
        {
            m.classes.push_back({amp(rng), phase(rng), expo(rng)});
        }
        for (std::int64_t t = 0; t < 3 * m.t_ac_slots; ++t)
        {
            const double v = noise_power(m, t);
            EXPECT_GE(v, 0.0);
            EXPECT_EQ(v, noise_power(m, t + m.t_ac_slots));
            EXPECT_EQ(v, noise_power(m, t + 17 * m.t_ac_slots));
        }
    }
}

TEST(Noise, RejectsNegativeTimeAndBadModel)
{
    EXPECT_THROW(noise_power(default_noise(), -1), PreconditionError);
    EXPECT_THROW(validate(CyclostationaryNoiseModel{{}, 4}), ConfigError);
    EXPECT_THROW(validate(CyclostationaryNoiseModel{{{-1.0, 0.0, 1.0}}, 4}), ConfigError);
    EXPECT_THROW(validate(CyclostationaryNoiseModel{{{1.0, 0.0, 1.0}}, 0}), ConfigError);
}

TEST(LinkRate, ZeroGainGivesZero)
{
    const LinkBudget b = budget();
    const TransferFunction h{b.grid, std::vector<Complex>(b.grid.size(), Complex{})};
    EXPECT_EQ(link_rate(h, b, 1.0), 0.0);
}

TEST(LinkRate, FlatUnitSnrGivesBandwidth)
{
    // S_T |H|^2 / (N0 Gamma) = 1 everywhere, so log2(2) integrates to the band span
    LinkBudget b = budget();
    b.tx_psd = b.noise_psd_ref * b.snr_gap;
    const TransferFunction h = TransferFunction::unity(b.grid);
    EXPECT_NEAR(link_rate(h, b, 1.0), b.grid.bandwidth_hz(), 1e-9 * b.grid.bandwidth_hz());
}

TEST(LinkRate, MatchesTrapezoidOracle)
{
    const LinkBudget b = budget();
    const TransferFunction h = hop(250.0);
    for (double scale : {0.3, 1.0, 4.0})
    {
        long double sum = 0.0L;
        const std::size_t n = b.grid.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const auto rate = [&](std::size_t k) {
                const long double gain = std::norm(std::complex<long double>(h.h[k].real(), h.h[k].imag()));
                return std::log2(1.0L + b.tx_psd * gain / (scale * b.noise_psd_ref * b.snr_gap));
            };
            const long double width = static_cast<long double>(b.grid.point(i + 1)) - b.grid.point(i);
            sum += 0.5L * width * (rate(i) + rate(i + 1));
        }
        EXPECT_NEAR(link_rate(h, b, scale), static_cast<double>(sum), 1e-9 * static_cast<double>(sum));
    }
}

TEST(LinkRate, DecreasesWithNoiseScale)
{
    const LinkBudget b = budget();
    const TransferFunction h = hop(200.0);
    double previous = INFINITY;
    for (double scale : {0.1, 0.5, 1.0, 2.0, 10.0})
    {
        const double r = link_rate(h, b, scale);
        EXPECT_LT(r, previous);
        previous = r;
    }
}

TEST(LinkRate, NearlyLinearAtLowSnr)
{
    LinkBudget b = budget();
    const TransferFunction h = TransferFunction::unity(b.grid);
    b.tx_psd = 0.01 * b.noise_psd_ref * b.snr_gap;
    const double base = link_rate(h, b, 1.0);
    b.tx_psd *= 2.0;
    const double ratio = link_rate(h, b, 1.0) / base;
    EXPECT_GT(ratio, 1.8);
    EXPECT_LE(ratio, 2.0);
}

TEST(LinkRate, Errors)
{
    const LinkBudget b = budget();
    const TransferFunction other = TransferFunction::unity(FrequencyGrid(1e5, 2e5, 102));
    EXPECT_THROW(link_rate(other, b, 1.0), DimensionError);
    EXPECT_THROW(link_rate(hop(100.0), b, 0.0), PreconditionError);
    LinkBudget bad = b;
    bad.snr_gap = 0.5;
    EXPECT_THROW(validate(bad), ConfigError);
}

TEST(EndToEnd, HalfTheWeakerHop)
{
    EXPECT_EQ(end_to_end_capacity(std::array{4.0, 6.0}), 2.0);
    EXPECT_EQ(end_to_end_capacity(std::array{5.0, 5.0}), 2.5);
    EXPECT_EQ(end_to_end_capacity(std::array{0.0, 9.0}), 0.0);
    EXPECT_THROW(end_to_end_capacity(std::array{1.0, 2.0, 3.0}), DimensionError);
    EXPECT_THROW(end_to_end_capacity(std::array{-1.0, 2.0}), PreconditionError);
}

TEST(EndToEnd, SymmetricAndBoundedByEachHop)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1e7);
    for (int i = 0; i < 1000; ++i)
    {
        const double a = u(rng);
        const double b = u(rng);
        const double c = end_to_end_capacity(std::array{a, b});
        EXPECT_EQ(c, end_to_end_capacity(std::array{b, a}));
        EXPECT_LE(c, 0.5 * a);
        EXPECT_LE(c, 0.5 * b);
        const double d = u(rng) * 1e-3;
        EXPECT_LE(std::abs(end_to_end_capacity(std::array{a + d, b}) - c), 0.5 * d + 1e-6);
    }
}

TEST(EndToEnd, TwoHopComposes)
{
    const LinkBudget b = budget();
    const CapacityResult r = two_hop_capacity(hop(150.0), hop(300.0), b, 1.0, 2.0);
    ASSERT_EQ(r.link_rates.size(), 2u);
    EXPECT_EQ(r.link_rates[0], link_rate(hop(150.0), b, 1.0));
    EXPECT_EQ(r.link_rates[1], link_rate(hop(300.0), b, 2.0));
    EXPECT_EQ(r.end_to_end, 0.5 * std::min(r.link_rates[0], r.link_rates[1]));
}

} // namespace
