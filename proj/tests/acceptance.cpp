// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "index_oracle.hpp"
#include "plcbandit/plcbandit.hpp"

namespace {

using namespace plcbandit;
using namespace plcbandit::testing;
namespace fs = std::filesystem;

// Pinned tolerances and time limits.
constexpr double kOracleAbsTol = 1e-12;
// Below one binary64 ULP an absolute bound is unrepresentable (paddings of a
// long-unplayed arm under strong discounting reach 1e4 and more).
constexpr double kOracleUlpFloor = 8.0;
constexpr double kDeterminantRelTol = 1e-9;
constexpr double kIdentityTol = 1e-12;
constexpr double kAssociativityTol = 1e-9;
constexpr double kFlatSnrRelTol = 1e-9;
constexpr double kStandardErrors = 2.0;
constexpr double kRandomPctWindow = 3.0;
constexpr double kSweepDistinctRelTol = 1e-6;
constexpr double kOracleLimitS = 60.0;
constexpr double kReductionLimitS = 5.0;
constexpr double kOrderingLimitS = 120.0;
constexpr double kPhysicsLimitS = 10.0;
constexpr double kSweepLimitS = 180.0;

const std::string kDefaultIni = std::string(PLCBANDIT_SOURCE_DIR) + "/configs/default.ini";

struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass)
        {
            detail = what;
        }
        pass = pass && ok;
    }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body, double limit_s = 0.0)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (const std::exception& e)
    {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && elapsed > limit_s)
    {
        o.require(false, "runtime " + std::to_string(elapsed) + " s exceeds " + std::to_string(limit_s) + " s");
    }
    std::printf("[%s] %d. %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), elapsed, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass)
    {
        ++failures;
    }
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::size_t ulp_floor_uses = 0;

bool close_abs(double got, double want, double tol)
{
    if (std::isinf(want) || std::isinf(got))
    {
        return got == want;
    }
    const double diff = std::abs(got - want);
    if (diff <= tol)
    {
        return true;
    }
    const double ulp = std::nextafter(std::abs(want), INFINITY) - std::abs(want);
    if (diff <= kOracleUlpFloor * ulp)
    {
        ++ulp_floor_uses;
        return true;
    }
    return false;
}

bool matches_oracle(const std::vector<IndexBreakdown>& got, const std::vector<OracleIndex>& want)
{
    if (got.size() != want.size())
    {
        return false;
    }
    for (std::size_t k = 0; k < got.size(); ++k)
    {
        const OracleIndex& w = want[k];
        const IndexBreakdown& g = got[k];
        if (g.arm != k + 1 || !close_abs(g.empirical_mean, w.mean, kOracleAbsTol) || !close_abs(g.effective_count, w.count, kOracleAbsTol) ||
            !close_abs(g.padding, w.padding, kOracleAbsTol) || !close_abs(g.index, w.mean + w.padding, kOracleAbsTol) ||
            !close_abs(g.effective_total, w.log_argument, kOracleAbsTol))
        {
            return false;
        }
    }
    return true;
}

struct History
{
    PolicyConfig config;
    std::vector<Sample> samples;
};

History random_history(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    History h;
    PolicyConfig& c = h.config;
    c.num_arms = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    c.reward_bound = 0.5 + 1.5 * u(rng);
    c.exploration_xi = 0.1 + 1.9 * u(rng);
    c.discount = 0.5 + 0.5 * u(rng);
    c.t_ac_slots = std::uniform_int_distribution<std::int64_t>(1, 64)(rng);
    c.window_slots = std::uniform_int_distribution<std::int64_t>(1, 32)(rng);
    const std::size_t length = std::uniform_int_distribution<std::size_t>(c.num_arms, 500)(rng);
    std::uniform_int_distribution<ArmId> arm(1, c.num_arms);
    for (std::size_t s = 1; s <= length; ++s)
    {
        h.samples.push_back({s <= c.num_arms ? s : arm(rng), c.reward_bound * u(rng)});
    }
    return h;
}

RewardHistory to_history(const History& h)
{
    RewardHistory out(h.config.num_arms, h.config.reward_bound);
    for (const Sample& s : h.samples)
    {
        out.append(s.arm, s.reward);
    }
    return out;
}

constexpr std::array kIndexKinds{PolicyKind::ucb, PolicyKind::ducb, PolicyKind::cducb, PolicyKind::cwucb};

Outcome oracle_equivalence()
{
    Outcome o;
    std::mt19937_64 rng(20240501);
    std::size_t checks = 0;
    for (PolicyKind kind : kIndexKinds)
    {
        for (int trial = 0; trial < 120; ++trial)
        {
            const History h = random_history(rng);
            const RewardHistory history = to_history(h);
            const auto t = static_cast<std::int64_t>(h.samples.size()) + 1;
            const auto want = brute_force(kind, h.samples, h.config, t);
            const std::string where = std::string(to_string(kind)) + " history " + std::to_string(trial);
            o.require(matches_oracle(indices_for(kind, history, h.config, t), want), where + " (direct)");

            auto policy = make_policy(kind, h.config);
            for (const Sample& s : h.samples)
            {
                policy->replay(s.arm, s.reward);
            }
            o.require(matches_oracle(dynamic_cast<const IndexPolicy&>(*policy).indices(), want), where + " (incremental)");
            checks += 2;
        }
    }
    if (o.pass)
    {
        o.detail = std::to_string(checks) + " index sets within " + fmt(kOracleAbsTol) + " (" + std::to_string(ulp_floor_uses) +
                   " large values matched to " + fmt(kOracleUlpFloor) + " ulp)";
    }
    return o;
}

bool same_means(const std::vector<IndexBreakdown>& a, const std::vector<IndexBreakdown>& b)
{
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        if (a[k].empirical_mean != b[k].empirical_mean)
        {
            return false;
        }
    }
    return true;
}

Outcome reduction_identities()
{
    Outcome o;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial)
    {
        History h = random_history(rng);
        const auto t = static_cast<std::int64_t>(h.samples.size());

        PolicyConfig cyclic = h.config;
        cyclic.t_ac_slots = t + 1 + trial;
        const RewardHistory history = to_history(h);
        const auto d = ducb_indices(history, cyclic, t);
        const auto cd = cducb_indices(history, cyclic, t);
        for (std::size_t k = 0; k < d.size(); ++k)
        {
            o.require(d[k].empirical_mean == cd[k].empirical_mean && d[k].effective_count == cd[k].effective_count &&
                          d[k].padding == cd[k].padding && d[k].index == cd[k].index,
                      "cd-ucb differs from d-ucb before the first cycle");
        }

        PolicyConfig unit = h.config;
        unit.discount = 1.0;
        o.require(same_means(ducb_indices(history, unit, t), ucb_indices(history, unit, t)), "d-ucb with unit discount differs from ucb");

        PolicyConfig wide = h.config;
        wide.t_ac_slots = t + 1;
        wide.window_slots = 2 * t;
        o.require(same_means(cwucb_indices(history, wide, t), ucb_indices(history, wide, t)), "single wide window differs from ucb");
    }
    return o;
}

struct PolicyFinal
{
    double mean;
    double stddev;
    std::size_t n;
};

double pooled_se(const PolicyFinal& a, const PolicyFinal& b)
{
    return std::sqrt(a.stddev * a.stddev / static_cast<double>(a.n) + b.stddev * b.stddev / static_cast<double>(b.n));
}

std::map<std::string, PolicyFinal> finals(const std::vector<AggregateMetrics>& results, bool pct)
{
    std::map<std::string, PolicyFinal> out;
    for (const AggregateMetrics& m : results)
    {
        const FinalStats& s = pct ? m.final_pct_correct : m.final_regret;
        out[m.label] = {s.mean, s.stddev, m.num_seeds};
    }
    return out;
}

const PolicyFinal& best_low(const std::map<std::string, PolicyFinal>& f, const char* a, const char* b)
{
    return f.at(a).mean <= f.at(b).mean ? f.at(a) : f.at(b);
}

Outcome regret_ordering(const std::vector<AggregateMetrics>& results)
{
    Outcome o;
    const auto f = finals(results, false);
    const PolicyFinal& proposed = best_low(f, "cd-ucb", "cw-ucb");
    const PolicyFinal& classic = best_low(f, "ucb", "d-ucb");
    const PolicyFinal& baseline = best_low(f, "random", "fixed");
    o.require(f.at("oracle").mean == 0.0, "oracle regret is not zero");
    o.require(0.0 < proposed.mean, "best proposed regret is not positive");
    o.require(proposed.mean < classic.mean, "best proposed regret is not below best classic");
    o.require(classic.mean < baseline.mean, "best classic regret is not below the better baseline");
    const double gap_se = (classic.mean - proposed.mean) / pooled_se(proposed, classic);
    o.require(gap_se > kStandardErrors, "proposed-vs-classic gap is only " + fmt(gap_se) + " pooled SE");
    std::ostringstream os;
    os << "oracle " << fmt(f.at("oracle").mean) << " < proposed " << fmt(proposed.mean) << " < classic " << fmt(classic.mean)
       << " < baseline " << fmt(baseline.mean) << ", gap " << fmt(gap_se) << " SE";
    if (o.pass)
    {
        o.detail = os.str();
    }
    else
    {
        o.detail += " [" + os.str() + "]";
    }
    return o;
}

Outcome pct_ordering(const std::vector<AggregateMetrics>& results, std::size_t num_arms)
{
    Outcome o;
    const auto f = finals(results, true);
    const auto lower = [&](const char* a, const char* b) -> const PolicyFinal& { return f.at(a).mean <= f.at(b).mean ? f.at(a) : f.at(b); };
    const auto upper = [&](const char* a, const char* b) -> const PolicyFinal& { return f.at(a).mean >= f.at(b).mean ? f.at(a) : f.at(b); };
    const PolicyFinal& oracle = f.at("oracle");
    const PolicyFinal& proposed_hi = upper("cd-ucb", "cw-ucb");
    const PolicyFinal& proposed_lo = lower("cd-ucb", "cw-ucb");
    const PolicyFinal& classic_hi = upper("ucb", "d-ucb");
    const PolicyFinal& classic_lo = lower("ucb", "d-ucb");
    const PolicyFinal& random = f.at("random");
    const PolicyFinal& fixed = f.at("fixed");
    o.require(oracle.mean == 100.0, "oracle is not 100% correct");
    const std::vector<std::tuple<const char*, const PolicyFinal*, const PolicyFinal*>> gaps{
        {"oracle > proposed", &oracle, &proposed_hi},
        {"proposed > classic", &proposed_lo, &classic_hi},
        {"classic > random", &classic_lo, &random},
        {"random > fixed", &random, &fixed},
    };
    std::ostringstream os;
    for (const auto& [name, hi, lo] : gaps)
    {
        const double se = pooled_se(*hi, *lo);
        const double margin = hi->mean - lo->mean;
        o.require(margin > kStandardErrors * se, std::string(name) + " gap " + fmt(margin) + " is within " + fmt(kStandardErrors) + " SE");
        os << name << " by " << fmt(margin) << "; ";
    }
    const double uniform = 100.0 / static_cast<double>(num_arms);
    o.require(std::abs(random.mean - uniform) <= kRandomPctWindow, "random " + fmt(random.mean) + "% is not within 3 points of " + fmt(uniform));
    os << "random " << fmt(random.mean) << "% vs " << fmt(uniform) << "%";
    if (o.pass)
    {
        o.detail = os.str();
    }
    return o;
}

Outcome channel_physics()
{
    Outcome o;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FrequencyGrid grid = FrequencyGrid::from_spacing(60937.5, 4687.5, 102);
    const auto cable = [&] {
        return CablePrimaryParams{0.01 + 0.5 * u(rng), 0.2e-6 + 1e-6 * u(rng), 1e-6 + 1e-4 * u(rng), 50e-12 + 200e-12 * u(rng)};
    };
    for (int trial = 0; trial < 50; ++trial)
    {
        const TwoPortABCD x = abcd_of_segment({cable(), 2000.0 * u(rng)}, grid);
        const TwoPortABCD y = abcd_of_segment({cable(), 1000.0 * u(rng)}, grid);
        const TwoPortABCD z = abcd_of_segment({cable(), 1000.0 * u(rng)}, grid);
        const TwoPortABCD left = cascade_abcd(cascade_abcd(x, y), z);
        const TwoPortABCD right = cascade_abcd(x, cascade_abcd(y, z));
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            const AbcdMatrix& e = x.entries[i];
            o.require(std::abs(e.determinant() - Complex(1.0, 0.0)) <= kDeterminantRelTol * std::max(1.0, std::abs(e.a * e.d)),
                      "ABCD determinant differs from 1");
            for (auto member : {&AbcdMatrix::a, &AbcdMatrix::b, &AbcdMatrix::c, &AbcdMatrix::d})
            {
                const Complex l = left.entries[i].*member;
                o.require(std::abs(l - right.entries[i].*member) <= kAssociativityTol * std::max(1.0, std::abs(l)), "cascade not associative");
            }
        }
    }
    for (const AbcdMatrix& e : abcd_of_segment({cable(), 0.0}, grid).entries)
    {
        o.require(std::abs(e.a - 1.0) <= kIdentityTol && std::abs(e.b) <= kIdentityTol && std::abs(e.c) <= kIdentityTol &&
                      std::abs(e.d - 1.0) <= kIdentityTol,
                  "zero-length segment is not the identity");
    }
    const CyclostationaryNoiseModel noise{{{1.0, 0.0, 0.0}, {8.0, 0.0, 12.0}, {4.0, 1.0, 30.0}}, 32};
    for (std::int64_t t = 0; t < 320; ++t)
    {
        o.require(noise_power(noise, t) == noise_power(noise, t + 32), "noise is not exactly periodic");
    }
    const LinkBudget unit_snr{1e-9, 1e-10, 10.0, grid};
    const double rate = link_rate(TransferFunction::unity(grid), unit_snr, 1.0);
    o.require(std::abs(rate - grid.bandwidth_hz()) <= kFlatSnrRelTol * grid.bandwidth_hz(), "flat SNR=1 rate differs from bandwidth");
    for (int i = 0; i < 1000; ++i)
    {
        const double a = 1e7 * u(rng);
        const double b = 1e7 * u(rng);
        o.require(end_to_end_capacity(std::array{a, b}) == 0.5 * std::min(a, b), "end-to-end is not half the minimum");
    }
    return o;
}

ExperimentConfig only(ExperimentConfig c, std::initializer_list<const char*> labels)
{
    std::vector<PolicySection> kept;
    for (const PolicySection& p : c.policies)
    {
        for (const char* l : labels)
        {
            if (p.label == l)
            {
                kept.push_back(p);
            }
        }
    }
    c.policies = kept;
    return c;
}

Outcome sweep_distinct(const ExperimentConfig& config, SweepParameter param, const std::vector<double>& values)
{
    Outcome o;
    const auto points = simulate_sweep(config, param, values);
    std::map<std::string, std::vector<double>> by_policy;
    for (const SweepPoint& p : points)
    {
        for (const AggregateMetrics& m : p.results)
        {
            by_policy[m.label].push_back(m.final_regret.mean);
        }
    }
    std::ostringstream os;
    for (const auto& [label, regrets] : by_policy)
    {
        os << label << " {";
        for (std::size_t i = 0; i < regrets.size(); ++i)
        {
            os << (i ? ", " : "") << fmt(regrets[i]);
            for (std::size_t j = i + 1; j < regrets.size(); ++j)
            {
                const double scale = std::max(std::abs(regrets[i]), std::abs(regrets[j]));
                o.require(std::abs(regrets[i] - regrets[j]) > kSweepDistinctRelTol * scale,
                          label + " regret is the same for " + fmt(points[i].value) + " and " + fmt(points[j].value));
            }
        }
        os << "} ";
    }
    if (o.pass)
    {
        o.detail = os.str();
    }
    return o;
}

Outcome relay_monotonicity(const ExperimentConfig& config)
{
    Outcome o;
    const auto points = simulate_sweep(only(config, {"cw-ucb"}), SweepParameter::num_relays, {3, 6, 9});
    std::ostringstream os;
    double previous = -1.0;
    for (const SweepPoint& p : points)
    {
        const double r = p.results.at(0).final_regret.mean;
        os << "N=" << p.value << ": " << fmt(r) << "; ";
        o.require(r >= previous, "cw-ucb regret decreases at N=" + fmt(p.value));
        previous = r;
    }
    o.detail += (o.detail.empty() ? "" : " ") + os.str();
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism()
{
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "plcbandit_acceptance";
    fs::remove_all(root);
    for (const char* sub : {"a", "b"})
    {
        const std::string cmd = std::string(PLCBANDIT_CLI_PATH) + " run " + kDefaultIni + " -o " + (root / sub).string() + " >/dev/null";
        o.require(std::system(cmd.c_str()) == 0, std::string("plcbandit run exited nonzero (") + sub + ")");
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "a"))
    {
        const fs::path other = root / "b" / entry.path().filename();
        o.require(fs::exists(other) && slurp(entry.path()) == slurp(other), entry.path().filename().string() + " differs");
        ++compared;
    }
    o.require(compared == 8, "expected 8 output files, found " + std::to_string(compared));
    if (o.pass)
    {
        o.detail = std::to_string(compared) + " files byte-identical";
    }
    fs::remove_all(root);
    return o;
}

} // namespace

int main()
{
    report(1, "oracle equivalence of the four confidence indices", oracle_equivalence, kOracleLimitS);
    report(2, "reduction identities", reduction_identities, kReductionLimitS);

    const ExperimentConfig config = load_config(kDefaultIni);
    std::vector<AggregateMetrics> results;
    double default_run_s = 0.0;
    {
        const auto start = std::chrono::steady_clock::now();
        results = simulate(config);
        default_run_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    std::printf("default scenario: %zu relays, %lld slots, %lld seeds simulated in %.1f s\n", effective_relays(config).size(),
                static_cast<long long>(config.scenario.horizon_slots), static_cast<long long>(config.execution.num_seeds), default_run_s);
    report(3, "final regret ordering", [&] {
        Outcome o = regret_ordering(results);
        o.require(default_run_s <= kOrderingLimitS, "default run took " + fmt(default_run_s) + " s");
        return o;
    });
    report(4, "percentage-correct ordering", [&] { return pct_ordering(results, effective_relays(config).size()); });
    report(5, "channel physics identities", channel_physics, kPhysicsLimitS);
    report(6, "discount sweep {0.9, 0.99, 0.999} is non-degenerate",
           [&] { return sweep_distinct(config, SweepParameter::discount, {0.9, 0.99, 0.999}); }, kSweepLimitS);
    const double t_ac = static_cast<double>(config.t_ac_slots);
    report(6, "window sweep {T/8, T/4, T/2} is non-degenerate",
           [&] { return sweep_distinct(config, SweepParameter::window_slots, {t_ac / 8, t_ac / 4, t_ac / 2}); }, kSweepLimitS);
    report(7, "cw-ucb regret non-decreasing over 3, 6, 9 relays", [&] { return relay_monotonicity(config); });
    report(8, "two CLI runs of the default config are byte-identical", cli_determinism);

    std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
