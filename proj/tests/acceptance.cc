// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "support.h"

#include "uavpos/agent.h"
#include "uavpos/config_io.h"
#include "uavpos/env.h"
#include "uavpos/geometry.h"
#include "uavpos/linkmac.h"
#include "uavpos/metrics.h"
#include "uavpos/radio.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace uavpos;
using namespace uavpos::testing;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass{false};
    std::string detail;
};

int g_failures = 0;

void
Run(const std::string& name, double budgetSeconds, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try
    {
        out = body();
    }
    catch (const std::exception& e)
    {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool inTime = secs <= budgetSeconds;
    const bool pass = out.pass && inTime;
    if (!pass)
    {
        ++g_failures;
    }
    std::printf("%s  %-34s %s (%.1f s of %.0f s)\n",
                pass ? "PASS" : "FAIL",
                name.c_str(),
                out.detail.c_str(),
                secs,
                budgetSeconds);
    std::fflush(stdout);
}

std::string
Slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

template <typename... Args>
std::string
Format(const char* fmt, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

Outcome
RewardSuite()
{
    const double a = ComputeReward(4, 4, 234.0, 234.0, 0.8, 0.2);
    const double b = ComputeReward(2, 4, 0.0, 234.0, 0.8, 0.2);
    const double c = ComputeReward(3, 4, 117.0, 234.0, 0.8, 0.2);
    bool exact = std::abs(a - 1.0) <= 1e-12 && std::abs(b - 0.4) <= 1e-12 && std::abs(c - 0.7) <= 1e-12;

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int outside = 0;
    for (int i = 0; i < 100000; ++i)
    {
        const int n = 1 + static_cast<int>(u(rng) * 50);
        const int nLos = static_cast<int>(u(rng) * (n + 1));
        const double demand = 1e-3 + 1000.0 * u(rng);
        const double thr = 3.0 * demand * u(rng);
        const double w1 = u(rng);
        const double r = ComputeReward(nLos, n, thr, demand, w1, 1.0 - w1);
        outside += (r < 0.0 || r > 1.0) ? 1 : 0;
    }
    return {exact && outside == 0,
            Format("cases %.15g/%.15g/%.15g, %d of 100000 outside [0,1]", a, b, c, outside)};
}

Outcome
GeometryOracle()
{
    std::mt19937_64 rng(20240);
    int compared = 0;
    int agree = 0;
    int banded = 0;
    while (compared + banded < 10000)
    {
        const auto c = RandomSegmentCase(rng);
        const double depth = SampledMaxDepth(c.p0, c.p1, c.box, 1000);
        if (std::abs(depth) <= 1e-6)
        {
            ++banded;
            continue;
        }
        ++compared;
        agree += SegmentIntersectsBox(c.p0, c.p1, c.box) == (depth > 0.0) ? 1 : 0;
    }
    return {agree == compared, Format("%d/%d agree, %d in tolerance band", agree, compared, banded)};
}

Outcome
RadioAnchors()
{
    const RadioConfig cfg;
    const double friis = FriisLoss(100.0, cfg);
    const double rbp = ItuR1411Breakpoint(cfg, 20.0, 1.5);
    const double left = ItuR1411LosLoss(std::nextafter(rbp, 0.0), cfg, 20.0, 1.5);
    const double right = ItuR1411LosLoss(std::nextafter(rbp, 1e12), cfg, 20.0, 1.5);
    const double jump = std::abs(right - left);
    const auto table = DefaultMcsTable();
    const bool rates = table.size() >= 4 && table[0].phyRate == 58.5 && table[1].phyRate == 117.0 &&
                       table[2].phyRate == 175.5 && table[3].phyRate == 234.0;
    return {std::abs(friis - 86.85) <= 0.01 && jump < 1e-9 && rates,
            Format("friis(100 m) %.4f dB, breakpoint jump %.2e dB, anchors %s", friis, jump, rates ? "exact" : "WRONG")};
}

Outcome
GradientCheck()
{
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        worst = std::max(worst, GradientCheckError(rng));
    }
    return {worst < 1e-4, Format("max relative error %.2e over 20 nets", worst)};
}

Outcome
AnalyticDesConsistency()
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double rates[] = {58.5, 117.0, 175.5, 234.0};
    int checked = 0;
    int within = 0;
    double worst = 0.0;
    while (checked < 20)
    {
        auto s = OpenScenario(2 + static_cast<int>(u(rng) * 6), 58.5);
        if (u(rng) < 0.5)
        {
            // Put an obstacle in the way for half of them.
            s.buildings.push_back({30 + 20 * u(rng), 55 + 10 * u(rng), 30 + 20 * u(rng), 55 + 10 * u(rng), 5 + 20 * u(rng), 3, 1, 1});
        }
        for (auto& ue : s.ues)
        {
            do
            {
                ue.position = {100.0 * u(rng), 100.0 * u(rng), 1.5};
            } while (InsideAnyBuilding(ue.position, s.buildings));
            ue.demand = rates[static_cast<int>(u(rng) * 4)] * (0.05 + 0.4 * u(rng));
            ue.requiredMcs = RequiredMcs(ue.demand, s.mcsTable);
        }
        const Position3 p{100.0 * u(rng), 100.0 * u(rng), 20.0 + 40.0 * u(rng)};
        if (InsideAnyBuilding(p, s.buildings) || !DemandFeasible(s, p))
        {
            continue;
        }
        const auto a = AnalyticEvaluate(s, p);
        if (a.utilization > 0.9)
        {
            continue;
        }
        const auto d = DesRun(s, p, 20.0, static_cast<std::uint64_t>(checked + 1), false);
        const double rel = std::abs(a.aggregateThroughput - d.aggregate) / d.aggregate;
        worst = std::max(worst, rel);
        within += rel <= 0.15 ? 1 : 0;
        ++checked;
    }
    return {within == checked, Format("%d/%d within 15%%, worst %.4f", within, checked, worst)};
}

struct OracleRun
{
    ScenarioConfig scenario;
    OracleResult oracle;
};

OracleRun&
ScenarioB()
{
    static OracleRun run = [] {
        OracleRun r;
        r.scenario = LoadScenario(ScenarioPath("scenario_b.json"));
        r.oracle = GridOracle(r.scenario, 2.5);
        return r;
    }();
    return run;
}

Outcome
OracleReproduction()
{
    const auto& [s, best] = ScenarioB();
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t k = 1; k <= 30; ++k)
    {
        seeds.push_back(k);
    }
    const auto eval = [&](const Position3& p) {
        const auto e = EvaluatePosition(s, p, seeds, 100.0);
        return std::pair{Median(e.throughput.samples), Median(e.delay.samples)};
    };

    const auto [oThr, oDelay] = eval(best.position);
    std::vector<Position3> others{s.candidatePositions.front()};
    for (const auto& p : DisplacedPositions(s, best.position))
    {
        others.push_back(p);
    }
    bool pass = best.report.nLos == 4;
    double bestOtherThr = 0.0;
    double bestOtherDelay = 1e300;
    for (const auto& p : others)
    {
        const auto [thr, delay] = eval(p);
        pass = pass && oThr > thr && oDelay < delay;
        bestOtherThr = std::max(bestOtherThr, thr);
        bestOtherDelay = std::min(bestOtherDelay, delay);
    }
    return {pass,
            Format("oracle (%.1f,%.1f,%.1f) nLoS %d: %.2f Mbit/s, %.3g s; best other %.2f Mbit/s, %.3g s",
                   best.position.x,
                   best.position.y,
                   best.position.z,
                   best.report.nLos,
                   oThr,
                   oDelay,
                   bestOtherThr,
                   bestOtherDelay)};
}

std::vector<TrainResult>&
TrainingRuns()
{
    static std::vector<TrainResult> runs = [] {
        std::vector<TrainResult> r;
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
        {
            r.push_back(Train(ScenarioB().scenario, seed));
        }
        return r;
    }();
    return runs;
}

Outcome
EndToEndRl()
{
    const double target = 0.9 * ScenarioB().oracle.reward;
    int hits = 0;
    std::string rewards;
    for (const auto& r : TrainingRuns())
    {
        hits += r.bestReward >= target ? 1 : 0;
        rewards += Format("%.3f ", r.bestReward);
    }
    return {hits >= 8, Format("%d/10 seeds reach %.3f; best rewards %s", hits, target, rewards.c_str())};
}

Outcome
TrainingImproves()
{
    int improved = 0;
    for (const auto& r : TrainingRuns())
    {
        const auto& e = r.episodeReturns;
        const std::size_t n = e.size();
        improved += (e[n - 1] + e[n - 2] >= e[0] + e[1]) ? 1 : 0;
    }
    return {improved >= 8, Format("%d/10 seeds end at least as high as they start", improved)};
}

Outcome
RlVersusOracleA()
{
    const auto s = LoadScenario(ScenarioPath("scenario_a.json"));
    const double target = 0.9 * GridOracle(s, 2.5).reward;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        hits += Train(s, seed).bestReward >= target ? 1 : 0;
    }
    return {hits == 3, Format("%d/3 seeds reach %.3f", hits, target)};
}

Outcome
Determinism()
{
    const auto& s = ScenarioB().scenario;
    const auto a = Train(s, 7);
    const auto b = Train(s, 7);
    const bool train = a.episodeReturns == b.episodeReturns && a.policy == b.policy;

    const fs::path root = fs::temp_directory_path() / "uavpos_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
    bool files = true;
    std::vector<std::vector<fs::path>> written;
    for (const char* dir : {"first", "second"})
    {
        const auto e = EvaluatePosition(s, ScenarioB().oracle.position, seeds, 20.0);
        const ExportManifest m{"scenario_b.json", "eval", seeds, {e.position}, 20.0};
        written.push_back(ExportMetrics({e.throughput, e.delay}, m, root / dir));
    }
    for (std::size_t i = 0; i < written[0].size(); ++i)
    {
        files = files && Slurp(written[0][i]) == Slurp(written[1][i]);
    }
    fs::remove_all(root);
    return {train && files,
            Format("train seed 7 logs %s, %zu metric files %s",
                   train ? "identical" : "DIFFER",
                   written[0].size(),
                   files ? "byte-identical" : "DIFFER")};
}

} // namespace

int
main()
{
    Run("reward unit suite", 1.0, RewardSuite);
    Run("geometry oracle suite", 10.0, GeometryOracle);
    Run("radio anchors", 1.0, RadioAnchors);
    Run("DQN gradient check", 30.0, GradientCheck);
    Run("analytic-DES consistency", 120.0, AnalyticDesConsistency);
    Run("oracle reproduction (scenario B)", 600.0, OracleReproduction);
    Run("end-to-end RL (scenario B)", 900.0, EndToEndRl);
    Run("determinism", 300.0, Determinism);
    std::cout << "-- properties\n";
    Run("training improves over random", 900.0, TrainingImproves);
    Run("RL vs oracle (scenario A)", 900.0, RlVersusOracleA);
    std::cout << (g_failures == 0 ? "all criteria passed\n" : "some criteria failed\n");
    return g_failures == 0 ? 0 : 1;
}
