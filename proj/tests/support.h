// Helpers and independent reference computations shared by the test binaries.

#ifndef UAVPOS_TESTS_SUPPORT_H
#define UAVPOS_TESTS_SUPPORT_H

#include "uavpos/agent.h"
#include "uavpos/geometry.h"
#include "uavpos/linkmac.h"
#include "uavpos/scenario.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace uavpos::testing
{

inline std::string
ScenarioPath(const std::string& name)
{
    return std::string(UAVPOS_SCENARIO_DIR) + "/" + name;
}

// Signed distance from p to the box boundary, positive strictly inside.
inline double
InteriorDepth(const Position3& p, const Building& b)
{
    return std::min({p.x - b.xMin, b.xMax - p.x, p.y - b.yMin, b.yMax - p.y, p.z, b.height - p.z});
}

inline Position3
Lerp(const Position3& a, const Position3& b, double t)
{
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
}

/**
 * Deepest penetration of the segment into the box. Dense sampling finds the
 * best sample; depth is concave along a line, so the true maximum lies
 * within one sample step of it and a ternary search pins it down.
 */
inline double
SampledMaxDepth(const Position3& p0, const Position3& p1, const Building& b, int samples = 1000)
{
    int best = 0;
    double bestDepth = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i)
    {
        const double t = static_cast<double>(i) / (samples - 1);
        const double d = InteriorDepth(Lerp(p0, p1, t), b);
        if (d > bestDepth)
        {
            bestDepth = d;
            best = i;
        }
    }
    const double step = 1.0 / (samples - 1);
    double lo = std::max(0.0, (best - 1) * step);
    double hi = std::min(1.0, (best + 1) * step);
    for (int k = 0; k < 200; ++k)
    {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (InteriorDepth(Lerp(p0, p1, m1), b) < InteriorDepth(Lerp(p0, p1, m2), b))
        {
            lo = m1;
        }
        else
        {
            hi = m2;
        }
    }
    return std::max(bestDepth, InteriorDepth(Lerp(p0, p1, 0.5 * (lo + hi)), b));
}

struct SegmentCase
{
    Position3 p0;
    Position3 p1;
    Building box;
};

// Boxes inside a 100 m cube. One endpoint is anywhere, the other near the
// box, so hits, near misses and clean misses all show up.
inline SegmentCase
RandomSegmentCase(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SegmentCase c;
    c.box.xMin = 60.0 * u(rng);
    c.box.xMax = c.box.xMin + 5.0 + 35.0 * u(rng);
    c.box.yMin = 60.0 * u(rng);
    c.box.yMax = c.box.yMin + 5.0 + 35.0 * u(rng);
    c.box.height = 5.0 + 35.0 * u(rng);
    auto around = [&](double lo, double hi) { return lo - 10.0 + (hi - lo + 20.0) * u(rng); };
    c.p0 = {100.0 * u(rng), 100.0 * u(rng), 60.0 * u(rng)};
    c.p1 = {around(c.box.xMin, c.box.xMax), around(c.box.yMin, c.box.yMax), around(0.0, c.box.height)};
    c.p1.z = std::max(c.p1.z, 0.0);
    return c;
}

inline double
ReferenceFriis(double d, double f)
{
    constexpr double c = 2.99792458e8;
    const double ratio = 4.0 * std::numbers::pi * d * f / c;
    return 10.0 * std::log10(ratio * ratio);
}

/// UEs on a 20 m grid in a 100 x 100 venue with no buildings; demand per UE as given.
inline ScenarioConfig
OpenScenario(int ueCount, double demand)
{
    ScenarioConfig s;
    s.name = "open";
    s.zone = {{0.0, 100.0}, {0.0, 100.0}, {1.0, 60.0}};
    for (int i = 0; i < ueCount; ++i)
    {
        UeSpec ue;
        ue.id = i;
        ue.position = {20.0 + 20.0 * (i % 4), 20.0 + 20.0 * (i / 4), 1.5};
        ue.demand = demand;
        ue.requiredMcs = RequiredMcs(demand, s.mcsTable);
        s.ues.push_back(ue);
    }
    s.env.mode = EvaluatorMode::Analytic;
    s.logLevel = LogLevel::Error;
    return s;
}

/**
 * Largest relative gap between the analytic gradient of a random small
 * network and central finite differences with step \p h.
 */
inline double
GradientCheckError(std::mt19937_64& rng, double h = 1e-5)
{
    std::uniform_int_distribution<int> size(2, 6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QNetwork net(size(rng), size(rng), size(rng));
    net.Initialize(rng);
    // Non-zero biases so no unit sits exactly on the rectifier kink.
    for (double& p : net.Params())
    {
        p += 0.1 * u(rng);
    }

    const int batch = 5;
    std::vector<std::vector<double>> inputs(batch);
    std::vector<QNetwork::Sample> samples;
    std::uniform_int_distribution<int> action(0, net.Outputs() - 1);
    for (int i = 0; i < batch; ++i)
    {
        for (int k = 0; k < net.Inputs(); ++k)
        {
            inputs[i].push_back(u(rng));
        }
    }
    for (int i = 0; i < batch; ++i)
    {
        samples.push_back({inputs[i], action(rng), u(rng)});
    }

    std::vector<double> grad;
    net.LossAndGradient(samples, grad);
    std::vector<double> scratch;
    double worst = 0.0;
    for (std::size_t k = 0; k < net.Params().size(); ++k)
    {
        const double keep = net.Params()[k];
        net.Params()[k] = keep + h;
        const double up = net.LossAndGradient(samples, scratch);
        net.Params()[k] = keep - h;
        const double down = net.LossAndGradient(samples, scratch);
        net.Params()[k] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(grad[k]), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(grad[k] - numeric) / scale);
    }
    return worst;
}

} // namespace uavpos::testing

#endif
