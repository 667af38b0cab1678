#include "uavpos/env.h"

#include "uavpos/errors.h"
#include "uavpos/log.h"

#include <algorithm>

namespace uavpos
{

std::string_view
ActionName(Action a)
{
    switch (a)
    {
    case Action::Up:
        return "up";
    case Action::Down:
        return "down";
    case Action::Forward:
        return "forward";
    case Action::Backward:
        return "backward";
    case Action::Left:
        return "left";
    case Action::Right:
        return "right";
    case Action::Stay:
        return "stay";
    }
    return "?";
}

std::optional<Action>
ActionFromCode(int code)
{
    if (code < 0 || code >= kActionCount)
    {
        return std::nullopt;
    }
    return static_cast<Action>(code);
}

std::vector<double>
Observation::Features(bool withThroughput) const
{
    std::vector<double> f{normalized[0],
                          normalized[1],
                          normalized[2],
                          ueCount > 0 ? static_cast<double>(nLos) / ueCount : 0.0};
    if (withThroughput)
    {
        f.push_back(throughputNorm);
    }
    return f;
}

double
ComputeReward(int nLos, int ueCount, double throughput, double totalDemand, double w1, double w2)
{
    const double losNorm = static_cast<double>(nLos) / ueCount;
    const double throughputNorm = std::clamp(throughput / totalDemand, 0.0, 1.0);
    return w1 * losNorm + w2 * throughputNorm;
}

LinkReport
Snapshot(const ScenarioConfig& s, const Position3& position)
{
    return AnalyticEvaluate(s, position);
}

double
SnapshotReward(const ScenarioConfig& s, const Position3& position)
{
    const auto report = AnalyticEvaluate(s, position);
    return ComputeReward(report.nLos,
                         static_cast<int>(s.ues.size()),
                         report.aggregateThroughput,
                         s.TotalDemand(),
                         s.env.w1,
                         s.env.w2);
}

Position3
ApplyAction(const ScenarioConfig& s, const Position3& from, Action a)
{
    const double step = s.env.stepSize;
    Position3 to = from;
    switch (a)
    {
    case Action::Up:
        to.z += step;
        break;
    case Action::Down:
        to.z -= step;
        break;
    case Action::Forward:
        to.y += step;
        break;
    case Action::Backward:
        to.y -= step;
        break;
    case Action::Left:
        to.x -= step;
        break;
    case Action::Right:
        to.x += step;
        break;
    case Action::Stay:
        return from;
    }
    return ClampToZone(to, from, s.zone, s.buildings);
}

Env::Env(ScenarioConfig scenario, std::uint64_t seed)
    : m_scenario(std::move(scenario)),
      m_seed(seed)
{
}

int
Env::ObservationSize() const
{
    return m_scenario.env.throughputInObservation ? 5 : 4;
}

Observation
Env::Observe(int nLos, double throughputNorm) const
{
    Observation obs;
    obs.position = m_position;
    const auto& z = m_scenario.zone;
    auto norm = [](double v, const Interval& iv) {
        const double span = iv.max - iv.min;
        return span > 0.0 ? (v - iv.min) / span : 0.0;
    };
    obs.normalized = {norm(m_position.x, z.x), norm(m_position.y, z.y), norm(m_position.z, z.z)};
    obs.nLos = nLos;
    obs.ueCount = static_cast<int>(m_scenario.ues.size());
    obs.throughputNorm = throughputNorm;
    return obs;
}

Observation
Env::Reset(std::uint64_t seed)
{
    m_seed = seed;
    return Reset();
}

Observation
Env::Reset()
{
    const Position3 start = m_scenario.InitialPosition();
    if (!m_scenario.zone.Contains(start))
    {
        throw InvalidScenario("initial position lies outside the action zone");
    }
    if (InsideAnyBuilding(start, m_scenario.buildings))
    {
        throw InvalidScenario("initial position lies inside a building");
    }
    m_position = start;
    m_steps = 0;
    m_done = false;
    m_started = true;
    m_trace.clear();
    m_medium.reset();
    if (m_scenario.env.mode == EvaluatorMode::Des)
    {
        m_medium = std::make_unique<DesMedium>(m_scenario, m_seed);
        m_medium->SetTrace(&m_trace);
    }
    const int nLos = CountLos(m_position, m_scenario.UePositions(), m_scenario.buildings);
    return Observe(nLos, 0.0);
}

StepResult
Env::Step(Action action)
{
    if (!m_started)
    {
        throw EpisodeFinished("step called before reset");
    }
    if (m_done)
    {
        throw EpisodeFinished("episode already finished; call reset");
    }

    m_position = ApplyAction(m_scenario, m_position, action);
    ++m_steps;

    const auto report = AnalyticEvaluate(m_scenario, m_position);
    StepInfo info;
    info.nLos = report.nLos;
    info.feasible = report.feasible;

    if (m_medium)
    {
        std::vector<double> rates;
        rates.reserve(report.ues.size());
        for (const auto& link : report.ues)
        {
            rates.push_back(link.phyRate);
        }
        const double interval = m_scenario.env.decisionInterval;
        const double now = m_steps * interval;
        m_trace.clear();
        m_medium->SetRates(rates, FallbackRate(m_scenario));
        m_medium->AdvanceTo(now);
        info.aggregateThroughput = WindowThroughput(m_trace, now, interval);
        double delaySum = 0.0;
        for (const auto& d : m_trace)
        {
            delaySum += d.delay;
        }
        info.meanDelay = m_trace.empty() ? 0.0 : delaySum / static_cast<double>(m_trace.size());
    }
    else
    {
        info.aggregateThroughput = report.aggregateThroughput;
        info.meanDelay = report.meanDelay;
    }

    const double total = m_scenario.TotalDemand();
    StepResult result;
    result.reward = ComputeReward(info.nLos,
                                  static_cast<int>(m_scenario.ues.size()),
                                  info.aggregateThroughput,
                                  total,
                                  m_scenario.env.w1,
                                  m_scenario.env.w2);
    result.observation = Observe(info.nLos, std::min(info.aggregateThroughput / total, 1.0));
    m_done = m_steps >= m_scenario.env.StepsPerEpisode();
    result.done = m_done;
    result.info = info;

    UAVPOS_LOG(Debug,
               "step " << m_steps << " " << ActionName(action) << " pos=(" << m_position.x << ","
                       << m_position.y << "," << m_position.z << ") nLoS=" << info.nLos
                       << " thr=" << info.aggregateThroughput << " reward=" << result.reward);
    return result;
}

} // namespace uavpos
