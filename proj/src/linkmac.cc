#include "uavpos/linkmac.h"

#include "uavpos/errors.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace uavpos
{

int
RequiredMcs(double demand, std::span<const McsEntry> table)
{
    for (const auto& entry : table)
    {
        if (entry.phyRate >= demand)
        {
            return entry.index;
        }
    }
    throw DemandUnserviceable("demand " + std::to_string(demand) +
                              " Mbit/s exceeds the highest PHY rate");
}

std::vector<UeLink>
EvaluateLinks(const ScenarioConfig& s, const Position3& uav)
{
    std::vector<UeLink> links;
    links.reserve(s.ues.size());
    for (const auto& ue : s.ues)
    {
        UeLink link;
        link.los = HasLos(uav, ue.position, s.buildings);
        link.loss = PathLoss(uav, ue.position, link.los, s.HasObstacles(), s.radio, s.street);
        link.snr = SnrDb(s.radio, link.loss);
        if (auto mcs = SelectMcs(link.snr, s.mcsTable))
        {
            link.mcs = mcs->index;
            link.phyRate = mcs->phyRate;
            link.airRate = mcs->phyRate;
        }
        else
        {
            link.airRate = FallbackRate(s);
        }
        link.offered = ue.demand;
        links.push_back(link);
    }
    return links;
}

double
FallbackRate(const ScenarioConfig& s)
{
    return s.mcsTable.empty() ? 0.0 : s.mcsTable.front().phyRate;
}

double
FrameServiceTime(const MacParams& mac, double phyRate)
{
    return 8.0 * mac.packetSize / (mac.efficiency * phyRate * 1e6) + mac.frameOverhead;
}

double
AirtimeFraction(const MacParams& mac, double demand, double phyRate)
{
    const double packetsPerSecond = demand * 1e6 / (8.0 * mac.packetSize);
    return packetsPerSecond * FrameServiceTime(mac, phyRate);
}

bool
DemandFeasible(const ScenarioConfig& s, const Position3& uav)
{
    const auto links = EvaluateLinks(s, uav);
    double u = 0.0;
    for (std::size_t i = 0; i < links.size(); ++i)
    {
        const auto& link = links[i];
        if (!link.mcs)
        {
            return false;
        }
        const int req = s.ues[i].requiredMcs;
        if (link.snr < s.mcsTable.at(static_cast<std::size_t>(req)).minSnr)
        {
            return false;
        }
        u += AirtimeFraction(s.mac, s.ues[i].demand, link.phyRate);
    }
    return u <= 1.0;
}

LinkReport
AnalyticEvaluate(const ScenarioConfig& s, const Position3& uav)
{
    LinkReport report;
    report.ues = EvaluateLinks(s, uav);

    double u = 0.0;
    double servedDemand = 0.0;
    double weightedService = 0.0;
    for (const auto& link : report.ues)
    {
        report.nLos += link.los ? 1 : 0;
        if (link.airRate > 0.0)
        {
            u += AirtimeFraction(s.mac, link.offered, link.airRate);
        }
        if (link.phyRate <= 0.0)
        {
            continue;
        }
        servedDemand += link.offered;
        weightedService += link.offered * FrameServiceTime(s.mac, link.phyRate);
    }
    report.utilization = u;

    const double scale = u > 1.0 ? 1.0 / u : 1.0;
    for (auto& link : report.ues)
    {
        link.carried = link.phyRate > 0.0 ? link.offered * scale : 0.0;
        report.aggregateThroughput += link.carried;
    }
    if (servedDemand > 0.0)
    {
        const double meanService = weightedService / servedDemand;
        report.meanDelay = meanService / (1.0 - std::min(u, 0.999));
    }
    report.feasible = DemandFeasible(s, uav);
    return report;
}

double
WindowThroughput(std::span<const Delivery> deliveries, double now, double window)
{
    double bits = 0.0;
    for (const auto& d : deliveries)
    {
        if (d.time > now - window && d.time <= now)
        {
            bits += d.bits;
        }
    }
    return bits / window / 1e6;
}

DesMedium::DesMedium(const ScenarioConfig& s, std::uint64_t seed)
    : m_packetBits(8.0 * s.mac.packetSize),
      m_queueLimit(s.mac.queueLimit),
      m_mac(s.mac),
      m_deliveredBits(s.ues.size(), 0.0)
{
    std::mt19937_64 rng(seed);
    m_flows.resize(s.ues.size());
    for (std::size_t i = 0; i < s.ues.size(); ++i)
    {
        auto& f = m_flows[i];
        f.interval = m_packetBits / (s.ues[i].demand * 1e6);
        // 53 random bits -> [0, 1); independent of the standard library's distributions.
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        f.phase = unit * f.interval;
    }
}

void
DesMedium::SetRates(std::span<const double> phyRates, double fallbackRate)
{
    for (std::size_t i = 0; i < m_flows.size(); ++i)
    {
        auto& f = m_flows[i];
        const double r = i < phyRates.size() ? phyRates[i] : 0.0;
        f.failing = r <= 0.0;
        const double onAir = f.failing ? fallbackRate : r;
        f.serviceTime = onAir > 0.0 ? FrameServiceTime(m_mac, onAir) : 0.0;
    }
}

void
DesMedium::EnqueueArrivals(double t)
{
    for (auto& f : m_flows)
    {
        if (t < f.phase)
        {
            continue;
        }
        auto count = static_cast<std::int64_t>(std::floor((t - f.phase) / f.interval)) + 1;
        while (f.ArrivalTime(count) <= t)
        {
            ++count;
        }
        while (count > 0 && f.ArrivalTime(count - 1) > t)
        {
            --count;
        }
        const std::int64_t fresh = count - f.nextArrival;
        if (fresh <= 0)
        {
            continue;
        }
        const auto space =
            std::max<std::int64_t>(0, m_queueLimit - static_cast<std::int64_t>(f.queue.size()));
        const std::int64_t accepted = std::min(fresh, space);
        for (std::int64_t k = 0; k < accepted; ++k)
        {
            f.queue.push_back(f.nextArrival + k);
        }
        m_dropped += static_cast<std::uint64_t>(fresh - accepted);
        f.nextArrival = count;
    }
}

int
DesMedium::PickNext()
{
    const int n = static_cast<int>(m_flows.size());
    for (int k = 0; k < n; ++k)
    {
        const int i = (m_rrNext + k) % n;
        const auto& f = m_flows[static_cast<std::size_t>(i)];
        if (f.serviceTime > 0.0 && !f.queue.empty())
        {
            m_rrNext = (i + 1) % n;
            return i;
        }
    }
    return -1;
}

double
DesMedium::NextServableArrival() const
{
    double next = INFINITY;
    for (const auto& f : m_flows)
    {
        if (f.serviceTime > 0.0)
        {
            next = std::min(next, f.ArrivalTime(f.nextArrival));
        }
    }
    return next;
}

void
DesMedium::Deliver(const InFlight& f)
{
    const double delay = f.completion - f.arrival;
    m_deliveredBits[static_cast<std::size_t>(f.ue)] += m_packetBits;
    m_delaySum += delay;
    ++m_deliveredPackets;
    if (m_recordDelays)
    {
        m_delays.push_back(delay);
    }
    if (m_trace != nullptr)
    {
        m_trace->push_back({f.completion, f.ue, m_packetBits, delay});
    }
}

void
DesMedium::AdvanceTo(double until)
{
    while (true)
    {
        if (m_inFlight)
        {
            if (m_inFlight->completion > until)
            {
                m_now = until;
                return;
            }
            if (m_inFlight->failing)
            {
                ++m_lost;
            }
            else
            {
                Deliver(*m_inFlight);
            }
            m_now = m_inFlight->completion;
            m_inFlight.reset();
        }

        EnqueueArrivals(m_now);
        const int ue = PickNext();
        if (ue < 0)
        {
            const double next = NextServableArrival();
            if (!(next <= until))
            {
                EnqueueArrivals(until);
                m_now = until;
                return;
            }
            m_now = std::max(m_now, next);
            continue;
        }

        auto& f = m_flows[static_cast<std::size_t>(ue)];
        const std::int64_t k = f.queue.front();
        f.queue.pop_front();
        m_inFlight = InFlight{ue, f.ArrivalTime(k), m_now + f.serviceTime, f.failing};
    }
}

DesResult
DesRun(const ScenarioConfig& s, const Position3& uav, double duration, std::uint64_t seed, bool keepDelays)
{
    const auto links = EvaluateLinks(s, uav);
    std::vector<double> rates;
    rates.reserve(links.size());
    for (const auto& link : links)
    {
        rates.push_back(link.phyRate);
    }

    DesMedium medium(s, seed);
    medium.SetRates(rates, FallbackRate(s));
    medium.SetRecordDelays(keepDelays);
    medium.AdvanceTo(duration);

    DesResult result;
    for (double bits : medium.DeliveredBits())
    {
        const double carried = bits / duration / 1e6;
        result.carried.push_back(carried);
        result.aggregate += carried;
    }
    if (medium.DeliveredPackets() > 0)
    {
        result.meanDelay = medium.DelaySum() / static_cast<double>(medium.DeliveredPackets());
    }
    else
    {
        // Censored: no packet made it within the run.
        result.meanDelay = duration;
    }
    if (keepDelays)
    {
        result.delays = medium.Delays();
    }
    return result;
}

} // namespace uavpos
