#ifndef UAVPOS_LINKMAC_H
#define UAVPOS_LINKMAC_H

#include "uavpos/scenario.h"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace uavpos
{

struct UeLink
{
    bool los{false};
    double loss{0.0};      ///< dB
    double snr{0.0};       ///< dB
    std::optional<int> mcs;
    double phyRate{0.0};   ///< Mbit/s, 0 when no MCS is viable
    double airRate{0.0};   ///< Mbit/s the station transmits at; frames fail when no MCS is viable
    double offered{0.0};   ///< Mbit/s
    double carried{0.0};   ///< Mbit/s
};

struct LinkReport
{
    std::vector<UeLink> ues;
    double aggregateThroughput{0.0}; ///< Mbit/s
    double meanDelay{0.0};           ///< s
    double utilization{0.0};         ///< total airtime demand, failing links included
    bool feasible{false};
    int nLos{0};
};

/// Smallest MCS index whose PHY rate covers \p demand (Mbit/s).
int RequiredMcs(double demand, std::span<const McsEntry> table);

/// Per-UE LoS, loss, SNR and selected MCS for a UAV position. Load fields are zero.
/// A UE with no viable MCS keeps transmitting at the lowest table rate and every frame is lost.
std::vector<UeLink> EvaluateLinks(const ScenarioConfig& s, const Position3& uav);

/// Rate a UE without a viable MCS still transmits at (lowest table entry).
double FallbackRate(const ScenarioConfig& s);

/// Time to send one packet at \p phyRate (Mbit/s), including MAC efficiency and overhead.
double FrameServiceTime(const MacParams& mac, double phyRate);

/// Airtime share needed to carry \p demand at \p phyRate.
double AirtimeFraction(const MacParams& mac, double demand, double phyRate);

bool DemandFeasible(const ScenarioConfig& s, const Position3& uav);

LinkReport AnalyticEvaluate(const ScenarioConfig& s, const Position3& uav);

struct Delivery
{
    double time{0.0};  ///< completion, s
    int ue{0};
    double bits{0.0};
    double delay{0.0}; ///< completion minus arrival, s
};

/// Mbit/s delivered in (now - window, now].
double WindowThroughput(std::span<const Delivery> deliveries, double now, double window);

/**
 * Shared-medium packet simulator. Each UE emits constant-bitrate packets
 * with a seed-derived phase into a drop-tail queue; a single server visits
 * backlogged queues round-robin. PHY rates may change between AdvanceTo()
 * calls; a frame already on the air finishes at its original rate.
 */
class DesMedium
{
  public:
    DesMedium(const ScenarioConfig& s, std::uint64_t seed);

    /// Rates in Mbit/s per UE. A UE with rate 0 sends its frames at
    /// \p fallbackRate and they are all lost; with fallbackRate 0 it stays silent.
    void SetRates(std::span<const double> phyRates, double fallbackRate = 0.0);

    /// Run the medium up to absolute time \p until.
    void AdvanceTo(double until);

    /// Per-packet records are appended here when set.
    void SetTrace(std::vector<Delivery>* trace)
    {
        m_trace = trace;
    }

    void SetRecordDelays(bool on)
    {
        m_recordDelays = on;
    }

    double Now() const
    {
        return m_now;
    }

    const std::vector<double>& DeliveredBits() const
    {
        return m_deliveredBits;
    }

    const std::vector<double>& Delays() const
    {
        return m_delays;
    }

    double DelaySum() const
    {
        return m_delaySum;
    }

    std::uint64_t DeliveredPackets() const
    {
        return m_deliveredPackets;
    }

    std::uint64_t DroppedPackets() const
    {
        return m_dropped;
    }

    std::uint64_t LostFrames() const
    {
        return m_lost;
    }

  private:
    struct Flow
    {
        double interval{0.0};
        double phase{0.0};
        double serviceTime{0.0}; ///< 0 when not transmittable
        bool failing{false};     ///< frames occupy the medium but never arrive
        std::int64_t nextArrival{0};
        std::deque<std::int64_t> queue;

        double ArrivalTime(std::int64_t k) const
        {
            return phase + static_cast<double>(k) * interval;
        }
    };

    struct InFlight
    {
        int ue{0};
        double arrival{0.0};
        double completion{0.0};
        bool failing{false};
    };

    void EnqueueArrivals(double t);
    int PickNext();
    double NextServableArrival() const;
    void Deliver(const InFlight& f);

    std::vector<Flow> m_flows;
    double m_packetBits;
    int m_queueLimit;
    MacParams m_mac;
    double m_now{0.0};
    std::optional<InFlight> m_inFlight;
    int m_rrNext{0};

    std::vector<double> m_deliveredBits;
    std::vector<double> m_delays;
    double m_delaySum{0.0};
    std::uint64_t m_deliveredPackets{0};
    std::uint64_t m_dropped{0};
    std::uint64_t m_lost{0};
    bool m_recordDelays{false};
    std::vector<Delivery>* m_trace{nullptr};
};

struct DesResult
{
    std::vector<double> carried; ///< Mbit/s per UE
    double aggregate{0.0};       ///< Mbit/s
    std::vector<double> delays;  ///< s, one per delivered packet
    double meanDelay{0.0};       ///< s; the run duration when nothing was delivered
};

DesResult DesRun(const ScenarioConfig& s,
                 const Position3& uav,
                 double duration,
                 std::uint64_t seed,
                 bool keepDelays = true);

} // namespace uavpos

#endif
