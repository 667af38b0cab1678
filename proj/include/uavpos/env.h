#ifndef UAVPOS_ENV_H
#define UAVPOS_ENV_H

#include "uavpos/linkmac.h"
#include "uavpos/scenario.h"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace uavpos
{

enum class Action : int
{
    Up = 0,
    Down = 1,
    Forward = 2,
    Backward = 3,
    Left = 4,
    Right = 5,
    Stay = 6,
};

inline constexpr int kActionCount = 7;

std::string_view ActionName(Action a);
std::optional<Action> ActionFromCode(int code);

struct Observation
{
    Position3 position;
    std::array<double, 3> normalized{}; ///< position scaled to [0,1] by the zone
    int nLos{0};
    int ueCount{0};
    double throughputNorm{0.0}; ///< only part of Features() when enabled

    /// Learner input: normalized position, nLoS / N, and optionally throughput.
    std::vector<double> Features(bool withThroughput = false) const;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct StepInfo
{
    double aggregateThroughput{0.0}; ///< Mbit/s
    double meanDelay{0.0};           ///< s
    bool feasible{false};
    int nLos{0};

    friend bool operator==(const StepInfo&, const StepInfo&) = default;
};

struct StepResult
{
    Observation observation;
    double reward{0.0};
    bool done{false};
    StepInfo info;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

/// Weighted LoS share plus weighted (capped) throughput share.
double ComputeReward(int nLos, int ueCount, double throughput, double totalDemand, double w1, double w2);

LinkReport Snapshot(const ScenarioConfig& s, const Position3& position);

/// Reward the environment would give at a fixed position, analytic evaluator.
double SnapshotReward(const ScenarioConfig& s, const Position3& position);

/// Position after applying \p a from \p from (clamped, building moves rejected).
Position3 ApplyAction(const ScenarioConfig& s, const Position3& from, Action a);

/**
 * Episodic UAV positioning environment. One instance is single-threaded;
 * run several instances for parallel rollouts.
 */
class Env
{
  public:
    Env(ScenarioConfig scenario, std::uint64_t seed);

    Observation Reset();
    Observation Reset(std::uint64_t seed);

    StepResult Step(Action action);

    const ScenarioConfig& Scenario() const
    {
        return m_scenario;
    }

    const Position3& Position() const
    {
        return m_position;
    }

    int StepCount() const
    {
        return m_steps;
    }

    bool Done() const
    {
        return m_done;
    }

    int ObservationSize() const;

  private:
    Observation Observe(int nLos, double throughputNorm) const;

    ScenarioConfig m_scenario;
    std::uint64_t m_seed;
    Position3 m_position;
    int m_steps{0};
    bool m_done{false};
    bool m_started{false};
    std::unique_ptr<DesMedium> m_medium;
    std::vector<Delivery> m_trace;
};

} // namespace uavpos

#endif
