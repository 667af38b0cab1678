#ifndef UAVPOS_SCENARIO_H
#define UAVPOS_SCENARIO_H

#include "uavpos/geometry.h"
#include "uavpos/radio.h"

#include <cstdint>
#include <string>
#include <vector>

namespace uavpos
{

struct UeSpec
{
    int id{0};
    Position3 position;
    double demand{0.0}; ///< offered load, Mbit/s
    int requiredMcs{0}; ///< smallest MCS whose rate covers the demand
};

struct MacParams
{
    double efficiency{0.7};     ///< share of airtime carrying payload
    double frameOverhead{0.0};  ///< fixed time per frame, s
    int packetSize{1400};       ///< bytes
    int queueLimit{500};        ///< per-UE drop-tail limit, packets
};

enum class EvaluatorMode
{
    Analytic,
    Des,
};

struct EnvConfig
{
    double decisionInterval{0.1}; ///< s
    double episodeDuration{100.0}; ///< s
    double stepSize{1.0};         ///< m per move
    double w1{0.8};
    double w2{0.2};
    EvaluatorMode mode{EvaluatorMode::Analytic};
    bool throughputInObservation{false};

    int StepsPerEpisode() const;
};

struct TrainConfig
{
    int episodes{10};
    int evalEpisodes{1};
    int batchSize{64};
    double learningRate{1e-2};
    std::size_t bufferCapacity{1000000};
    double epsilonStart{1.0};
    double epsilonEnd{0.05};
    double epsilonDecayFraction{0.6};
    double gamma{0.95};
    int targetSyncSteps{200};
    int warmupTransitions{500};
    int hiddenUnits{32};
};

enum class InitialRule
{
    VenueCenterZ10,
    AboveCentralBuilding5m,
    Explicit,
};

enum class LogLevel
{
    Error,
    Warning,
    Info,
    Debug,
};

struct ScenarioConfig
{
    std::string name;
    VenueSpec venue;
    std::vector<Building> buildings;
    std::vector<UeSpec> ues;
    RadioConfig radio;
    std::vector<McsEntry> mcsTable{DefaultMcsTable()};
    NlosStreetParams street;
    MacParams mac;
    ActionZone zone;
    EnvConfig env;
    TrainConfig train;
    InitialRule initialRule{InitialRule::VenueCenterZ10};
    Position3 explicitInitial;
    std::vector<Position3> candidatePositions;
    LogLevel logLevel{LogLevel::Info};

    bool HasObstacles() const
    {
        return !buildings.empty();
    }

    double TotalDemand() const;
    std::vector<Position3> UePositions() const;

    /// Resolve the initial-position rule against the geometry.
    Position3 InitialPosition() const;
};

/// Building whose footprint contains the venue center, else the tallest one.
const Building* CentralBuilding(const ScenarioConfig& s);

} // namespace uavpos

#endif
