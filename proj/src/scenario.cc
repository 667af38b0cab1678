#include "uavpos/scenario.h"

#include <cmath>

namespace uavpos
{

int
EnvConfig::StepsPerEpisode() const
{
    return static_cast<int>(std::llround(episodeDuration / decisionInterval));
}

double
ScenarioConfig::TotalDemand() const
{
    double total = 0.0;
    for (const auto& ue : ues)
    {
        total += ue.demand;
    }
    return total;
}

std::vector<Position3>
ScenarioConfig::UePositions() const
{
    std::vector<Position3> out;
    out.reserve(ues.size());
    for (const auto& ue : ues)
    {
        out.push_back(ue.position);
    }
    return out;
}

const Building*
CentralBuilding(const ScenarioConfig& s)
{
    const double cx = s.venue.width / 2.0;
    const double cy = s.venue.depth / 2.0;
    const Building* tallest = nullptr;
    for (const auto& b : s.buildings)
    {
        if (cx >= b.xMin && cx <= b.xMax && cy >= b.yMin && cy <= b.yMax)
        {
            return &b;
        }
        if (tallest == nullptr || b.height > tallest->height)
        {
            tallest = &b;
        }
    }
    return tallest;
}

Position3
ScenarioConfig::InitialPosition() const
{
    switch (initialRule)
    {
    case InitialRule::VenueCenterZ10:
        return {venue.width / 2.0, venue.depth / 2.0, 10.0};
    case InitialRule::AboveCentralBuilding5m:
        if (const Building* b = CentralBuilding(*this))
        {
            return {(b->xMin + b->xMax) / 2.0, (b->yMin + b->yMax) / 2.0, b->height + 5.0};
        }
        return {venue.width / 2.0, venue.depth / 2.0, 5.0};
    case InitialRule::Explicit:
        return explicitInitial;
    }
    return explicitInitial;
}

} // namespace uavpos
