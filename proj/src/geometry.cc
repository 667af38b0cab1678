#include "uavpos/geometry.h"

#include <algorithm>
#include <cmath>

namespace uavpos
{

double
Distance(const Position3& a, const Position3& b)
{
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

bool
IsFinite(const Position3& p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

bool
SegmentIntersectsBox(const Position3& p0, const Position3& p1, const Building& b)
{
    // Shrink by the tolerance, then ask whether the segment meets the open box.
    const double lo[3] = {b.xMin + kGrazeTolerance, b.yMin + kGrazeTolerance, kGrazeTolerance};
    const double hi[3] = {b.xMax - kGrazeTolerance, b.yMax - kGrazeTolerance, b.height - kGrazeTolerance};
    const double origin[3] = {p0.x, p0.y, p0.z};
    const double dir[3] = {p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};

    double tEnter = 0.0;
    double tExit = 1.0;
    for (int axis = 0; axis < 3; ++axis)
    {
        if (dir[axis] == 0.0)
        {
            if (!(origin[axis] > lo[axis] && origin[axis] < hi[axis]))
            {
                return false;
            }
            continue;
        }
        double t1 = (lo[axis] - origin[axis]) / dir[axis];
        double t2 = (hi[axis] - origin[axis]) / dir[axis];
        if (t1 > t2)
        {
            std::swap(t1, t2);
        }
        tEnter = std::max(tEnter, t1);
        tExit = std::min(tExit, t2);
        if (tEnter >= tExit)
        {
            return false;
        }
    }
    return tEnter < tExit;
}

bool
InsideBuilding(const Position3& p, const Building& b)
{
    return p.x > b.xMin + kGrazeTolerance && p.x < b.xMax - kGrazeTolerance &&
           p.y > b.yMin + kGrazeTolerance && p.y < b.yMax - kGrazeTolerance &&
           p.z > kGrazeTolerance && p.z < b.height - kGrazeTolerance;
}

bool
InsideAnyBuilding(const Position3& p, std::span<const Building> buildings)
{
    return std::any_of(buildings.begin(), buildings.end(), [&](const Building& b) {
        return InsideBuilding(p, b);
    });
}

bool
HasLos(const Position3& uav, const Position3& ue, std::span<const Building> buildings)
{
    return std::none_of(buildings.begin(), buildings.end(), [&](const Building& b) {
        return SegmentIntersectsBox(uav, ue, b);
    });
}

int
CountLos(const Position3& uav, std::span<const Position3> ues, std::span<const Building> buildings)
{
    int n = 0;
    for (const auto& ue : ues)
    {
        n += HasLos(uav, ue, buildings) ? 1 : 0;
    }
    return n;
}

Position3
ClampToZone(const Position3& proposed,
            const Position3& previous,
            const ActionZone& zone,
            std::span<const Building> buildings)
{
    Position3 p{std::clamp(proposed.x, zone.x.min, zone.x.max),
                std::clamp(proposed.y, zone.y.min, zone.y.max),
                std::clamp(proposed.z, zone.z.min, zone.z.max)};
    if (InsideAnyBuilding(p, buildings))
    {
        return previous;
    }
    return p;
}

Position3
ClampToZone(const Position3& p, const ActionZone& zone, std::span<const Building> buildings)
{
    return ClampToZone(p, p, zone, buildings);
}

} // namespace uavpos
