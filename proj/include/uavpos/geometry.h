#ifndef UAVPOS_GEOMETRY_H
#define UAVPOS_GEOMETRY_H

#include <span>

namespace uavpos
{

/// Point in the venue frame, meters. z is altitude above ground.
struct Position3
{
    double x{0.0};
    double y{0.0};
    double z{0.0};

    friend bool operator==(const Position3&, const Position3&) = default;
};

double Distance(const Position3& a, const Position3& b);
bool IsFinite(const Position3& p);

/// Axis-aligned box from the ground up to height. Floors and rooms are
/// carried for the scenario file only; the radio treats a building as opaque.
struct Building
{
    double xMin{0.0};
    double xMax{0.0};
    double yMin{0.0};
    double yMax{0.0};
    double height{0.0};
    int floors{1};
    int roomsX{1};
    int roomsY{1};
};

struct VenueSpec
{
    double width{100.0};
    double depth{100.0};
};

struct Interval
{
    double min{0.0};
    double max{0.0};

    bool Contains(double v) const
    {
        return v >= min && v <= max;
    }
};

struct ActionZone
{
    Interval x;
    Interval y;
    Interval z;

    bool Contains(const Position3& p) const
    {
        return x.Contains(p.x) && y.Contains(p.y) && z.Contains(p.z);
    }
};

/// Grazing tolerance: a segment must penetrate a box by more than this to count.
inline constexpr double kGrazeTolerance = 1e-9;

/// Slab test against the open interior of the box. Touching a face or an
/// edge (within kGrazeTolerance) is not an intersection.
bool SegmentIntersectsBox(const Position3& p0, const Position3& p1, const Building& b);

bool InsideBuilding(const Position3& p, const Building& b);
bool InsideAnyBuilding(const Position3& p, std::span<const Building> buildings);

bool HasLos(const Position3& uav, const Position3& ue, std::span<const Building> buildings);

int CountLos(const Position3& uav,
             std::span<const Position3> ues,
             std::span<const Building> buildings);

/**
 * Clamp a proposed position into the zone. If the clamped point falls inside
 * a building the move is rejected and \p previous is returned unchanged.
 */
Position3 ClampToZone(const Position3& proposed,
                      const Position3& previous,
                      const ActionZone& zone,
                      std::span<const Building> buildings);

/// Convenience overload: the proposal itself is the fallback.
Position3 ClampToZone(const Position3& p, const ActionZone& zone, std::span<const Building> buildings);

} // namespace uavpos

#endif
