#include "uavpos/radio.h"

#include "uavpos/errors.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace uavpos
{

namespace
{

void
CheckDistance(double distance)
{
    if (!(distance >= kMinDistance))
    {
        throw DegenerateGeometry("distance " + std::to_string(distance) +
                                 " m is below the 0.1 m model floor");
    }
}

double
OrientationCorrection(double phi)
{
    if (phi < 35.0)
    {
        return -10.0 + 0.354 * phi;
    }
    if (phi < 55.0)
    {
        return 2.5 + 0.075 * (phi - 35.0);
    }
    return 4.0 - 0.114 * (phi - 55.0);
}

// Multi-screen loss when buildings extend past the settled field distance.
double
MultiScreenShort(double d, double dhb, double fMhz, const NlosStreetParams& s)
{
    double lbsh = 0.0;
    double ka = 0.0;
    double kd = 0.0;
    if (dhb > 0.0)
    {
        lbsh = -18.0 * std::log10(1.0 + dhb);
        ka = fMhz > 2000.0 ? 71.4 : 54.0;
        kd = 18.0;
    }
    else
    {
        kd = 18.0 - 15.0 * dhb / s.avgRooftopHeight;
        double base = fMhz > 2000.0 ? 73.0 : 54.0;
        ka = d >= 500.0 ? base - 0.8 * dhb : base - 1.6 * dhb * d / 1000.0;
    }
    double kf = fMhz > 2000.0 ? -8.0 : -4.0 + 0.7 * (fMhz / 925.0 - 1.0);
    return lbsh + ka + kd * std::log10(d / 1000.0) + kf * std::log10(fMhz) -
           9.0 * std::log10(s.buildingSeparation);
}

// Multi-screen loss in the grazing regime. The three Q_M branches are joined
// at their crossover heights, which is what the max/min below selects.
double
MultiScreenLong(double d, double dhb, double lambda, const NlosStreetParams& s)
{
    const double b = s.buildingSeparation;
    double qm = b / d;
    if (dhb > 0.0)
    {
        qm = std::max(2.35 * std::pow(dhb / d * std::sqrt(b / lambda), 0.9), b / d);
    }
    else if (dhb < 0.0)
    {
        const double pi = std::numbers::pi;
        double theta = std::atan(-dhb / b);
        double rho = std::hypot(dhb, b);
        double low = b / (2.0 * pi * d) * std::sqrt(lambda / rho) *
                     (1.0 / theta - 1.0 / (2.0 * pi + theta));
        qm = std::min(low, b / d);
    }
    return -20.0 * std::log10(qm);
}

double
MultiScreen(double d, double dhb, double lambda, double fMhz, const NlosStreetParams& s)
{
    if (dhb == 0.0)
    {
        return MultiScreenLong(d, dhb, lambda, s);
    }
    const double l = s.buildingsExtent;
    const double dbp = std::abs(dhb) * std::sqrt(l / lambda);
    const double upper = MultiScreenShort(dbp, dhb, fMhz, s);
    const double lower = MultiScreenLong(dbp, dhb, lambda, s);
    const double gap = upper - lower;
    const double mid = 0.5 * (upper + lower);
    const double settled = lambda * d * d / (dhb * dhb);
    const double x = std::log10(d) - std::log10(dbp);
    constexpr double chi = 0.1;
    constexpr double upsilon = 0.0417;

    if (gap > 0.0)
    {
        if (l > settled)
        {
            return -std::tanh(x / chi) * (MultiScreenShort(d, dhb, fMhz, s) - mid) + mid;
        }
        return std::tanh(x / chi) * (MultiScreenLong(d, dhb, lambda, s) - mid) + mid;
    }
    if (gap == 0.0)
    {
        return MultiScreenLong(d, dhb, lambda, s);
    }
    const double zeta = gap * upsilon;
    if (l > settled)
    {
        return MultiScreenShort(d, dhb, fMhz, s) - std::tanh(x / zeta) * (upper - mid) - upper + mid;
    }
    return MultiScreenLong(d, dhb, lambda, s) + std::tanh(x / zeta) * (mid - lower) + mid - lower;
}

} // namespace

std::vector<McsEntry>
DefaultMcsTable()
{
    return {
        {0, 58.5, 12.0},
        {1, 117.0, 15.0},
        {2, 175.5, 17.0},
        {3, 234.0, 20.0},
        {4, 351.0, 23.0},
        {5, 468.0, 27.0},
        {6, 526.5, 28.0},
        {7, 585.0, 29.0},
        {8, 702.0, 33.0},
        {9, 780.0, 35.0},
    };
}

double
FriisLoss(double distance, const RadioConfig& cfg)
{
    CheckDistance(distance);
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance * cfg.frequency / kSpeedOfLight);
}

double
ItuR1411Breakpoint(const RadioConfig& cfg, double hUav, double hUe)
{
    return 4.0 * hUav * hUe / cfg.Wavelength();
}

double
ItuR1411LosLoss(double distance, const RadioConfig& cfg, double hUav, double hUe)
{
    CheckDistance(distance);
    if (!(hUav > 0.0 && hUe > 0.0))
    {
        throw DegenerateGeometry("LoS model needs both antennas above ground");
    }
    const double lambda = cfg.Wavelength();
    const double rbp = ItuR1411Breakpoint(cfg, hUav, hUe);
    const double lbp =
        std::abs(20.0 * std::log10(lambda * lambda / (8.0 * std::numbers::pi * hUav * hUe)));
    const double slope = distance <= rbp ? 20.0 : 40.0;
    return lbp + 6.0 + slope * std::log10(distance / rbp);
}

double
ItuR1411NlosRooftopLoss(double distance,
                        const RadioConfig& cfg,
                        double hUav,
                        const NlosStreetParams& street)
{
    const double freeSpace = FriisLoss(distance, cfg);
    const double fMhz = cfg.frequency / 1e6;
    const double lambda = cfg.Wavelength();

    double rooftopToStreet = -8.2 - 10.0 * std::log10(street.streetWidth) +
                             10.0 * std::log10(fMhz) +
                             OrientationCorrection(street.streetOrientation);
    const double dhm = street.avgRooftopHeight - street.ueAntennaHeight;
    if (dhm > 0.0)
    {
        rooftopToStreet += 20.0 * std::log10(dhm);
    }
    const double dhb = hUav - street.avgRooftopHeight;
    const double multiScreen = MultiScreen(distance, dhb, lambda, fMhz, street);
    return freeSpace + std::max(0.0, rooftopToStreet + multiScreen);
}

double
PathLoss(const Position3& uav,
         const Position3& ue,
         bool los,
         bool obstacleScenario,
         const RadioConfig& cfg,
         const NlosStreetParams& street)
{
    // Guard the log singularity; co-located nodes get the 0.1 m loss.
    const double d = std::max(Distance(uav, ue), kMinDistance);
    if (!obstacleScenario)
    {
        return FriisLoss(d, cfg);
    }
    if (los)
    {
        const double hi = std::max({uav.z, ue.z, kMinDistance});
        const double lo = std::max(std::min(uav.z, ue.z), kMinDistance);
        return ItuR1411LosLoss(d, cfg, hi, lo);
    }
    return ItuR1411NlosRooftopLoss(d, cfg, uav.z, street);
}

double
SnrDb(const RadioConfig& cfg, double loss)
{
    return cfg.txPower + cfg.antennaGainTx + cfg.antennaGainRx - loss - cfg.noiseFloor;
}

std::optional<McsEntry>
SelectMcs(double snr, std::span<const McsEntry> table)
{
    std::optional<McsEntry> best;
    for (const auto& entry : table)
    {
        if (entry.minSnr <= snr)
        {
            best = entry;
        }
    }
    return best;
}

} // namespace uavpos
