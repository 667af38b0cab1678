#ifndef UAVPOS_RADIO_H
#define UAVPOS_RADIO_H

#include "uavpos/geometry.h"

#include <optional>
#include <span>
#include <vector>

namespace uavpos
{

inline constexpr double kSpeedOfLight = 2.99792458e8;
/// Smallest distance the loss models accept, meters.
inline constexpr double kMinDistance = 0.1;

/// 802.11ac link budget. Defaults: channel 50 (5250 MHz), 160 MHz, GI 800 ns, 1 SS.
struct RadioConfig
{
    double frequency{5.25e9};
    double txPower{20.0};
    double antennaGainTx{0.0};
    double antennaGainRx{0.0};
    double noiseFloor{-85.0};
    int channelWidth{160};
    int guardInterval{800};
    int spatialStreams{1};

    double Wavelength() const
    {
        return kSpeedOfLight / frequency;
    }
};

struct McsEntry
{
    int index{0};
    double phyRate{0.0}; ///< Mbit/s
    double minSnr{0.0};  ///< dB

    friend bool operator==(const McsEntry&, const McsEntry&) = default;
};

/// VHT, 160 MHz, 1 SS, 800 ns GI. Thresholds are sensitivity minus noise floor.
std::vector<McsEntry> DefaultMcsTable();

/// Street-level parameters of the over-rooftop NLoS model.
struct NlosStreetParams
{
    double avgRooftopHeight{15.0};
    double streetWidth{20.0};
    double buildingSeparation{40.0};
    double streetOrientation{45.0}; ///< degrees, [0, 90]
    double ueAntennaHeight{1.5};
    double buildingsExtent{80.0}; ///< length of the path covered by buildings
};

double FriisLoss(double distance, const RadioConfig& cfg);

/// Median LoS street-canyon loss with a two-slope breakpoint model.
double ItuR1411LosLoss(double distance, const RadioConfig& cfg, double hUav, double hUe);

/// Breakpoint distance 4 h1 h2 / lambda of the LoS model.
double ItuR1411Breakpoint(const RadioConfig& cfg, double hUav, double hUe);

/**
 * Over-rooftop NLoS loss: free space plus rooftop-to-street diffraction plus
 * multi-screen diffraction. The multi-screen term blends its short and long
 * range forms around the breakpoint |dhb| sqrt(l / lambda) so the curve has
 * no jump. Negative diffraction totals are clamped to zero, so the result
 * is never below FriisLoss.
 */
double ItuR1411NlosRooftopLoss(double distance,
                               const RadioConfig& cfg,
                               double hUav,
                               const NlosStreetParams& street);

/// Model dispatch: Friis when the scenario has no obstacles, otherwise the
/// LoS or NLoS ITU model depending on \p los. Distance is 3D.
double PathLoss(const Position3& uav,
                const Position3& ue,
                bool los,
                bool obstacleScenario,
                const RadioConfig& cfg,
                const NlosStreetParams& street);

double SnrDb(const RadioConfig& cfg, double loss);

/// Highest-index entry whose threshold is met (the ideal rate manager rule).
std::optional<McsEntry> SelectMcs(double snr, std::span<const McsEntry> table);

} // namespace uavpos

#endif
