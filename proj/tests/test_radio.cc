#include "support.h"

#include "uavpos/errors.h"
#include "uavpos/radio.h"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace uavpos;
using namespace uavpos::testing;

TEST_CASE("friis anchors")
{
    const RadioConfig cfg;
    CHECK(std::abs(FriisLoss(100.0, cfg) - 86.85) <= 0.01);
    CHECK(std::abs(FriisLoss(100.0, cfg) - ReferenceFriis(100.0, 5.25e9)) < 1e-9);
    CHECK_THROWS_AS(FriisLoss(0.05, cfg), DegenerateGeometry);
    CHECK_NOTHROW(FriisLoss(kMinDistance, cfg));
}

TEST_CASE("friis scales with 20 log10 k")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.5, 5000.0);
    std::uniform_real_distribution<double> freq(1e9, 6e9);
    std::uniform_real_distribution<double> factor(0.2, 20.0);
    for (int i = 0; i < 1000; ++i)
    {
        RadioConfig cfg;
        cfg.frequency = freq(rng);
        const double d = dist(rng);
        const double k = factor(rng);
        REQUIRE(std::abs(FriisLoss(d, cfg) + 20.0 * std::log10(k) - FriisLoss(k * d, cfg)) < 1e-9);
        REQUIRE(std::abs(FriisLoss(2.0 * d, cfg) - FriisLoss(d, cfg) - 6.0206) < 1e-4);
    }
}

TEST_CASE("ITU LoS model")
{
    const RadioConfig cfg;
    const double rbp = ItuR1411Breakpoint(cfg, 20.0, 1.5);
    CHECK(rbp == doctest::Approx(2101.6).epsilon(1e-3));
    CHECK(std::abs(ItuR1411LosLoss(100.0, cfg, 20.0, 1.5) - 86.8) <= 0.1);

    SUBCASE("continuous at the breakpoint")
    {
        const double left = ItuR1411LosLoss(std::nextafter(rbp, 0.0), cfg, 20.0, 1.5);
        const double at = ItuR1411LosLoss(rbp, cfg, 20.0, 1.5);
        const double right = ItuR1411LosLoss(std::nextafter(rbp, 1e9), cfg, 20.0, 1.5);
        CHECK(std::abs(left - at) < 1e-9);
        CHECK(std::abs(right - at) < 1e-9);
    }
    SUBCASE("40 dB per decade beyond the breakpoint")
    {
        const double delta = ItuR1411LosLoss(2.0 * rbp, cfg, 20.0, 1.5) - ItuR1411LosLoss(rbp, cfg, 20.0, 1.5);
        CHECK(delta == doctest::Approx(12.0412).epsilon(1e-5));
    }
    CHECK_THROWS_AS(ItuR1411LosLoss(0.01, cfg, 20.0, 1.5), DegenerateGeometry);
}

TEST_CASE("ITU NLoS over-rooftop model")
{
    const RadioConfig cfg;
    const NlosStreetParams street;
    double previous = 0.0;
    for (double d = 10.0; d <= 1000.0; d += 0.5)
    {
        const double nlos = ItuR1411NlosRooftopLoss(d, cfg, 20.0, street);
        REQUIRE(nlos >= ItuR1411LosLoss(d, cfg, 20.0, 1.5));
        REQUIRE(nlos >= FriisLoss(d, cfg) - 1e-12);
        // The blended multi-screen term leaves sub-millidecibel ripple near its breakpoint.
        if (d > 10.0)
        {
            REQUIRE(nlos >= previous - 0.01);
        }
        previous = nlos;
    }
    CHECK_THROWS_AS(ItuR1411NlosRooftopLoss(0.05, cfg, 20.0, street), DegenerateGeometry);
}

TEST_CASE("NLoS model is never below free space for any street")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const RadioConfig cfg;
    for (int i = 0; i < 2000; ++i)
    {
        NlosStreetParams street;
        street.avgRooftopHeight = 3.0 + 30.0 * u(rng);
        street.streetWidth = 5.0 + 40.0 * u(rng);
        street.buildingSeparation = 10.0 + 60.0 * u(rng);
        street.streetOrientation = 90.0 * u(rng);
        const double d = 1.0 + 999.0 * u(rng);
        const double h = 1.0 + 59.0 * u(rng);
        const double loss = ItuR1411NlosRooftopLoss(d, cfg, h, street);
        REQUIRE(std::isfinite(loss));
        REQUIRE(loss >= FriisLoss(d, cfg) - 1e-12);
    }
}

TEST_CASE("path loss dispatch")
{
    const RadioConfig cfg;
    const NlosStreetParams street;
    const Position3 uav{0, 0, 20};
    const Position3 ue{60, 80, 1.5};
    const double d = Distance(uav, ue);
    CHECK(PathLoss(uav, ue, true, false, cfg, street) == FriisLoss(d, cfg));
    CHECK(PathLoss(uav, ue, false, false, cfg, street) == FriisLoss(d, cfg));
    CHECK(PathLoss(uav, ue, true, true, cfg, street) == ItuR1411LosLoss(d, cfg, 20, 1.5));
    CHECK(PathLoss(uav, ue, false, true, cfg, street) == ItuR1411NlosRooftopLoss(d, cfg, 20, street));
}

TEST_CASE("snr")
{
    RadioConfig cfg;
    CHECK(SnrDb(cfg, 86.85) == doctest::Approx(18.15));
    CHECK(SnrDb(cfg, 105.0) == doctest::Approx(0.0));
    const double base = SnrDb(cfg, 90.0);
    cfg.antennaGainTx = 3.0;
    cfg.antennaGainRx = 3.0;
    CHECK(SnrDb(cfg, 90.0) - base == doctest::Approx(6.0));
}

TEST_CASE("MCS table")
{
    const auto table = DefaultMcsTable();
    REQUIRE(table.size() == 10);
    // The four anchor rates are exact.
    CHECK(table[0].phyRate == 58.5);
    CHECK(table[1].phyRate == 117.0);
    CHECK(table[2].phyRate == 175.5);
    CHECK(table[3].phyRate == 234.0);
    CHECK(table[9].phyRate == 780.0);
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        CHECK(table[i].index == static_cast<int>(i));
        if (i > 0)
        {
            CHECK(table[i].phyRate > table[i - 1].phyRate);
            CHECK(table[i].minSnr > table[i - 1].minSnr);
        }
    }
}

TEST_CASE("MCS selection")
{
    const auto table = DefaultMcsTable();
    CHECK(SelectMcs(21.0, table)->index == 3);
    CHECK(SelectMcs(21.0, table)->phyRate == 234.0);
    CHECK(SelectMcs(40.0, table)->index == 9);
    CHECK_FALSE(SelectMcs(5.0, table).has_value());
    CHECK(SelectMcs(12.0, table)->index == 0);
    CHECK_FALSE(SelectMcs(std::nextafter(12.0, 0.0), table).has_value());

    int previous = -1;
    for (double snr = 0.0; snr <= 45.0; snr += 0.01)
    {
        const auto m = SelectMcs(snr, table);
        const int idx = m ? m->index : -1;
        REQUIRE(idx >= previous);
        previous = idx;
    }
}
