#ifndef UAVPOS_METRICS_H
#define UAVPOS_METRICS_H

#include <span>
#include <string>
#include <vector>

namespace uavpos
{

enum class MetricKind
{
    ThroughputMbps,
    DelaySeconds,
};

struct MetricSeries
{
    std::string label;
    MetricKind kind{MetricKind::ThroughputMbps};
    std::vector<double> samples;
};

struct DistributionPoint
{
    double value{0.0};
    double fraction{0.0};
};

/// Fraction of samples <= value, one point per unique value (ascending).
std::vector<DistributionPoint> Cdf(std::span<const double> samples);

/// Fraction of samples > value, one point per unique value (ascending).
std::vector<DistributionPoint> Ccdf(std::span<const double> samples);

double Median(std::span<const double> samples);

std::string_view MetricKindName(MetricKind kind);

} // namespace uavpos

#endif
