#include "uavpos/metrics.h"

#include "uavpos/errors.h"

#include <algorithm>

namespace uavpos
{

namespace
{

// (value, count <= value) for each unique value.
std::vector<std::pair<double, std::size_t>>
CumulativeCounts(std::span<const double> samples)
{
    if (samples.empty())
    {
        throw EmptySeries("distribution of an empty sample set");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, std::size_t>> out;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        if (i + 1 == sorted.size() || sorted[i + 1] != sorted[i])
        {
            out.emplace_back(sorted[i], i + 1);
        }
    }
    return out;
}

} // namespace

std::vector<DistributionPoint>
Cdf(std::span<const double> samples)
{
    const auto counts = CumulativeCounts(samples);
    const double n = static_cast<double>(samples.size());
    std::vector<DistributionPoint> out;
    out.reserve(counts.size());
    for (const auto& [value, count] : counts)
    {
        out.push_back({value, static_cast<double>(count) / n});
    }
    return out;
}

std::vector<DistributionPoint>
Ccdf(std::span<const double> samples)
{
    const auto counts = CumulativeCounts(samples);
    const double n = static_cast<double>(samples.size());
    std::vector<DistributionPoint> out;
    out.reserve(counts.size());
    for (const auto& [value, count] : counts)
    {
        // Computed from the complement count so CDF + CCDF is exactly 1.
        out.push_back({value, static_cast<double>(samples.size() - count) / n});
    }
    return out;
}

double
Median(std::span<const double> samples)
{
    if (samples.empty())
    {
        throw EmptySeries("median of an empty sample set");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::string_view
MetricKindName(MetricKind kind)
{
    return kind == MetricKind::ThroughputMbps ? "throughput_Mbps" : "delay_s";
}

} // namespace uavpos
