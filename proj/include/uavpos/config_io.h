#ifndef UAVPOS_CONFIG_IO_H
#define UAVPOS_CONFIG_IO_H

#include "uavpos/agent.h"
#include "uavpos/metrics.h"
#include "uavpos/scenario.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace uavpos
{

inline constexpr const char* kVersion = "1.0.0";

/// Read, default and validate a scenario file. Failures raise ConfigError with the field path.
ScenarioConfig LoadScenario(const std::filesystem::path& path);

ScenarioConfig ParseScenario(const nlohmann::json& doc);

/// Full, explicit form of a scenario (every default written out).
nlohmann::json ScenarioToJson(const ScenarioConfig& s);

/// Invariant checks shared by the loader and programmatic construction.
void ValidateScenario(const ScenarioConfig& s);

/// Parse "x,y,z".
Position3 ParsePosition(const std::string& text);

/// Parse "a..b" or "a,b,c" (mixed forms allowed: "1..5,9").
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

struct ExportManifest
{
    std::string scenarioPath;
    std::string command;
    std::vector<std::uint64_t> seeds;
    std::vector<Position3> positions;
    double duration{0.0};
};

/// One CSV per series (header value,cdf,ccdf) plus manifest.json. Returns the files written.
std::vector<std::filesystem::path> ExportMetrics(const std::vector<MetricSeries>& series,
                                                 const ExportManifest& manifest,
                                                 const std::filesystem::path& outDir);

nlohmann::json NetworkToJson(const QNetwork& net);
QNetwork NetworkFromJson(const nlohmann::json& doc);

/// Deterministic text form used for files; fixed key order and number formatting.
std::string DumpJson(const nlohmann::json& doc);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);

} // namespace uavpos

#endif
