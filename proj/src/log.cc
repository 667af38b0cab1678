#include "uavpos/log.h"

#include <atomic>
#include <cctype>
#include <iostream>
#include <mutex>

namespace uavpos
{

namespace
{
std::atomic<int> g_level{static_cast<int>(LogLevel::Warning)};
std::mutex g_sinkMutex;
} // namespace

void
SetLogLevel(LogLevel level)
{
    g_level.store(static_cast<int>(level));
}

LogLevel
GetLogLevel()
{
    return static_cast<LogLevel>(g_level.load());
}

bool
LogEnabled(LogLevel level)
{
    return static_cast<int>(level) <= g_level.load(std::memory_order_relaxed);
}

void
LogWrite(LogLevel level, const std::string& message)
{
    std::lock_guard lock(g_sinkMutex);
    std::clog << "[" << LogLevelName(level) << "] " << message << '\n';
}

std::string_view
LogLevelName(LogLevel level)
{
    switch (level)
    {
    case LogLevel::Error:
        return "Error";
    case LogLevel::Warning:
        return "Warning";
    case LogLevel::Info:
        return "Info";
    case LogLevel::Debug:
        return "Debug";
    }
    return "?";
}

std::optional<LogLevel>
ParseLogLevel(std::string_view name)
{
    std::string lower;
    for (char c : name)
    {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (lower == "error")
    {
        return LogLevel::Error;
    }
    if (lower == "warning" || lower == "warn")
    {
        return LogLevel::Warning;
    }
    if (lower == "info")
    {
        return LogLevel::Info;
    }
    if (lower == "debug")
    {
        return LogLevel::Debug;
    }
    return std::nullopt;
}

} // namespace uavpos
