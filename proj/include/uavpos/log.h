#ifndef UAVPOS_LOG_H
#define UAVPOS_LOG_H

#include "uavpos/scenario.h"

#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace uavpos
{

void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();
bool LogEnabled(LogLevel level);
void LogWrite(LogLevel level, const std::string& message);

std::string_view LogLevelName(LogLevel level);
std::optional<LogLevel> ParseLogLevel(std::string_view name);

} // namespace uavpos

// Stream-style logging filtered by the single global level.
#define UAVPOS_LOG(level, expr)                                                                    \
    do                                                                                             \
    {                                                                                              \
        if (::uavpos::LogEnabled(::uavpos::LogLevel::level))                                       \
        {                                                                                          \
            std::ostringstream uavposLogStream_;                                                   \
            uavposLogStream_ << expr;                                                              \
            ::uavpos::LogWrite(::uavpos::LogLevel::level, uavposLogStream_.str());                 \
        }                                                                                          \
    } while (false)

#endif
