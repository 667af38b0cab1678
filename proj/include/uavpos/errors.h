#ifndef UAVPOS_ERRORS_H
#define UAVPOS_ERRORS_H

#include <stdexcept>
#include <string>

namespace uavpos
{

// Every error raised by the library derives from Error so callers can catch
// the whole family at a tool boundary.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometry : public Error
{
  public:
    using Error::Error;
};

class DemandUnserviceable : public Error
{
  public:
    using Error::Error;
};

class InvalidScenario : public Error
{
  public:
    using Error::Error;
};

class EpisodeFinished : public Error
{
  public:
    using Error::Error;
};

class EmptySeries : public Error
{
  public:
    using Error::Error;
};

/// Scenario/config problem. field() holds the offending path, e.g. "ues[2].position".
class ConfigError : public Error
{
  public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what),
          m_field(std::move(field))
    {
    }

    const std::string& field() const
    {
        return m_field;
    }

  private:
    std::string m_field;
};

class FrameError : public Error
{
  public:
    using Error::Error;
};

class ProtocolError : public Error
{
  public:
    using Error::Error;
};

} // namespace uavpos

#endif
