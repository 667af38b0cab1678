#ifndef UAVPOS_BRIDGE_H
#define UAVPOS_BRIDGE_H

#include "uavpos/env.h"
#include "uavpos/scenario.h"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

namespace uavpos
{

enum class MessageType
{
    Hello,
    Spec,
    Reset,
    Obs,
    Act,
    StepResult,
    Close,
    Error,
};

std::string_view MessageTypeName(MessageType t);
std::optional<MessageType> MessageTypeFromName(std::string_view name);

struct WireMessage
{
    MessageType type{MessageType::Hello};
    std::string session;
    nlohmann::json payload = nlohmann::json::object();

    bool operator==(const WireMessage&) const = default;
};

/// Frames larger than this are rejected as malformed.
inline constexpr std::uint32_t kMaxFrameBytes = 16u << 20;

/// 4-byte big-endian payload length followed by the JSON text.
std::string Encode(const WireMessage& msg);

/// Decode exactly one complete frame.
WireMessage Decode(std::string_view bytes);

/// Pull one complete frame off the front of \p buffer, if present.
std::optional<WireMessage> ExtractFrame(std::string& buffer);

nlohmann::json ObservationToJson(const Observation& obs, bool withThroughput);
Observation ObservationFromJson(const nlohmann::json& doc);
nlohmann::json StepResultToJson(const StepResult& r, bool withThroughput);
StepResult StepResultFromJson(const nlohmann::json& doc);

/// Description sent in reply to hello: actions, observation fields and ranges, episode length.
nlohmann::json SpecPayload(const ScenarioConfig& s);

/**
 * Drives one environment per connection. Each accepted socket gets its own
 * worker thread and Env; sessions share nothing but the scenario.
 */
class BridgeServer
{
  public:
    BridgeServer(ScenarioConfig scenario, std::uint64_t seed);
    ~BridgeServer();

    BridgeServer(const BridgeServer&) = delete;
    BridgeServer& operator=(const BridgeServer&) = delete;

    /// Bind and listen; port 0 picks a free port.
    void Listen(const std::string& host, std::uint16_t port);

    std::uint16_t Port() const
    {
        return m_port;
    }

    /// Accept connections until Stop() is called.
    void Serve();

    void Stop();

  private:
    void HandleSession(int fd, std::string session);

    ScenarioConfig m_scenario;
    std::uint64_t m_seed;
    int m_listenFd{-1};
    std::uint16_t m_port{0};
    std::atomic<bool> m_stop{false};
    std::atomic<std::uint64_t> m_sessions{0};
    std::mutex m_workersMutex;
    std::vector<std::jthread> m_workers;
};

/// Blocking client for the bridge protocol.
class BridgeClient
{
  public:
    BridgeClient() = default;
    ~BridgeClient();

    BridgeClient(const BridgeClient&) = delete;
    BridgeClient& operator=(const BridgeClient&) = delete;

    void Connect(const std::string& host, std::uint16_t port);

    /// hello -> spec; returns the spec payload.
    nlohmann::json Hello();

    Observation Reset(std::optional<std::uint64_t> seed = std::nullopt);
    StepResult Step(int action);
    void Close();

    void Send(const WireMessage& msg);
    WireMessage Receive();

  private:
    WireMessage Expect(MessageType type);

    int m_fd{-1};
    std::string m_session;
    std::string m_buffer;
};

/// Split "host:port".
std::pair<std::string, std::uint16_t> ParseEndpoint(const std::string& text);

} // namespace uavpos

#endif
