#include "uavpos/bridge.h"

#include "uavpos/errors.h"
#include "uavpos/log.h"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace uavpos
{

using nlohmann::json;

namespace
{

constexpr std::pair<MessageType, std::string_view> kTypeNames[] = {
    {MessageType::Hello, "hello"},
    {MessageType::Spec, "spec"},
    {MessageType::Reset, "reset"},
    {MessageType::Obs, "obs"},
    {MessageType::Act, "act"},
    {MessageType::StepResult, "step_result"},
    {MessageType::Close, "close"},
    {MessageType::Error, "error"},
};

std::uint32_t
ReadLength(std::string_view bytes)
{
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[0])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[3]));
}

WireMessage
DecodePayload(std::string_view text)
{
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
    {
        throw FrameError("frame payload is not a JSON object");
    }
    auto type = doc.find("type");
    if (type == doc.end() || !type->is_string())
    {
        throw ProtocolError("message has no type");
    }
    const auto parsed = MessageTypeFromName(type->get<std::string>());
    if (!parsed)
    {
        throw ProtocolError("unknown message type \"" + type->get<std::string>() + "\"");
    }
    WireMessage msg;
    msg.type = *parsed;
    if (auto s = doc.find("session"); s != doc.end() && s->is_string())
    {
        msg.session = s->get<std::string>();
    }
    if (auto p = doc.find("payload"); p != doc.end())
    {
        if (!p->is_object())
        {
            throw ProtocolError("payload must be an object");
        }
        msg.payload = *p;
    }
    return msg;
}

void
SendAll(int fd, const std::string& bytes)
{
    std::size_t sent = 0;
    while (sent < bytes.size())
    {
        const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0)
        {
            if (errno == EINTR)
            {
                continue;
            }
            throw Error(std::string("send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

// Blocks until a frame is buffered; nullopt on orderly peer shutdown.
std::optional<WireMessage>
ReadFrame(int fd, std::string& buffer)
{
    while (true)
    {
        if (auto msg = ExtractFrame(buffer))
        {
            return msg;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n == 0)
        {
            if (!buffer.empty())
            {
                throw FrameError("connection closed inside a frame");
            }
            return std::nullopt;
        }
        if (n < 0)
        {
            if (errno == EINTR)
            {
                continue;
            }
            throw Error(std::string("recv failed: ") + std::strerror(errno));
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

json
PositionJson(const Position3& p)
{
    return json::array({p.x, p.y, p.z});
}

Position3
PositionFrom(const json& v)
{
    if (!v.is_array() || v.size() != 3)
    {
        throw ProtocolError("position must be [x, y, z]");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

} // namespace

std::string_view
MessageTypeName(MessageType t)
{
    for (const auto& [type, name] : kTypeNames)
    {
        if (type == t)
        {
            return name;
        }
    }
    return "error";
}

std::optional<MessageType>
MessageTypeFromName(std::string_view name)
{
    for (const auto& [type, n] : kTypeNames)
    {
        if (n == name)
        {
            return type;
        }
    }
    return std::nullopt;
}

std::string
Encode(const WireMessage& msg)
{
    const json doc = {{"type", std::string(MessageTypeName(msg.type))},
                      {"session", msg.session},
                      {"payload", msg.payload}};
    const std::string text = doc.dump();
    if (text.size() > kMaxFrameBytes)
    {
        throw FrameError("message too large to frame");
    }
    const auto n = static_cast<std::uint32_t>(text.size());
    std::string out;
    out.reserve(4 + text.size());
    out.push_back(static_cast<char>((n >> 24) & 0xff));
    out.push_back(static_cast<char>((n >> 16) & 0xff));
    out.push_back(static_cast<char>((n >> 8) & 0xff));
    out.push_back(static_cast<char>(n & 0xff));
    out += text;
    return out;
}

WireMessage
Decode(std::string_view bytes)
{
    if (bytes.size() < 4)
    {
        throw FrameError("frame shorter than its length prefix");
    }
    const std::uint32_t n = ReadLength(bytes);
    if (n > kMaxFrameBytes)
    {
        throw FrameError("frame length exceeds limit");
    }
    if (bytes.size() - 4 < n)
    {
        throw FrameError("truncated frame");
    }
    if (bytes.size() - 4 > n)
    {
        throw FrameError("trailing bytes after frame");
    }
    return DecodePayload(bytes.substr(4));
}

std::optional<WireMessage>
ExtractFrame(std::string& buffer)
{
    if (buffer.size() < 4)
    {
        return std::nullopt;
    }
    const std::uint32_t n = ReadLength(buffer);
    if (n > kMaxFrameBytes)
    {
        throw FrameError("frame length exceeds limit");
    }
    if (buffer.size() - 4 < n)
    {
        return std::nullopt;
    }
    const std::string text = buffer.substr(4, n);
    buffer.erase(0, 4 + static_cast<std::size_t>(n));
    return DecodePayload(text);
}

json
ObservationToJson(const Observation& obs, bool withThroughput)
{
    return {{"position", PositionJson(obs.position)},
            {"normalized", obs.normalized},
            {"n_los", obs.nLos},
            {"ue_count", obs.ueCount},
            {"throughput_norm", obs.throughputNorm},
            {"features", obs.Features(withThroughput)}};
}

Observation
ObservationFromJson(const json& doc)
{
    try
    {
        Observation obs;
        obs.position = PositionFrom(doc.at("position"));
        const auto& n = doc.at("normalized");
        for (std::size_t i = 0; i < 3; ++i)
        {
            obs.normalized[i] = n.at(i).get<double>();
        }
        obs.nLos = doc.at("n_los").get<int>();
        obs.ueCount = doc.at("ue_count").get<int>();
        obs.throughputNorm = doc.value("throughput_norm", 0.0);
        return obs;
    }
    catch (const json::exception& e)
    {
        throw ProtocolError(std::string("bad observation: ") + e.what());
    }
}

json
StepResultToJson(const StepResult& r, bool withThroughput)
{
    return {{"observation", ObservationToJson(r.observation, withThroughput)},
            {"reward", r.reward},
            {"done", r.done},
            {"info",
             {{"throughput_mbps", r.info.aggregateThroughput},
              {"mean_delay_s", r.info.meanDelay},
              {"feasible", r.info.feasible},
              {"n_los", r.info.nLos}}}};
}

StepResult
StepResultFromJson(const json& doc)
{
    try
    {
        StepResult r;
        r.observation = ObservationFromJson(doc.at("observation"));
        r.reward = doc.at("reward").get<double>();
        r.done = doc.at("done").get<bool>();
        const auto& info = doc.at("info");
        r.info.aggregateThroughput = info.at("throughput_mbps").get<double>();
        r.info.meanDelay = info.at("mean_delay_s").get<double>();
        r.info.feasible = info.at("feasible").get<bool>();
        r.info.nLos = info.at("n_los").get<int>();
        return r;
    }
    catch (const json::exception& e)
    {
        throw ProtocolError(std::string("bad step result: ") + e.what());
    }
}

json
SpecPayload(const ScenarioConfig& s)
{
    json actions = json::array();
    for (int a = 0; a < kActionCount; ++a)
    {
        actions.push_back(std::string(ActionName(static_cast<Action>(a))));
    }
    const double n = static_cast<double>(s.ues.size());
    json fields = json::array({
        {{"name", "x"}, {"min", 0.0}, {"max", 1.0}, {"meters", {s.zone.x.min, s.zone.x.max}}},
        {{"name", "y"}, {"min", 0.0}, {"max", 1.0}, {"meters", {s.zone.y.min, s.zone.y.max}}},
        {{"name", "z"}, {"min", 0.0}, {"max", 1.0}, {"meters", {s.zone.z.min, s.zone.z.max}}},
        {{"name", "n_los_norm"}, {"min", 0.0}, {"max", 1.0}, {"count_max", n}},
    });
    if (s.env.throughputInObservation)
    {
        fields.push_back({{"name", "throughput_norm"}, {"min", 0.0}, {"max", 1.0}});
    }
    return {{"action_count", kActionCount},
            {"actions", actions},
            {"observation", {{"fields", fields}}},
            {"episode_length", s.env.StepsPerEpisode()},
            {"ue_count", s.ues.size()},
            {"reward_range", {0.0, 1.0}}};
}

// ---------------------------------------------------------------------------
// Server

BridgeServer::BridgeServer(ScenarioConfig scenario, std::uint64_t seed)
    : m_scenario(std::move(scenario)),
      m_seed(seed)
{
}

BridgeServer::~BridgeServer()
{
    Stop();
    std::lock_guard lock(m_workersMutex);
    m_workers.clear();
}

void
BridgeServer::Listen(const std::string& host, std::uint16_t port)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0)
    {
        throw Error("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0)
    {
        ::freeaddrinfo(res);
        throw Error(std::string("socket failed: ") + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd, 16) != 0)
    {
        const std::string why = std::strerror(errno);
        ::freeaddrinfo(res);
        ::close(fd);
        throw Error("cannot listen on " + host + ":" + service + ": " + why);
    }
    ::freeaddrinfo(res);

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
    m_port = ntohs(bound.sin_port);
    m_listenFd = fd;
    UAVPOS_LOG(Info, "bridge listening on " << host << ":" << m_port);
}

void
BridgeServer::Serve()
{
    if (m_listenFd < 0)
    {
        throw Error("Serve() called before Listen()");
    }
    while (!m_stop.load())
    {
        pollfd p{m_listenFd, POLLIN, 0};
        const int ready = ::poll(&p, 1, 100);
        if (ready <= 0)
        {
            continue;
        }
        const int fd = ::accept(m_listenFd, nullptr, nullptr);
        if (fd < 0)
        {
            continue;
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::string session = "s" + std::to_string(++m_sessions);
        std::lock_guard lock(m_workersMutex);
        m_workers.emplace_back([this, fd, session] { HandleSession(fd, session); });
    }
}

void
BridgeServer::Stop()
{
    m_stop.store(true);
    if (m_listenFd >= 0)
    {
        ::shutdown(m_listenFd, SHUT_RDWR);
        ::close(m_listenFd);
        m_listenFd = -1;
    }
}

void
BridgeServer::HandleSession(int fd, std::string session)
{
    Env env(m_scenario, m_seed);
    const bool withThroughput = m_scenario.env.throughputInObservation;
    std::string buffer;
    bool greeted = false;
    bool reset = false;

    auto reply = [&](MessageType type, json payload) {
        SendAll(fd, Encode({type, session, std::move(payload)}));
    };
    auto fail = [&](const std::string& why) {
        UAVPOS_LOG(Warning, "session " << session << ": " << why);
        try
        {
            reply(MessageType::Error, {{"message", why}});
        }
        catch (const Error&)
        {
        }
    };

    try
    {
        while (!m_stop.load())
        {
            auto msg = ExtractFrame(buffer);
            if (!msg)
            {
                pollfd p{fd, POLLIN, 0};
                if (::poll(&p, 1, 100) <= 0)
                {
                    continue;
                }
                msg = ReadFrame(fd, buffer);
                if (!msg)
                {
                    break;
                }
            }
            if (!msg->session.empty() && greeted && msg->session != session)
            {
                fail("session mismatch");
                break;
            }
            if (msg->type == MessageType::Hello)
            {
                greeted = true;
                reply(MessageType::Spec, SpecPayload(m_scenario));
                continue;
            }
            if (!greeted)
            {
                fail("hello expected first");
                break;
            }
            if (msg->type == MessageType::Close)
            {
                reply(MessageType::Close, json::object());
                break;
            }
            if (msg->type == MessageType::Reset)
            {
                Observation obs;
                const auto seed = msg->payload.find("seed");
                if (seed != msg->payload.end() && !seed->is_null())
                {
                    if (!seed->is_number_unsigned())
                    {
                        fail("seed must be a non-negative integer");
                        break;
                    }
                    obs = env.Reset(seed->get<std::uint64_t>());
                }
                else
                {
                    obs = env.Reset();
                }
                reset = true;
                reply(MessageType::Obs, {{"observation", ObservationToJson(obs, withThroughput)}});
                continue;
            }
            if (msg->type == MessageType::Act)
            {
                const auto a = msg->payload.find("action");
                if (a == msg->payload.end() || !a->is_number_integer())
                {
                    fail("act carries no integer action");
                    break;
                }
                const auto action = ActionFromCode(a->get<int>());
                if (!action)
                {
                    fail("action out of range");
                    break;
                }
                if (!reset)
                {
                    fail("act before reset");
                    break;
                }
                if (env.Done())
                {
                    fail("episode finished; send reset");
                    break;
                }
                const auto result = env.Step(*action);
                reply(MessageType::StepResult, StepResultToJson(result, withThroughput));
                continue;
            }
            fail("unexpected message type " + std::string(MessageTypeName(msg->type)));
            break;
        }
    }
    catch (const FrameError& e)
    {
        fail(std::string("malformed frame: ") + e.what());
    }
    catch (const ProtocolError& e)
    {
        fail(e.what());
    }
    catch (const std::exception& e)
    {
        fail(e.what());
    }
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
}

// ---------------------------------------------------------------------------
// Client

BridgeClient::~BridgeClient()
{
    if (m_fd >= 0)
    {
        ::close(m_fd);
    }
}

void
BridgeClient::Connect(const std::string& host, std::uint16_t port)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0)
    {
        throw Error("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) != 0)
    {
        const std::string why = std::strerror(errno);
        ::freeaddrinfo(res);
        if (fd >= 0)
        {
            ::close(fd);
        }
        throw Error("cannot connect to " + host + ":" + service + ": " + why);
    }
    ::freeaddrinfo(res);
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    m_fd = fd;
}

void
BridgeClient::Send(const WireMessage& msg)
{
    if (m_fd < 0)
    {
        throw Error("client is not connected");
    }
    SendAll(m_fd, Encode(msg));
}

WireMessage
BridgeClient::Receive()
{
    if (m_fd < 0)
    {
        throw Error("client is not connected");
    }
    auto msg = ReadFrame(m_fd, m_buffer);
    if (!msg)
    {
        throw ProtocolError("server closed the connection");
    }
    return *msg;
}

WireMessage
BridgeClient::Expect(MessageType type)
{
    auto msg = Receive();
    if (msg.type == MessageType::Error)
    {
        throw ProtocolError(msg.payload.value("message", std::string("server error")));
    }
    if (msg.type != type)
    {
        throw ProtocolError("expected " + std::string(MessageTypeName(type)) + ", got " +
                            std::string(MessageTypeName(msg.type)));
    }
    return msg;
}

json
BridgeClient::Hello()
{
    Send({MessageType::Hello, "", {{"client", "uavpos"}}});
    auto msg = Expect(MessageType::Spec);
    m_session = msg.session;
    return msg.payload;
}

Observation
BridgeClient::Reset(std::optional<std::uint64_t> seed)
{
    json payload = json::object();
    if (seed)
    {
        payload["seed"] = *seed;
    }
    Send({MessageType::Reset, m_session, payload});
    return ObservationFromJson(Expect(MessageType::Obs).payload.at("observation"));
}

StepResult
BridgeClient::Step(int action)
{
    Send({MessageType::Act, m_session, {{"action", action}}});
    return StepResultFromJson(Expect(MessageType::StepResult).payload);
}

void
BridgeClient::Close()
{
    if (m_fd < 0)
    {
        return;
    }
    Send({MessageType::Close, m_session, json::object()});
    try
    {
        Expect(MessageType::Close);
    }
    catch (const Error&)
    {
    }
    ::close(m_fd);
    m_fd = -1;
}

std::pair<std::string, std::uint16_t>
ParseEndpoint(const std::string& text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string::npos)
    {
        throw ConfigError("listen", "expected host:port, got \"" + text + "\"");
    }
    const std::string portText = text.substr(colon + 1);
    if (portText.empty() || portText.find_first_not_of("0123456789") != std::string::npos)
    {
        throw ConfigError("listen", "bad port in \"" + text + "\"");
    }
    const unsigned long port = std::stoul(portText);
    if (port > 65535)
    {
        throw ConfigError("listen", "port out of range in \"" + text + "\"");
    }
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

} // namespace uavpos
