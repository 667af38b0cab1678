#include "support.h"

#include "uavpos/bridge.h"
#include "uavpos/config_io.h"
#include "uavpos/errors.h"

#include "doctest.h"

#include <random>
#include <string>
#include <thread>

using namespace uavpos;
using namespace uavpos::testing;
using nlohmann::json;

namespace
{

// Server on an ephemeral loopback port, served from a background thread.
class LocalServer
{
  public:
    explicit LocalServer(const ScenarioConfig& s, std::uint64_t seed = 1)
        : m_server(s, seed)
    {
        m_server.Listen("127.0.0.1", 0);
        m_thread = std::jthread([this] { m_server.Serve(); });
    }

    ~LocalServer()
    {
        m_server.Stop();
    }

    std::uint16_t Port() const
    {
        return m_server.Port();
    }

  private:
    BridgeServer m_server;
    std::jthread m_thread;
};

std::string
ErrorMessage(BridgeClient& client)
{
    const auto reply = client.Receive();
    REQUIRE(reply.type == MessageType::Error);
    return reply.payload.at("message").get<std::string>();
}

} // namespace

TEST_CASE("encode/decode round-trip for every message type")
{
    for (int t = 0; t <= static_cast<int>(MessageType::Error); ++t)
    {
        const auto type = static_cast<MessageType>(t);
        REQUIRE(MessageTypeFromName(MessageTypeName(type)) == type);
        const WireMessage msg{type, "s42", {{"action", 3}, {"nested", {{"x", 0.1}, {"list", {1, 2, 3}}}}}};
        const auto bytes = Encode(msg);
        REQUIRE(bytes.size() > 4);
        const std::uint32_t length = (std::uint32_t(std::uint8_t(bytes[0])) << 24) |
                                     (std::uint32_t(std::uint8_t(bytes[1])) << 16) |
                                     (std::uint32_t(std::uint8_t(bytes[2])) << 8) | std::uint8_t(bytes[3]);
        CHECK(length == bytes.size() - 4);
        CHECK(Decode(bytes) == msg);
    }
}

TEST_CASE("framing errors")
{
    CHECK_THROWS_AS(Decode(""), FrameError);
    CHECK_THROWS_AS(Decode(std::string("\0\0", 2)), FrameError);

    const auto good = Encode({MessageType::Reset, "", json::object()});
    CHECK_THROWS_AS(Decode(good.substr(0, good.size() - 1)), FrameError);
    CHECK_THROWS_AS(Decode(good + "x"), FrameError);

    const std::string text = "not json";
    std::string bad(4, '\0');
    bad[3] = static_cast<char>(text.size());
    CHECK_THROWS_AS(Decode(bad + text), FrameError);
}

TEST_CASE("unknown message type is a protocol error")
{
    const std::string text = R"({"type":"teleport","session":"","payload":{}})";
    std::string frame(4, '\0');
    frame[3] = static_cast<char>(text.size());
    CHECK_THROWS_AS(Decode(frame + text), ProtocolError);
}

TEST_CASE("extra fields are ignored")
{
    const std::string text = R"({"type":"act","session":"s1","payload":{"action":2,"future":true},"trace":"x"})";
    std::string frame(4, '\0');
    frame[3] = static_cast<char>(text.size());
    const auto msg = Decode(frame + text);
    CHECK(msg.type == MessageType::Act);
    CHECK(msg.payload.at("action") == 2);
}

TEST_CASE("frames are extracted from a byte stream")
{
    const auto a = Encode({MessageType::Hello, "", json::object()});
    const auto b = Encode({MessageType::Act, "s1", {{"action", 6}}});
    std::string buffer = a + b.substr(0, 5);
    auto first = ExtractFrame(buffer);
    REQUIRE(first.has_value());
    CHECK(first->type == MessageType::Hello);
    CHECK_FALSE(ExtractFrame(buffer).has_value());
    buffer += b.substr(5);
    auto second = ExtractFrame(buffer);
    REQUIRE(second.has_value());
    CHECK(second->payload.at("action") == 6);
    CHECK(buffer.empty());
}

TEST_CASE("observation and step result JSON round-trip")
{
    const auto s = LoadScenario(ScenarioPath("scenario_b.json"));
    Env env(s, 3);
    const auto obs = env.Reset();
    CHECK(ObservationFromJson(ObservationToJson(obs, false)) == obs);
    const auto r = env.Step(Action::Up);
    CHECK(StepResultFromJson(StepResultToJson(r, false)) == r);
}

TEST_CASE("hello returns the spec")
{
    const auto s = LoadScenario(ScenarioPath("scenario_b.json"));
    LocalServer server(s);
    BridgeClient client;
    client.Connect("127.0.0.1", server.Port());
    const auto spec = client.Hello();
    CHECK(spec.at("action_count") == 7);
    CHECK(spec.at("actions").size() == 7);
    CHECK(spec.at("episode_length") == 1000);
    CHECK(spec.at("ue_count") == 4);
    const auto& fields = spec.at("observation").at("fields");
    REQUIRE(fields.size() == 4);
    CHECK(fields[0].at("name") == "x");
    CHECK(fields[3].at("name") == "n_los_norm");
    client.Close();
}

TEST_CASE("protocol violations close the session with an error")
{
    const auto s = LoadScenario(ScenarioPath("scenario_b.json"));
    LocalServer server(s);

    SUBCASE("action out of range")
    {
        BridgeClient client;
        client.Connect("127.0.0.1", server.Port());
        client.Hello();
        client.Reset();
        client.Send({MessageType::Act, "", {{"action", 9}}});
        CHECK(ErrorMessage(client) == "action out of range");
    }
    SUBCASE("act before reset")
    {
        BridgeClient client;
        client.Connect("127.0.0.1", server.Port());
        client.Hello();
        client.Send({MessageType::Act, "", {{"action", 0}}});
        CHECK(ErrorMessage(client) == "act before reset");
    }
    SUBCASE("hello must come first")
    {
        BridgeClient client;
        client.Connect("127.0.0.1", server.Port());
        client.Send({MessageType::Reset, "", json::object()});
        CHECK(ErrorMessage(client) == "hello expected first");
    }
    SUBCASE("client helper raises the server error")
    {
        BridgeClient client;
        client.Connect("127.0.0.1", server.Port());
        client.Hello();
        client.Reset();
        CHECK_THROWS_AS(client.Step(12), ProtocolError);
    }
}

TEST_CASE("remote trajectories equal in-process ones")
{
    auto s = LoadScenario(ScenarioPath("scenario_c.json"));
    s.env.episodeDuration = 3.0;
    LocalServer server(s, 11);

    BridgeClient client;
    client.Connect("127.0.0.1", server.Port());
    client.Hello();

    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    for (int sequence = 0; sequence < 100; ++sequence)
    {
        const std::uint64_t seed = 100 + sequence;
        Env local(s, 11);
        REQUIRE(client.Reset(seed) == local.Reset(seed));
        bool done = false;
        while (!done)
        {
            const int code = pick(rng);
            const auto remote = client.Step(code);
            const auto mine = local.Step(*ActionFromCode(code));
            REQUIRE(remote.observation == mine.observation);
            REQUIRE(remote.reward == mine.reward);
            REQUIRE(remote.done == mine.done);
            done = mine.done;
        }
    }
    client.Close();
}

TEST_CASE("sessions are independent")
{
    auto s = LoadScenario(ScenarioPath("scenario_b.json"));
    s.env.mode = EvaluatorMode::Des;
    LocalServer server(s, 5);

    BridgeClient a;
    BridgeClient b;
    a.Connect("127.0.0.1", server.Port());
    b.Connect("127.0.0.1", server.Port());
    a.Hello();
    b.Hello();
    a.Reset(1);
    b.Reset(1);
    // Interleave: a moves, b stays, then compare against fresh local runs.
    Env la(s, 5);
    Env lb(s, 5);
    la.Reset(1);
    lb.Reset(1);
    for (int i = 0; i < 30; ++i)
    {
        CHECK(a.Step(0) == la.Step(Action::Up));
        CHECK(b.Step(6) == lb.Step(Action::Stay));
    }
    a.Close();
    b.Close();
}

TEST_CASE("endpoint parsing")
{
    const auto [host, port] = ParseEndpoint("127.0.0.1:5555");
    CHECK(host == "127.0.0.1");
    CHECK(port == 5555);
    CHECK_THROWS_AS(ParseEndpoint("nohost"), Error);
    CHECK_THROWS_AS(ParseEndpoint("h:99999"), Error);
}
