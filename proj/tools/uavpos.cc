// Command-line front end: train, eval, oracle, serve.

#include "uavpos/agent.h"
#include "uavpos/bridge.h"
#include "uavpos/config_io.h"
#include "uavpos/errors.h"
#include "uavpos/log.h"

#include "CLI11.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>

namespace
{

using namespace uavpos;
using nlohmann::json;
namespace fs = std::filesystem;

BridgeServer* g_server = nullptr;

void
OnSignal(int)
{
    if (g_server != nullptr)
    {
        g_server->Stop();
    }
}

ScenarioConfig
Load(const std::string& path, const std::string& logLevel)
{
    auto s = LoadScenario(path);
    SetLogLevel(s.logLevel);
    if (!logLevel.empty())
    {
        const auto level = ParseLogLevel(logLevel);
        if (!level)
        {
            throw ConfigError("log-level", "expected Error, Warning, Info or Debug");
        }
        SetLogLevel(*level);
    }
    return s;
}

json
PositionJson(const Position3& p)
{
    return json::array({p.x, p.y, p.z});
}

int
RunTrain(const std::string& config, std::uint64_t seed, int episodes, const std::string& out, const std::string& level)
{
    auto s = Load(config, level);
    if (episodes > 0)
    {
        s.train.episodes = episodes;
    }
    const auto result = Train(s, seed, [](int ep, double ret) {
        std::cout << "episode " << ep << " return " << ret << '\n';
    });

    json log = {{"version", kVersion},
                {"scenario", config},
                {"seed", seed},
                {"episodes", s.train.episodes},
                {"total_steps", result.totalSteps},
                {"episode_returns", result.episodeReturns},
                {"eval_returns", result.evalReturns},
                {"best_position", PositionJson(result.bestPosition)},
                {"best_reward", result.bestReward},
                {"best_n_los", result.bestNLos}};
    fs::create_directories(out);
    WriteTextFile(fs::path(out) / "train_log.json", DumpJson(log));
    WriteTextFile(fs::path(out) / "policy.json", DumpJson(NetworkToJson(result.policy)));
    std::cout << "best position " << result.bestPosition.x << "," << result.bestPosition.y << ","
              << result.bestPosition.z << " reward " << result.bestReward << " nLoS " << result.bestNLos
              << '\n';
    return 0;
}

int
RunEval(const std::string& config,
        const std::string& positionText,
        const std::string& seedText,
        double duration,
        double resolution,
        unsigned threads,
        const std::string& out,
        const std::string& level)
{
    const auto s = Load(config, level);
    const auto seeds = ParseSeedList(seedText);

    std::vector<std::pair<std::string, Position3>> targets;
    auto oracle = [&] { return GridOracle(s, resolution).position; };
    if (positionText == "oracle")
    {
        targets.emplace_back("oracle", oracle());
    }
    else if (positionText == "baseline")
    {
        if (s.candidatePositions.empty())
        {
            throw ConfigError("candidate_positions", "scenario lists no baseline position");
        }
        targets.emplace_back("baseline", s.candidatePositions.front());
    }
    else if (positionText == "all")
    {
        const auto best = oracle();
        targets.emplace_back("oracle", best);
        if (!s.candidatePositions.empty())
        {
            targets.emplace_back("baseline", s.candidatePositions.front());
        }
        const auto displaced = DisplacedPositions(s, best);
        for (std::size_t i = 0; i < displaced.size(); ++i)
        {
            targets.emplace_back("position_" + std::to_string(i + 1), displaced[i]);
        }
    }
    else
    {
        targets.emplace_back("position", ParsePosition(positionText));
    }

    json summary = json::array();
    for (const auto& [label, p] : targets)
    {
        auto eval = EvaluatePosition(s, p, seeds, duration, threads);
        const fs::path dir = targets.size() == 1 ? fs::path(out) : fs::path(out) / label;
        ExportManifest manifest{config, "eval --position " + positionText, seeds, {p}, duration};
        ExportMetrics({eval.throughput, eval.delay}, manifest, dir);
        const double thr = Median(eval.throughput.samples);
        const double delay = Median(eval.delay.samples);
        std::cout << label << " (" << p.x << "," << p.y << "," << p.z << ") median throughput " << thr
                  << " Mbit/s, median delay " << delay << " s\n";
        summary.push_back({{"label", label},
                           {"position", PositionJson(p)},
                           {"median_throughput_mbps", thr},
                           {"median_delay_s", delay}});
    }
    if (targets.size() > 1)
    {
        WriteTextFile(fs::path(out) / "summary.json", DumpJson(summary));
    }
    return 0;
}

int
RunOracle(const std::string& config, double resolution, const std::string& level)
{
    const auto s = Load(config, level);
    const auto best = GridOracle(s, resolution);
    json displaced = json::array();
    for (const auto& p : DisplacedPositions(s, best.position))
    {
        displaced.push_back(PositionJson(p));
    }
    json ues = json::array();
    for (const auto& link : best.report.ues)
    {
        ues.push_back({{"los", link.los},
                       {"snr_db", link.snr},
                       {"mcs", link.mcs ? json(*link.mcs) : json(nullptr)},
                       {"carried_mbps", link.carried}});
    }
    const json doc = {{"resolution", resolution},
                      {"evaluated", best.evaluated},
                      {"position", PositionJson(best.position)},
                      {"reward", best.reward},
                      {"n_los", best.report.nLos},
                      {"feasible", best.report.feasible},
                      {"throughput_mbps", best.report.aggregateThroughput},
                      {"utilization", best.report.utilization},
                      {"ues", ues},
                      {"displaced", displaced}};
    std::cout << DumpJson(doc);
    return 0;
}

int
RunServe(const std::string& config, const std::string& listen, std::uint64_t seed, const std::string& level)
{
    const auto s = Load(config, level);
    const auto [host, port] = ParseEndpoint(listen);
    BridgeServer server(s, seed);
    server.Listen(host, port);
    std::cout << "listening on " << host << ":" << server.Port() << std::endl;
    g_server = &server;
    std::signal(SIGINT, OnSignal);
    std::signal(SIGTERM, OnSignal);
    server.Serve();
    g_server = nullptr;
    return 0;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"UAV positioning simulator and reinforcement-learning lab"};
    app.require_subcommand(1);

    std::string config;
    std::string level;
    std::string out = ".";
    std::uint64_t seed = 1;

    auto* train = app.add_subcommand("train", "Train the DQN agent");
    int episodes = 0;
    train->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    train->add_option("--seed", seed, "Random seed");
    train->add_option("--episodes", episodes, "Override the episode count");
    train->add_option("--out", out, "Output directory");
    train->add_option("--log-level", level, "Error, Warning, Info or Debug");

    auto* eval = app.add_subcommand("eval", "Multi-seed packet-level evaluation of positions");
    std::string position = "oracle";
    std::string seeds = "1..30";
    double duration = 100.0;
    double resolution = 2.5;
    unsigned threads = 0;
    eval->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    eval->add_option("--position", position, "x,y,z | oracle | baseline | all");
    eval->add_option("--seeds", seeds, "Seed list, e.g. 1..30 or 1,2,5");
    eval->add_option("--duration", duration, "Simulated seconds per run")->check(CLI::PositiveNumber);
    eval->add_option("--resolution", resolution, "Oracle lattice spacing, m")->check(CLI::PositiveNumber);
    eval->add_option("--threads", threads, "Worker threads (0 = hardware)");
    eval->add_option("--out", out, "Output directory");
    eval->add_option("--log-level", level, "Error, Warning, Info or Debug");

    auto* oracle = app.add_subcommand("oracle", "Brute-force lattice search for the best position");
    oracle->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--resolution", resolution, "Lattice spacing, m")->check(CLI::PositiveNumber);
    oracle->add_option("--log-level", level, "Error, Warning, Info or Debug");

    auto* serve = app.add_subcommand("serve", "Expose the environment over TCP");
    std::string listen = "127.0.0.1:5555";
    serve->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    serve->add_option("--listen", listen, "host:port");
    serve->add_option("--seed", seed, "Environment seed");
    serve->add_option("--log-level", level, "Error, Warning, Info or Debug");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*train)
        {
            return RunTrain(config, seed, episodes, out, level);
        }
        if (*eval)
        {
            return RunEval(config, position, seeds, duration, resolution, threads, out, level);
        }
        if (*oracle)
        {
            return RunOracle(config, resolution, level);
        }
        if (*serve)
        {
            return RunServe(config, listen, seed, level);
        }
    }
    catch (const uavpos::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
