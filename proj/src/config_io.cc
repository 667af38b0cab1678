#include "uavpos/config_io.h"

#include "uavpos/errors.h"
#include "uavpos/linkmac.h"
#include "uavpos/log.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace uavpos
{

using nlohmann::json;

namespace
{

void
Check(bool ok, const std::string& path, const std::string& what)
{
    if (!ok)
    {
        throw ConfigError(path, what);
    }
}

std::string
Join(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

std::string
Index(const std::string& parent, std::size_t i)
{
    return parent + "[" + std::to_string(i) + "]";
}

const json*
Find(const json& obj, const char* key)
{
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void
RequireObject(const json& v, const std::string& path)
{
    if (!v.is_object())
    {
        throw ConfigError(path, "expected an object");
    }
}

double
Number(const json& v, const std::string& path)
{
    if (!v.is_number())
    {
        throw ConfigError(path, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d))
    {
        throw ConfigError(path, "must be finite");
    }
    return d;
}

int
Integer(const json& v, const std::string& path)
{
    if (!v.is_number_integer())
    {
        throw ConfigError(path, "expected an integer");
    }
    return v.get<int>();
}

void
Opt(const json& obj, const std::string& path, const char* key, double& out)
{
    if (const json* v = Find(obj, key))
    {
        out = Number(*v, Join(path, key));
    }
}

void
Opt(const json& obj, const std::string& path, const char* key, int& out)
{
    if (const json* v = Find(obj, key))
    {
        out = Integer(*v, Join(path, key));
    }
}

void
Opt(const json& obj, const std::string& path, const char* key, bool& out)
{
    if (const json* v = Find(obj, key))
    {
        if (!v->is_boolean())
        {
            throw ConfigError(Join(path, key), "expected true or false");
        }
        out = v->get<bool>();
    }
}

const json&
Required(const json& obj, const std::string& path, const char* key)
{
    const json* v = Find(obj, key);
    if (v == nullptr)
    {
        throw ConfigError(Join(path, key), "required field is missing");
    }
    return *v;
}

Position3
PositionFrom(const json& v, const std::string& path)
{
    if (v.is_array())
    {
        if (v.size() != 3)
        {
            throw ConfigError(path, "expected [x, y, z]");
        }
        return {Number(v[0], path), Number(v[1], path), Number(v[2], path)};
    }
    if (v.is_object())
    {
        return {Number(Required(v, path, "x"), Join(path, "x")),
                Number(Required(v, path, "y"), Join(path, "y")),
                Number(Required(v, path, "z"), Join(path, "z"))};
    }
    throw ConfigError(path, "expected [x, y, z]");
}

json
PositionJson(const Position3& p)
{
    return json::array({p.x, p.y, p.z});
}

Interval
IntervalFrom(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2)
    {
        throw ConfigError(path, "expected [min, max]");
    }
    return {Number(v[0], path), Number(v[1], path)};
}

Building
BuildingFrom(const json& v, const std::string& path)
{
    RequireObject(v, path);
    Building b;
    b.xMin = Number(Required(v, path, "x_min"), Join(path, "x_min"));
    b.xMax = Number(Required(v, path, "x_max"), Join(path, "x_max"));
    b.yMin = Number(Required(v, path, "y_min"), Join(path, "y_min"));
    b.yMax = Number(Required(v, path, "y_max"), Join(path, "y_max"));
    b.height = Number(Required(v, path, "height"), Join(path, "height"));
    b.floors = std::max(1, static_cast<int>(std::lround(b.height / 3.0)));
    Opt(v, path, "floors", b.floors);
    Opt(v, path, "rooms_x", b.roomsX);
    Opt(v, path, "rooms_y", b.roomsY);
    return b;
}

// Uniform points drawn from a seeded generator. The 53-bit conversion keeps
// the layout identical across standard libraries.
std::vector<UeSpec>
UniformLayout(const json& v, const std::string& path, const ScenarioConfig& s)
{
    RequireObject(v, path);
    if (const json* kind = Find(v, "kind"))
    {
        Check(kind->is_string() && kind->get<std::string>() == "uniform_random",
              Join(path, "kind"),
              "only \"uniform_random\" is supported");
    }
    const int count = Integer(Required(v, path, "count"), Join(path, "count"));
    if (count < 1)
    {
        throw ConfigError(Join(path, "count"), "must be at least 1");
    }
    const auto seed = Required(v, path, "seed");
    if (!seed.is_number_unsigned())
    {
        throw ConfigError(Join(path, "seed"), "expected a non-negative integer");
    }
    const double demand = Number(Required(v, path, "demand"), Join(path, "demand"));
    double height = 1.5;
    Opt(v, path, "height", height);

    std::mt19937_64 rng(seed.get<std::uint64_t>());
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<UeSpec> ues;
    int guard = 0;
    while (static_cast<int>(ues.size()) < count)
    {
        if (++guard > 1000 * count)
        {
            throw ConfigError(path, "could not place UEs outside the buildings");
        }
        const Position3 p{unit() * s.venue.width, unit() * s.venue.depth, height};
        if (InsideAnyBuilding(p, s.buildings))
        {
            continue;
        }
        UeSpec ue;
        ue.id = static_cast<int>(ues.size());
        ue.position = p;
        ue.demand = demand;
        ues.push_back(ue);
    }
    return ues;
}

std::string
InitialRuleName(InitialRule r)
{
    switch (r)
    {
    case InitialRule::VenueCenterZ10:
        return "venue_center_z10";
    case InitialRule::AboveCentralBuilding5m:
        return "above_central_building_5m";
    case InitialRule::Explicit:
        return "explicit";
    }
    return "explicit";
}

} // namespace

ScenarioConfig
ParseScenario(const json& doc)
{
    RequireObject(doc, "");
    ScenarioConfig s;
    if (const json* v = Find(doc, "name"))
    {
        Check(v->is_string(), "name", "expected a string");
        s.name = v->get<std::string>();
    }

    const json& venue = Required(doc, "", "venue");
    RequireObject(venue, "venue");
    s.venue.width = Number(Required(venue, "venue", "width"), "venue.width");
    s.venue.depth = Number(Required(venue, "venue", "depth"), "venue.depth");

    if (const json* v = Find(doc, "buildings"))
    {
        Check(v->is_array(), "buildings", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i)
        {
            s.buildings.push_back(BuildingFrom((*v)[i], Index("buildings", i)));
        }
    }

    if (const json* v = Find(doc, "radio"))
    {
        RequireObject(*v, "radio");
        Opt(*v, "radio", "frequency_hz", s.radio.frequency);
        Opt(*v, "radio", "tx_power_dbm", s.radio.txPower);
        Opt(*v, "radio", "tx_gain_dbi", s.radio.antennaGainTx);
        Opt(*v, "radio", "rx_gain_dbi", s.radio.antennaGainRx);
        Opt(*v, "radio", "noise_floor_dbm", s.radio.noiseFloor);
        Opt(*v, "radio", "channel_width_mhz", s.radio.channelWidth);
        Opt(*v, "radio", "guard_interval_ns", s.radio.guardInterval);
        Opt(*v, "radio", "spatial_streams", s.radio.spatialStreams);
    }

    if (const json* v = Find(doc, "mcs_table"))
    {
        Check(v->is_array(), "mcs_table", "expected an array");
        s.mcsTable.clear();
        for (std::size_t i = 0; i < v->size(); ++i)
        {
            const std::string p = Index("mcs_table", i);
            const json& e = (*v)[i];
            RequireObject(e, p);
            McsEntry m;
            m.index = static_cast<int>(i);
            Opt(e, p, "index", m.index);
            m.phyRate = Number(Required(e, p, "phy_rate"), Join(p, "phy_rate"));
            m.minSnr = Number(Required(e, p, "min_snr"), Join(p, "min_snr"));
            s.mcsTable.push_back(m);
        }
    }

    // Rooftop height defaults to the mean building height of this scenario.
    if (!s.buildings.empty())
    {
        double sum = 0.0;
        for (const auto& b : s.buildings)
        {
            sum += b.height;
        }
        s.street.avgRooftopHeight = sum / static_cast<double>(s.buildings.size());
    }
    if (const json* v = Find(doc, "street"))
    {
        RequireObject(*v, "street");
        Opt(*v, "street", "avg_rooftop_height", s.street.avgRooftopHeight);
        Opt(*v, "street", "street_width", s.street.streetWidth);
        Opt(*v, "street", "building_separation", s.street.buildingSeparation);
        Opt(*v, "street", "street_orientation", s.street.streetOrientation);
        Opt(*v, "street", "ue_antenna_height", s.street.ueAntennaHeight);
        Opt(*v, "street", "buildings_extent", s.street.buildingsExtent);
    }

    if (const json* v = Find(doc, "mac"))
    {
        RequireObject(*v, "mac");
        Opt(*v, "mac", "efficiency", s.mac.efficiency);
        Opt(*v, "mac", "frame_overhead", s.mac.frameOverhead);
        Opt(*v, "mac", "packet_size", s.mac.packetSize);
        Opt(*v, "mac", "queue_limit", s.mac.queueLimit);
    }

    const json* ues = Find(doc, "ues");
    const json* layout = Find(doc, "ue_layout");
    Check(ues != nullptr || layout != nullptr, "ues", "required field is missing");
    Check(ues == nullptr || layout == nullptr, "ue_layout", "give either ues or ue_layout, not both");
    if (ues != nullptr)
    {
        Check(ues->is_array(), "ues", "expected an array");
        for (std::size_t i = 0; i < ues->size(); ++i)
        {
            const std::string p = Index("ues", i);
            const json& e = (*ues)[i];
            RequireObject(e, p);
            UeSpec ue;
            ue.id = static_cast<int>(i);
            Opt(e, p, "id", ue.id);
            ue.position = PositionFrom(Required(e, p, "position"), Join(p, "position"));
            ue.demand = Number(Required(e, p, "demand"), Join(p, "demand"));
            s.ues.push_back(ue);
        }
    }
    else
    {
        s.ues = UniformLayout(*layout, "ue_layout", s);
    }

    s.zone = {{0.0, s.venue.width}, {0.0, s.venue.depth}, {1.0, 60.0}};
    if (const json* v = Find(doc, "zone"))
    {
        RequireObject(*v, "zone");
        if (const json* x = Find(*v, "x"))
        {
            s.zone.x = IntervalFrom(*x, "zone.x");
        }
        if (const json* y = Find(*v, "y"))
        {
            s.zone.y = IntervalFrom(*y, "zone.y");
        }
        if (const json* z = Find(*v, "z"))
        {
            s.zone.z = IntervalFrom(*z, "zone.z");
        }
    }

    if (const json* v = Find(doc, "env"))
    {
        RequireObject(*v, "env");
        Opt(*v, "env", "decision_interval", s.env.decisionInterval);
        Opt(*v, "env", "episode_duration", s.env.episodeDuration);
        Opt(*v, "env", "step_size", s.env.stepSize);
        Opt(*v, "env", "w1", s.env.w1);
        Opt(*v, "env", "w2", s.env.w2);
        Opt(*v, "env", "throughput_in_observation", s.env.throughputInObservation);
        if (const json* m = Find(*v, "evaluator"))
        {
            const std::string mode = m->is_string() ? m->get<std::string>() : "";
            if (mode == "analytic")
            {
                s.env.mode = EvaluatorMode::Analytic;
            }
            else if (mode == "des")
            {
                s.env.mode = EvaluatorMode::Des;
            }
            else
            {
                throw ConfigError("env.evaluator", "expected \"analytic\" or \"des\"");
            }
        }
    }

    if (const json* v = Find(doc, "train"))
    {
        RequireObject(*v, "train");
        Opt(*v, "train", "episodes", s.train.episodes);
        Opt(*v, "train", "eval_episodes", s.train.evalEpisodes);
        Opt(*v, "train", "batch_size", s.train.batchSize);
        Opt(*v, "train", "learning_rate", s.train.learningRate);
        if (const json* c = Find(*v, "buffer_capacity"))
        {
            Check(c->is_number_unsigned(), "train.buffer_capacity", "expected a positive integer");
            s.train.bufferCapacity = c->get<std::size_t>();
        }
        Opt(*v, "train", "epsilon_start", s.train.epsilonStart);
        Opt(*v, "train", "epsilon_end", s.train.epsilonEnd);
        Opt(*v, "train", "epsilon_decay_fraction", s.train.epsilonDecayFraction);
        Opt(*v, "train", "gamma", s.train.gamma);
        Opt(*v, "train", "target_sync_steps", s.train.targetSyncSteps);
        Opt(*v, "train", "warmup_transitions", s.train.warmupTransitions);
        Opt(*v, "train", "hidden_units", s.train.hiddenUnits);
    }

    if (const json* v = Find(doc, "initial_position"))
    {
        if (v->is_string())
        {
            const auto rule = v->get<std::string>();
            if (rule == "venue_center_z10")
            {
                s.initialRule = InitialRule::VenueCenterZ10;
            }
            else if (rule == "above_central_building_5m")
            {
                s.initialRule = InitialRule::AboveCentralBuilding5m;
            }
            else
            {
                throw ConfigError("initial_position", "unknown rule \"" + rule + "\"");
            }
        }
        else
        {
            RequireObject(*v, "initial_position");
            s.initialRule = InitialRule::Explicit;
            s.explicitInitial =
                PositionFrom(Required(*v, "initial_position", "explicit"), "initial_position.explicit");
        }
    }

    if (const json* v = Find(doc, "candidate_positions"))
    {
        Check(v->is_array(), "candidate_positions", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i)
        {
            s.candidatePositions.push_back(PositionFrom((*v)[i], Index("candidate_positions", i)));
        }
    }

    if (const json* v = Find(doc, "log_level"))
    {
        const auto level = v->is_string() ? ParseLogLevel(v->get<std::string>()) : std::nullopt;
        Check(level.has_value(), "log_level", "expected Error, Warning, Info or Debug");
        s.logLevel = *level;
    }

    ValidateScenario(s);
    for (auto& ue : s.ues)
    {
        ue.requiredMcs = RequiredMcs(ue.demand, s.mcsTable);
    }
    return s;
}

void
ValidateScenario(const ScenarioConfig& s)
{
    Check(s.venue.width > 0.0, "venue.width", "must be positive");
    Check(s.venue.depth > 0.0, "venue.depth", "must be positive");

    for (std::size_t i = 0; i < s.buildings.size(); ++i)
    {
        const auto& b = s.buildings[i];
        const std::string p = Index("buildings", i);
        Check(b.xMin < b.xMax, p, "x_min must be below x_max");
        Check(b.yMin < b.yMax, p, "y_min must be below y_max");
        Check(b.height > 0.0, Join(p, "height"), "must be positive");
        Check(b.floors >= 1, Join(p, "floors"), "must be at least 1");
        Check(b.roomsX >= 1 && b.roomsY >= 1, Join(p, "rooms_x"), "room counts must be at least 1");
    }

    Check(s.radio.frequency > 0.0, "radio.frequency_hz", "must be positive");
    Check(s.radio.spatialStreams >= 1, "radio.spatial_streams", "must be at least 1");
    Check(s.radio.channelWidth > 0, "radio.channel_width_mhz", "must be positive");

    Check(!s.mcsTable.empty(), "mcs_table", "must not be empty");
    for (std::size_t i = 0; i < s.mcsTable.size(); ++i)
    {
        const auto& m = s.mcsTable[i];
        const std::string p = Index("mcs_table", i);
        Check(m.index == static_cast<int>(i), Join(p, "index"), "indices must run 0, 1, 2, ...");
        Check(m.phyRate > 0.0, Join(p, "phy_rate"), "must be positive");
        if (i > 0)
        {
            Check(m.phyRate > s.mcsTable[i - 1].phyRate, Join(p, "phy_rate"), "must increase with index");
            Check(m.minSnr > s.mcsTable[i - 1].minSnr, Join(p, "min_snr"), "must increase with index");
        }
    }

    const auto& st = s.street;
    Check(st.avgRooftopHeight > 0.0, "street.avg_rooftop_height", "must be positive");
    Check(st.streetWidth > 0.0, "street.street_width", "must be positive");
    Check(st.buildingSeparation > 0.0, "street.building_separation", "must be positive");
    Check(st.streetOrientation >= 0.0 && st.streetOrientation <= 90.0,
          "street.street_orientation",
          "must lie in [0, 90]");
    Check(st.ueAntennaHeight > 0.0, "street.ue_antenna_height", "must be positive");
    Check(st.buildingsExtent > 0.0, "street.buildings_extent", "must be positive");

    Check(s.mac.efficiency > 0.0 && s.mac.efficiency <= 1.0, "mac.efficiency", "must lie in (0, 1]");
    Check(s.mac.frameOverhead >= 0.0, "mac.frame_overhead", "must be non-negative");
    Check(s.mac.packetSize > 0, "mac.packet_size", "must be positive");
    Check(s.mac.queueLimit >= 1, "mac.queue_limit", "must be at least 1");

    Check(!s.ues.empty(), "ues", "at least one UE is required");
    for (std::size_t i = 0; i < s.ues.size(); ++i)
    {
        const auto& ue = s.ues[i];
        const std::string p = Index("ues", i);
        Check(ue.demand > 0.0, Join(p, "demand"), "must be positive");
        Check(ue.demand <= s.mcsTable.back().phyRate,
              Join(p, "demand"),
              "exceeds the highest PHY rate");
        const auto& q = ue.position;
        Check(q.x >= 0.0 && q.x <= s.venue.width && q.y >= 0.0 && q.y <= s.venue.depth && q.z >= 0.0,
              Join(p, "position"),
              "must lie inside the venue");
        Check(!InsideAnyBuilding(q, s.buildings), Join(p, "position"), "lies inside a building");
    }

    for (const auto& [iv, name] :
         {std::pair{s.zone.x, "zone.x"}, std::pair{s.zone.y, "zone.y"}, std::pair{s.zone.z, "zone.z"}})
    {
        Check(iv.min <= iv.max, name, "min must not exceed max");
    }

    const auto& e = s.env;
    Check(e.decisionInterval > 0.0, "env.decision_interval", "must be positive");
    Check(e.episodeDuration >= e.decisionInterval, "env.episode_duration", "must cover at least one step");
    Check(e.stepSize > 0.0, "env.step_size", "must be positive");
    Check(e.w1 >= 0.0 && e.w2 >= 0.0, "env.w1", "weights must be non-negative");
    Check(std::abs(e.w1 + e.w2 - 1.0) <= 1e-9, "env.w2", "weights must sum to 1");

    const auto& t = s.train;
    Check(t.episodes >= 1, "train.episodes", "must be at least 1");
    Check(t.evalEpisodes >= 0, "train.eval_episodes", "must be non-negative");
    Check(t.batchSize >= 1, "train.batch_size", "must be at least 1");
    Check(t.learningRate > 0.0, "train.learning_rate", "must be positive");
    Check(t.bufferCapacity >= 1, "train.buffer_capacity", "must be at least 1");
    Check(t.epsilonStart >= 0.0 && t.epsilonStart <= 1.0, "train.epsilon_start", "must lie in [0, 1]");
    Check(t.epsilonEnd >= 0.0 && t.epsilonEnd <= 1.0, "train.epsilon_end", "must lie in [0, 1]");
    Check(t.epsilonDecayFraction >= 0.0 && t.epsilonDecayFraction <= 1.0,
          "train.epsilon_decay_fraction",
          "must lie in [0, 1]");
    Check(t.gamma >= 0.0 && t.gamma < 1.0, "train.gamma", "must lie in [0, 1)");
    Check(t.targetSyncSteps >= 1, "train.target_sync_steps", "must be at least 1");
    Check(t.warmupTransitions >= 0, "train.warmup_transitions", "must be non-negative");
    Check(t.hiddenUnits >= 1, "train.hidden_units", "must be at least 1");

    const Position3 start = s.InitialPosition();
    Check(s.zone.Contains(start), "initial_position", "lies outside the action zone");
    Check(!InsideAnyBuilding(start, s.buildings), "initial_position", "lies inside a building");

    for (std::size_t i = 0; i < s.candidatePositions.size(); ++i)
    {
        Check(IsFinite(s.candidatePositions[i]), Index("candidate_positions", i), "must be finite");
    }
}

ScenarioConfig
LoadScenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("", "cannot open scenario file " + path.string());
    }
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    auto s = ParseScenario(doc);
    UAVPOS_LOG(Info, "loaded scenario " << s.name << " from " << path.string());
    return s;
}

json
ScenarioToJson(const ScenarioConfig& s)
{
    json doc;
    doc["name"] = s.name;
    doc["venue"] = {{"width", s.venue.width}, {"depth", s.venue.depth}};
    doc["buildings"] = json::array();
    for (const auto& b : s.buildings)
    {
        doc["buildings"].push_back({{"x_min", b.xMin},
                                    {"x_max", b.xMax},
                                    {"y_min", b.yMin},
                                    {"y_max", b.yMax},
                                    {"height", b.height},
                                    {"floors", b.floors},
                                    {"rooms_x", b.roomsX},
                                    {"rooms_y", b.roomsY}});
    }
    doc["ues"] = json::array();
    for (const auto& ue : s.ues)
    {
        doc["ues"].push_back({{"id", ue.id}, {"position", PositionJson(ue.position)}, {"demand", ue.demand}});
    }
    doc["radio"] = {{"frequency_hz", s.radio.frequency},
                    {"tx_power_dbm", s.radio.txPower},
                    {"tx_gain_dbi", s.radio.antennaGainTx},
                    {"rx_gain_dbi", s.radio.antennaGainRx},
                    {"noise_floor_dbm", s.radio.noiseFloor},
                    {"channel_width_mhz", s.radio.channelWidth},
                    {"guard_interval_ns", s.radio.guardInterval},
                    {"spatial_streams", s.radio.spatialStreams}};
    doc["mcs_table"] = json::array();
    for (const auto& m : s.mcsTable)
    {
        doc["mcs_table"].push_back({{"index", m.index}, {"phy_rate", m.phyRate}, {"min_snr", m.minSnr}});
    }
    doc["street"] = {{"avg_rooftop_height", s.street.avgRooftopHeight},
                     {"street_width", s.street.streetWidth},
                     {"building_separation", s.street.buildingSeparation},
                     {"street_orientation", s.street.streetOrientation},
                     {"ue_antenna_height", s.street.ueAntennaHeight},
                     {"buildings_extent", s.street.buildingsExtent}};
    doc["mac"] = {{"efficiency", s.mac.efficiency},
                  {"frame_overhead", s.mac.frameOverhead},
                  {"packet_size", s.mac.packetSize},
                  {"queue_limit", s.mac.queueLimit}};
    doc["zone"] = {{"x", {s.zone.x.min, s.zone.x.max}},
                   {"y", {s.zone.y.min, s.zone.y.max}},
                   {"z", {s.zone.z.min, s.zone.z.max}}};
    doc["env"] = {{"decision_interval", s.env.decisionInterval},
                  {"episode_duration", s.env.episodeDuration},
                  {"step_size", s.env.stepSize},
                  {"w1", s.env.w1},
                  {"w2", s.env.w2},
                  {"evaluator", s.env.mode == EvaluatorMode::Des ? "des" : "analytic"},
                  {"throughput_in_observation", s.env.throughputInObservation}};
    doc["train"] = {{"episodes", s.train.episodes},
                    {"eval_episodes", s.train.evalEpisodes},
                    {"batch_size", s.train.batchSize},
                    {"learning_rate", s.train.learningRate},
                    {"buffer_capacity", s.train.bufferCapacity},
                    {"epsilon_start", s.train.epsilonStart},
                    {"epsilon_end", s.train.epsilonEnd},
                    {"epsilon_decay_fraction", s.train.epsilonDecayFraction},
                    {"gamma", s.train.gamma},
                    {"target_sync_steps", s.train.targetSyncSteps},
                    {"warmup_transitions", s.train.warmupTransitions},
                    {"hidden_units", s.train.hiddenUnits}};
    if (s.initialRule == InitialRule::Explicit)
    {
        doc["initial_position"] = {{"explicit", PositionJson(s.explicitInitial)}};
    }
    else
    {
        doc["initial_position"] = InitialRuleName(s.initialRule);
    }
    doc["candidate_positions"] = json::array();
    for (const auto& p : s.candidatePositions)
    {
        doc["candidate_positions"].push_back(PositionJson(p));
    }
    doc["log_level"] = std::string(LogLevelName(s.logLevel));
    return doc;
}

Position3
ParsePosition(const std::string& text)
{
    std::stringstream in(text);
    std::string part;
    std::vector<double> values;
    while (std::getline(in, part, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(part, &used));
            if (used != part.size())
            {
                throw std::invalid_argument(part);
            }
        }
        catch (const std::exception&)
        {
            throw ConfigError("position", "cannot parse \"" + text + "\" as x,y,z");
        }
    }
    if (values.size() != 3)
    {
        throw ConfigError("position", "cannot parse \"" + text + "\" as x,y,z");
    }
    return {values[0], values[1], values[2]};
}

std::vector<std::uint64_t>
ParseSeedList(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string part;
    auto number = [&](const std::string& s) -> std::uint64_t {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        {
            throw ConfigError("seeds", "cannot parse \"" + text + "\"");
        }
        return std::stoull(s);
    };
    while (std::getline(in, part, ','))
    {
        const auto dots = part.find("..");
        if (dots == std::string::npos)
        {
            seeds.push_back(number(part));
            continue;
        }
        const auto lo = number(part.substr(0, dots));
        const auto hi = number(part.substr(dots + 2));
        if (hi < lo)
        {
            throw ConfigError("seeds", "empty range \"" + part + "\"");
        }
        for (auto s = lo; s <= hi; ++s)
        {
            seeds.push_back(s);
        }
    }
    if (seeds.empty())
    {
        throw ConfigError("seeds", "no seeds given");
    }
    return seeds;
}

std::string
DumpJson(const json& doc)
{
    return doc.dump(2) + "\n";
}

void
WriteTextFile(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out)
    {
        throw Error("write failed for " + path.string());
    }
}

namespace
{

std::string
FormatNumber(double v)
{
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

} // namespace

std::vector<std::filesystem::path>
ExportMetrics(const std::vector<MetricSeries>& series,
              const ExportManifest& manifest,
              const std::filesystem::path& outDir)
{
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);
    if (ec)
    {
        throw Error("cannot create " + outDir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    json files = json::array();
    for (const auto& m : series)
    {
        for (double v : m.samples)
        {
            if (!std::isfinite(v) || v < 0.0)
            {
                throw Error("series " + m.label + " holds a negative or non-finite sample");
            }
        }
        const auto cdf = Cdf(m.samples);
        const auto ccdf = Ccdf(m.samples);
        std::string text = "value,cdf,ccdf\n";
        for (std::size_t i = 0; i < cdf.size(); ++i)
        {
            text += FormatNumber(cdf[i].value) + "," + FormatNumber(cdf[i].fraction) + "," +
                    FormatNumber(ccdf[i].fraction) + "\n";
        }
        const auto path = outDir / (m.label + ".csv");
        WriteTextFile(path, text);
        written.push_back(path);

        json samples = json::array();
        for (double v : m.samples)
        {
            samples.push_back(v);
        }
        files.push_back({{"label", m.label},
                         {"kind", std::string(MetricKindName(m.kind))},
                         {"file", path.filename().string()},
                         {"median", Median(m.samples)},
                         {"samples", samples}});
    }

    json positions = json::array();
    for (const auto& p : manifest.positions)
    {
        positions.push_back(PositionJson(p));
    }
    json doc = {{"version", kVersion},
                {"scenario", manifest.scenarioPath},
                {"command", manifest.command},
                {"seeds", manifest.seeds},
                {"duration_s", manifest.duration},
                {"positions", positions},
                {"series", files}};
    const auto path = outDir / "manifest.json";
    WriteTextFile(path, DumpJson(doc));
    written.push_back(path);
    return written;
}

json
NetworkToJson(const QNetwork& net)
{
    return {{"inputs", net.Inputs()},
            {"hidden", net.Hidden()},
            {"outputs", net.Outputs()},
            {"params", net.Params()}};
}

QNetwork
NetworkFromJson(const json& doc)
{
    RequireObject(doc, "policy");
    QNetwork net(Integer(Required(doc, "policy", "inputs"), "policy.inputs"),
                 Integer(Required(doc, "policy", "hidden"), "policy.hidden"),
                 Integer(Required(doc, "policy", "outputs"), "policy.outputs"));
    const json& params = Required(doc, "policy", "params");
    Check(params.is_array() && params.size() == net.Params().size(),
          "policy.params",
          "wrong parameter count");
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        net.Params()[i] = Number(params[i], Index("policy.params", i));
    }
    return net;
}

} // namespace uavpos
