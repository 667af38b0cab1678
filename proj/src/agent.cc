#include "uavpos/agent.h"

#include "uavpos/errors.h"
#include "uavpos/log.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace uavpos
{

// ---------------------------------------------------------------------------
// QNetwork

QNetwork::QNetwork(int inputs, int hidden, int outputs)
    : m_inputs(inputs),
      m_hidden(hidden),
      m_outputs(outputs)
{
    const std::size_t n = static_cast<std::size_t>(hidden * inputs + hidden + hidden * hidden + hidden +
                                                   outputs * hidden + outputs);
    m_params.assign(n, 0.0);
}

std::size_t
QNetwork::OffsetW2() const
{
    return static_cast<std::size_t>(m_hidden * m_inputs + m_hidden);
}

std::size_t
QNetwork::OffsetW3() const
{
    return OffsetW2() + static_cast<std::size_t>(m_hidden * m_hidden + m_hidden);
}

void
QNetwork::Initialize(std::mt19937_64& rng)
{
    auto fill = [&](std::size_t offset, int rows, int cols) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (int i = 0; i < rows * cols; ++i)
        {
            m_params[offset + static_cast<std::size_t>(i)] = dist(rng);
        }
        for (int i = 0; i < rows; ++i)
        {
            m_params[offset + static_cast<std::size_t>(rows * cols + i)] = 0.0;
        }
    };
    fill(0, m_hidden, m_inputs);
    fill(OffsetW2(), m_hidden, m_hidden);
    fill(OffsetW3(), m_outputs, m_hidden);
}

namespace
{

// y = W x + b, W row-major rows x cols, b right after W.
void
Affine(const double* wb, int rows, int cols, const double* x, double* y)
{
    const double* b = wb + rows * cols;
    for (int r = 0; r < rows; ++r)
    {
        double acc = b[r];
        const double* w = wb + r * cols;
        for (int c = 0; c < cols; ++c)
        {
            acc += w[c] * x[c];
        }
        y[r] = acc;
    }
}

} // namespace

std::vector<double>
QNetwork::Forward(std::span<const double> x) const
{
    if (static_cast<int>(x.size()) != m_inputs)
    {
        throw Error("network input has " + std::to_string(x.size()) + " values, expected " +
                    std::to_string(m_inputs));
    }
    std::vector<double> h1(static_cast<std::size_t>(m_hidden));
    std::vector<double> h2(static_cast<std::size_t>(m_hidden));
    std::vector<double> out(static_cast<std::size_t>(m_outputs));
    const double* p = m_params.data();
    Affine(p, m_hidden, m_inputs, x.data(), h1.data());
    for (auto& v : h1)
    {
        v = std::max(v, 0.0);
    }
    Affine(p + OffsetW2(), m_hidden, m_hidden, h1.data(), h2.data());
    for (auto& v : h2)
    {
        v = std::max(v, 0.0);
    }
    Affine(p + OffsetW3(), m_outputs, m_hidden, h2.data(), out.data());
    return out;
}

double
QNetwork::LossAndGradient(std::span<const Sample> batch, std::vector<double>& grad) const
{
    grad.assign(m_params.size(), 0.0);
    if (batch.empty())
    {
        return 0.0;
    }
    const auto n = static_cast<double>(batch.size());
    const std::size_t H = static_cast<std::size_t>(m_hidden);
    const std::size_t I = static_cast<std::size_t>(m_inputs);
    const double* p = m_params.data();
    const double* w2 = p + OffsetW2();
    const double* w3 = p + OffsetW3();
    double* g1 = grad.data();
    double* g2 = grad.data() + OffsetW2();
    double* g3 = grad.data() + OffsetW3();

    std::vector<double> z1(H), h1(H), z2(H), h2(H), out(static_cast<std::size_t>(m_outputs));
    std::vector<double> d2(H), d1(H);
    double loss = 0.0;

    for (const auto& sample : batch)
    {
        Affine(p, m_hidden, m_inputs, sample.input.data(), z1.data());
        for (std::size_t j = 0; j < H; ++j)
        {
            h1[j] = std::max(z1[j], 0.0);
        }
        Affine(w2, m_hidden, m_hidden, h1.data(), z2.data());
        for (std::size_t j = 0; j < H; ++j)
        {
            h2[j] = std::max(z2[j], 0.0);
        }
        Affine(w3, m_outputs, m_hidden, h2.data(), out.data());

        const auto a = static_cast<std::size_t>(sample.action);
        const double err = out[a] - sample.target;
        loss += err * err / n;
        const double dOut = 2.0 * err / n;

        // Output layer: only row a receives gradient.
        for (std::size_t j = 0; j < H; ++j)
        {
            g3[a * H + j] += dOut * h2[j];
            d2[j] = z2[j] > 0.0 ? dOut * w3[a * H + j] : 0.0;
        }
        g3[static_cast<std::size_t>(m_outputs) * H + a] += dOut;

        for (std::size_t j = 0; j < H; ++j)
        {
            double acc = 0.0;
            for (std::size_t r = 0; r < H; ++r)
            {
                acc += d2[r] * w2[r * H + j];
            }
            d1[j] = z1[j] > 0.0 ? acc : 0.0;
        }
        for (std::size_t r = 0; r < H; ++r)
        {
            for (std::size_t j = 0; j < H; ++j)
            {
                g2[r * H + j] += d2[r] * h1[j];
            }
            g2[H * H + r] += d2[r];
        }
        for (std::size_t r = 0; r < H; ++r)
        {
            for (std::size_t c = 0; c < I; ++c)
            {
                g1[r * I + c] += d1[r] * sample.input[c];
            }
            g1[H * I + r] += d1[r];
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(double learningRate, double beta1, double beta2, double epsilon)
    : m_lr(learningRate),
      m_beta1(beta1),
      m_beta2(beta2),
      m_eps(epsilon)
{
}

void
Adam::Step(std::vector<double>& params, std::span<const double> grad)
{
    if (m_m.size() != params.size())
    {
        m_m.assign(params.size(), 0.0);
        m_v.assign(params.size(), 0.0);
        m_t = 0;
    }
    ++m_t;
    const double c1 = 1.0 - std::pow(m_beta1, static_cast<double>(m_t));
    const double c2 = 1.0 - std::pow(m_beta2, static_cast<double>(m_t));
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        m_m[i] = m_beta1 * m_m[i] + (1.0 - m_beta1) * grad[i];
        m_v[i] = m_beta2 * m_v[i] + (1.0 - m_beta2) * grad[i] * grad[i];
        const double mHat = m_m[i] / c1;
        const double vHat = m_v[i] / c2;
        params[i] -= m_lr * mHat / (std::sqrt(vHat) + m_eps);
    }
}

// ---------------------------------------------------------------------------
// ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity)
    : m_capacity(capacity)
{
    if (capacity == 0)
    {
        throw Error("replay buffer capacity must be positive");
    }
}

void
ReplayBuffer::Push(Transition t)
{
    if (m_items.size() < m_capacity)
    {
        m_items.push_back(std::move(t));
        return;
    }
    m_items[m_head] = std::move(t);
    m_head = (m_head + 1) % m_capacity;
}

const Transition&
ReplayBuffer::At(std::size_t i) const
{
    if (i >= m_items.size())
    {
        throw Error("replay buffer index out of range");
    }
    return m_items[(m_head + i) % m_items.size()];
}

std::vector<const Transition*>
ReplayBuffer::Sample(std::size_t count, std::mt19937_64& rng) const
{
    if (m_items.empty())
    {
        throw Error("sampling from an empty replay buffer");
    }
    std::uniform_int_distribution<std::size_t> pick(0, m_items.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        out.push_back(&m_items[pick(rng)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Learning

int
ArgMax(std::span<const double> values)
{
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
    {
        if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)])
        {
            best = i;
        }
    }
    return best;
}

Action
Act(const QNetwork& net, std::span<const double> obs, double epsilon, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon)
    {
        std::uniform_int_distribution<int> pick(0, kActionCount - 1);
        return static_cast<Action>(pick(rng));
    }
    const auto q = net.Forward(obs);
    return static_cast<Action>(ArgMax(q));
}

double
TrainStep(QNetwork& net,
          const QNetwork& target,
          std::span<const Transition* const> batch,
          double gamma,
          Adam& optimizer)
{
    std::vector<QNetwork::Sample> samples;
    samples.reserve(batch.size());
    for (const Transition* t : batch)
    {
        double y = t->reward;
        if (!t->done)
        {
            const auto next = target.Forward(t->nextObs);
            y += gamma * *std::max_element(next.begin(), next.end());
        }
        samples.push_back({t->obs, t->action, y});
    }
    std::vector<double> grad;
    const double loss = net.LossAndGradient(samples, grad);
    optimizer.Step(net.Params(), grad);
    return loss;
}

double
EpsilonAt(const TrainConfig& cfg, std::int64_t step, std::int64_t totalSteps)
{
    const double horizon = cfg.epsilonDecayFraction * static_cast<double>(totalSteps);
    if (horizon <= 0.0)
    {
        return cfg.epsilonEnd;
    }
    const double frac = std::min(1.0, static_cast<double>(step) / horizon);
    return cfg.epsilonStart + frac * (cfg.epsilonEnd - cfg.epsilonStart);
}

TrainResult
Train(const ScenarioConfig& s, std::uint64_t seed, const EpisodeCallback& onEpisode)
{
    const TrainConfig& cfg = s.train;
    Env env(s, seed);
    std::mt19937_64 rng(seed);

    QNetwork net(env.ObservationSize(), cfg.hiddenUnits, kActionCount);
    net.Initialize(rng);
    QNetwork target = net;
    Adam optimizer(cfg.learningRate);
    ReplayBuffer buffer(cfg.bufferCapacity);

    const bool withThroughput = s.env.throughputInObservation;
    const std::int64_t perEpisode = s.env.StepsPerEpisode();
    const std::int64_t total = perEpisode * cfg.episodes;

    TrainResult result;
    auto consider = [&](const Position3& p) {
        const auto report = Snapshot(s, p);
        const double r = ComputeReward(report.nLos,
                                       static_cast<int>(s.ues.size()),
                                       report.aggregateThroughput,
                                       s.TotalDemand(),
                                       s.env.w1,
                                       s.env.w2);
        if (r > result.bestReward)
        {
            result.bestReward = r;
            result.bestPosition = p;
            result.bestNLos = report.nLos;
        }
    };

    std::int64_t step = 0;
    for (int episode = 0; episode < cfg.episodes; ++episode)
    {
        auto obs = env.Reset().Features(withThroughput);
        consider(env.Position());
        double ret = 0.0;
        bool done = false;
        while (!done)
        {
            const double eps = EpsilonAt(cfg, step, total);
            const Action a = Act(net, obs, eps, rng);
            const auto res = env.Step(a);
            auto next = res.observation.Features(withThroughput);
            done = res.done;
            ret += res.reward;
            consider(res.observation.position);
            UAVPOS_LOG(Debug,
                       "ep " << episode << " step " << env.StepCount() << " action " << ActionName(a)
                             << " reward " << res.reward);

            buffer.Push({obs, static_cast<int>(a), res.reward, next, done});
            obs = std::move(next);
            ++step;

            if (buffer.Size() >= static_cast<std::size_t>(std::max(cfg.warmupTransitions, cfg.batchSize)))
            {
                const auto batch = buffer.Sample(static_cast<std::size_t>(cfg.batchSize), rng);
                TrainStep(net, target, batch, cfg.gamma, optimizer);
            }
            if (cfg.targetSyncSteps > 0 && step % cfg.targetSyncSteps == 0)
            {
                target = net;
            }
        }
        result.episodeReturns.push_back(ret);
        UAVPOS_LOG(Info, "episode " << episode << " return " << ret);
        if (onEpisode)
        {
            onEpisode(episode, ret);
        }
    }
    result.totalSteps = step;

    for (int episode = 0; episode < cfg.evalEpisodes; ++episode)
    {
        auto obs = env.Reset().Features(withThroughput);
        double ret = 0.0;
        bool done = false;
        while (!done)
        {
            const auto res = env.Step(static_cast<Action>(ArgMax(net.Forward(obs))));
            obs = res.observation.Features(withThroughput);
            ret += res.reward;
            done = res.done;
        }
        result.evalReturns.push_back(ret);
    }

    result.policy = std::move(net);
    return result;
}

// ---------------------------------------------------------------------------
// Oracle and evaluation

namespace
{

std::vector<double>
Axis(const Interval& iv, double resolution)
{
    std::vector<double> values;
    const auto n = static_cast<std::int64_t>(std::floor((iv.max - iv.min) / resolution + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i)
    {
        values.push_back(iv.min + static_cast<double>(i) * resolution);
    }
    return values;
}

} // namespace

OracleResult
GridOracle(const ScenarioConfig& s, double resolution)
{
    if (!(resolution > 0.0))
    {
        throw Error("oracle resolution must be positive");
    }
    OracleResult best;
    const auto xs = Axis(s.zone.x, resolution);
    const auto ys = Axis(s.zone.y, resolution);
    const auto zs = Axis(s.zone.z, resolution);
    for (double x : xs)
    {
        for (double y : ys)
        {
            for (double z : zs)
            {
                const Position3 p{x, y, z};
                if (InsideAnyBuilding(p, s.buildings))
                {
                    continue;
                }
                ++best.evaluated;
                auto report = Snapshot(s, p);
                const double r = ComputeReward(report.nLos,
                                               static_cast<int>(s.ues.size()),
                                               report.aggregateThroughput,
                                               s.TotalDemand(),
                                               s.env.w1,
                                               s.env.w2);
                if (r > best.reward)
                {
                    best.reward = r;
                    best.position = p;
                    best.report = std::move(report);
                }
            }
        }
    }
    return best;
}

std::vector<Position3>
DisplacedPositions(const ScenarioConfig& s, const Position3& optimum, double offset)
{
    const Position3 deltas[] = {
        {offset, 0, 0}, {-offset, 0, 0}, {0, offset, 0}, {0, -offset, 0}, {0, 0, offset}};
    std::vector<Position3> out;
    for (const auto& d : deltas)
    {
        Position3 p{optimum.x + d.x, optimum.y + d.y, optimum.z + d.z};
        p.x = std::clamp(p.x, s.zone.x.min, s.zone.x.max);
        p.y = std::clamp(p.y, s.zone.y.min, s.zone.y.max);
        p.z = std::clamp(p.z, s.zone.z.min, s.zone.z.max);
        // A point that lands inside a building is lifted just above its roof.
        for (const auto& b : s.buildings)
        {
            if (InsideBuilding(p, b))
            {
                p.z = std::min(b.height + 1.0, s.zone.z.max);
            }
        }
        out.push_back(p);
    }
    return out;
}

PositionEvaluation
EvaluatePosition(const ScenarioConfig& s,
                 const Position3& position,
                 std::span<const std::uint64_t> seeds,
                 double duration,
                 unsigned threads)
{
    if (seeds.empty())
    {
        throw Error("evaluation needs at least one seed");
    }
    if (!(duration > 0.0))
    {
        throw Error("evaluation duration must be positive");
    }
    std::vector<double> throughput(seeds.size());
    std::vector<double> delay(seeds.size());

    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(seeds.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++)
        {
            try
            {
                const auto run = DesRun(s, position, duration, seeds[i], false);
                throughput[i] = run.aggregate;
                delay[i] = run.meanDelay;
            }
            catch (...)
            {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
    {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    for (const auto& f : failures)
    {
        if (f)
        {
            std::rethrow_exception(f);
        }
    }

    PositionEvaluation eval;
    eval.position = position;
    eval.seeds.assign(seeds.begin(), seeds.end());
    eval.throughput = {"throughput", MetricKind::ThroughputMbps, std::move(throughput)};
    eval.delay = {"delay", MetricKind::DelaySeconds, std::move(delay)};
    return eval;
}

} // namespace uavpos
