#ifndef UAVPOS_AGENT_H
#define UAVPOS_AGENT_H

#include "uavpos/env.h"
#include "uavpos/metrics.h"
#include "uavpos/scenario.h"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace uavpos
{

/**
 * Fully connected value network: inputs -> hidden -> hidden -> outputs,
 * rectifier on the hidden layers, linear output. Parameters live in one
 * flat vector: W1, b1, W2, b2, W3, b3 (weights row-major, one row per unit).
 */
class QNetwork
{
  public:
    QNetwork() = default;
    QNetwork(int inputs, int hidden, int outputs);

    /// Uniform fan-in scaled initialization; biases start at zero.
    void Initialize(std::mt19937_64& rng);

    std::vector<double> Forward(std::span<const double> x) const;

    int Inputs() const
    {
        return m_inputs;
    }

    int Hidden() const
    {
        return m_hidden;
    }

    int Outputs() const
    {
        return m_outputs;
    }

    std::vector<double>& Params()
    {
        return m_params;
    }

    const std::vector<double>& Params() const
    {
        return m_params;
    }

    /// One regression sample: push output \p action towards \p target.
    struct Sample
    {
        std::span<const double> input;
        int action{0};
        double target{0.0};
    };

    /// Mean squared error over the chosen outputs; \p grad receives dLoss/dParams.
    double LossAndGradient(std::span<const Sample> batch, std::vector<double>& grad) const;

    bool operator==(const QNetwork&) const = default;

  private:
    std::size_t OffsetW2() const;
    std::size_t OffsetW3() const;

    int m_inputs{0};
    int m_hidden{0};
    int m_outputs{0};
    std::vector<double> m_params;
};

class Adam
{
  public:
    explicit Adam(double learningRate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    void Step(std::vector<double>& params, std::span<const double> grad);

  private:
    double m_lr;
    double m_beta1;
    double m_beta2;
    double m_eps;
    std::int64_t m_t{0};
    std::vector<double> m_m;
    std::vector<double> m_v;
};

struct Transition
{
    std::vector<double> obs;
    int action{0};
    double reward{0.0};
    std::vector<double> nextObs;
    bool done{false};
};

/// Fixed-capacity FIFO of transitions.
class ReplayBuffer
{
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void Push(Transition t);

    std::size_t Size() const
    {
        return m_items.size();
    }

    std::size_t Capacity() const
    {
        return m_capacity;
    }

    /// i-th oldest stored transition.
    const Transition& At(std::size_t i) const;

    /// Uniform draw with replacement.
    std::vector<const Transition*> Sample(std::size_t count, std::mt19937_64& rng) const;

  private:
    std::size_t m_capacity;
    std::size_t m_head{0}; ///< index of the oldest entry once full
    std::vector<Transition> m_items;
};

/// Epsilon-greedy; greedy ties resolve to the lowest action code.
Action Act(const QNetwork& net, std::span<const double> obs, double epsilon, std::mt19937_64& rng);

/// Index of the largest value, first one on ties.
int ArgMax(std::span<const double> values);

/// One gradient step on a batch; returns the loss before the update.
double TrainStep(QNetwork& net,
                 const QNetwork& target,
                 std::span<const Transition* const> batch,
                 double gamma,
                 Adam& optimizer);

/// Linear decay from start to end over the first fraction of the run.
double EpsilonAt(const TrainConfig& cfg, std::int64_t step, std::int64_t totalSteps);

struct TrainResult
{
    QNetwork policy;
    std::vector<double> episodeReturns;
    std::vector<double> evalReturns;
    Position3 bestPosition;
    double bestReward{-1.0};
    int bestNLos{0};
    std::int64_t totalSteps{0};
};

/// Called after every episode with (episode index, return).
using EpisodeCallback = std::function<void(int, double)>;

TrainResult Train(const ScenarioConfig& s, std::uint64_t seed, const EpisodeCallback& onEpisode = {});

struct OracleResult
{
    Position3 position;
    double reward{-1.0};
    LinkReport report;
    std::size_t evaluated{0};
};

/// Exhaustive scan of the zone lattice anchored at its minimum corner.
OracleResult GridOracle(const ScenarioConfig& s, double resolution);

/// The optimum moved 10 m along +x, -x, +y, -y, +z, kept inside the zone and out of buildings.
std::vector<Position3> DisplacedPositions(const ScenarioConfig& s, const Position3& optimum, double offset = 10.0);

struct PositionEvaluation
{
    Position3 position;
    std::vector<std::uint64_t> seeds;
    MetricSeries throughput; ///< aggregate Mbit/s, one sample per seed
    MetricSeries delay;      ///< mean packet delay s, one sample per seed
};

/// One DES run per seed, fanned out over \p threads workers; samples keep seed order.
PositionEvaluation EvaluatePosition(const ScenarioConfig& s,
                                    const Position3& position,
                                    std::span<const std::uint64_t> seeds,
                                    double duration,
                                    unsigned threads = 0);

} // namespace uavpos

#endif
