#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsched/gcn.hpp"
#include "gsched/graph.hpp"
#include "gsched/sim.hpp"
#include "gsched/solvers.hpp"

namespace gsched {

enum class RewardActivation { heaviside, linear };
enum class ParamInit { glorot, identity };

struct GraphMixEntry {
    GraphSpec spec;
    double weight = 1.0;
};

struct TrainConfig {
    int episodes = 6000;
    int horizon = 64;
    int lookahead = 5;
    RewardActivation phi = RewardActivation::heaviside;
    int batch_size = 64;
    int replay_capacity = 4096;
    std::vector<GraphMixEntry> graph_mix = {{GraphSpec::parse("Star30"), 0.8}, {GraphSpec::parse("BA-m2"), 0.2}};
    std::vector<double> loads = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
    RateModel rates;
    std::vector<int> layer_dims = {1, 1};
    ParamInit init = ParamInit::glorot;
    double leaky_slope = 0.2;
    AdamSettings adam;
    UtilityKind utility = UtilityKind::product;
    double feature_scale = 1.0;
    // Re-evaluate unscheduled-node targets with the parameters being updated,
    // instead of the utilities frozen at collection time.
    bool recompute_unscheduled = false;
    std::uint64_t seed = 1;
    int checkpoint_every = 0;
    std::string checkpoint_dir;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

struct ExperienceTuple {
    std::shared_ptr<const ConflictGraph> graph;
    std::shared_ptr<const LaplacianMatrix> laplacian;
    Eigen::MatrixXd features;
    std::vector<std::uint8_t> scheduled;
    Eigen::VectorXd rho;
    double ratio = 1.0;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(ExperienceTuple tuple);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const ExperienceTuple& operator[](std::size_t i) const { return items_[i]; }

    /// Up to `batch` distinct tuples chosen uniformly.
    std::vector<const ExperienceTuple*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::deque<ExperienceTuple> items_;
};

/// Targets: phi(ratio) on scheduled nodes, the node's own utility elsewhere.
/// Heaviside is H(ratio - 1) with H(0) = 1.
Eigen::VectorXd compute_reward(double ratio, std::span<const std::uint8_t> scheduled, const Eigen::VectorXd& u_gcn,
                               RewardActivation phi);

/// |V|^{-1/2} * ||u - rho||_2
double rms_loss(const Eigen::VectorXd& u_gcn, const Eigen::VectorXd& rho);

/// d rms_loss / d u; zero where the loss is zero.
Eigen::VectorXd rms_loss_gradient(const Eigen::VectorXd& u_gcn, const Eigen::VectorXd& rho);

struct EpisodeExperience {
    std::vector<ExperienceTuple> tuples;
    std::string graph_model;
    double load = 0.0;
    double win_rate = 0.0;  // fraction of slots with lookahead ratio >= 1
};

/// Runs the GCN policy for one episode, scoring each slot's decision by a
/// K-step lookahead against the baseline LGS on the same traffic.
EpisodeExperience collect_episode(const TrainConfig& config, const GcnParams& params, std::uint64_t episode_seed);

struct TrainLogRow {
    int episode = 0;
    double loss = 0.0;
    double win_rate = 0.0;
    double lr = 0.0;
    std::string graph_model;
};

struct TrainResult {
    GcnParams params;
    std::vector<TrainLogRow> log;
};

GcnParams initial_params(const TrainConfig& config);

/// Gradient of the mean batch loss with the current parameters.
GcnGradients batch_gradient(const GcnParams& params, std::span<const ExperienceTuple* const> batch,
                            bool recompute_unscheduled, double* mean_loss = nullptr);

TrainResult train(const TrainConfig& config);

void write_train_log(std::ostream& os, std::span<const TrainLogRow> rows);

} // namespace gsched
