#include "gsched/train.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gsched/errors.hpp"
#include "gsched/policy.hpp"

namespace gsched {

namespace {

constexpr std::uint64_t kStreamInit = 11;
constexpr std::uint64_t kStreamEpisode = 12;
constexpr std::uint64_t kStreamBatch = 13;

constexpr double kRateMeanForLoad = 50.0;

} // namespace

void TrainConfig::validate() const {
    if (episodes < 0) throw ConfigError("episodes must be non-negative");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (lookahead < 1) throw ConfigError("lookahead K must be at least 1");
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (replay_capacity < batch_size) throw ConfigError("replay capacity must hold at least one batch");
    if (graph_mix.empty()) throw ConfigError("graph mix is empty");
    double total = 0.0;
    for (const auto& e : graph_mix) {
        if (!(e.weight >= 0.0)) throw ConfigError("graph mix weights must be non-negative");
        total += e.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("graph mix proportions must sum to 1");
    if (loads.empty()) throw ConfigError("traffic load list is empty");
    for (double mu : loads) {
        if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("traffic loads must lie in (0, 1)");
    }
    try {
        validate_layer_dims(layer_dims);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (init == ParamInit::identity && layer_dims != std::vector<int>{1, 1}) {
        throw ConfigError("identity initialization requires layer_dims 1,1");
    }
    if (!(feature_scale > 0.0)) throw ConfigError("feature scale must be positive");
    if (checkpoint_every < 0) throw ConfigError("checkpoint interval must be non-negative");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(ExperienceTuple tuple) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(tuple));
}

std::vector<const ExperienceTuple*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    std::vector<std::size_t> index(items_.size());
    std::iota(index.begin(), index.end(), std::size_t{0});
    const std::size_t take = std::min(batch, index.size());
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, index.size() - 1);
        std::swap(index[i], index[pick(rng)]);
    }
    std::vector<const ExperienceTuple*> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(&items_[index[i]]);
    return out;
}

Eigen::VectorXd compute_reward(double ratio, std::span<const std::uint8_t> scheduled, const Eigen::VectorXd& u_gcn,
                               RewardActivation phi) {
    if (static_cast<Eigen::Index>(scheduled.size()) != u_gcn.size()) {
        throw std::invalid_argument("schedule indicator length must equal utility length");
    }
    const double target = phi == RewardActivation::heaviside ? (ratio - 1.0 >= 0.0 ? 1.0 : 0.0) : ratio;
    Eigen::VectorXd rho = u_gcn;
    for (std::size_t i = 0; i < scheduled.size(); ++i) {
        if (scheduled[i] > 1) throw std::invalid_argument("schedule indicator must be 0 or 1");
        if (scheduled[i] == 1) rho(static_cast<Eigen::Index>(i)) = target;
    }
    return rho;
}

double rms_loss(const Eigen::VectorXd& u_gcn, const Eigen::VectorXd& rho) {
    if (u_gcn.size() != rho.size()) throw std::invalid_argument("loss inputs differ in length");
    if (u_gcn.size() == 0) return 0.0;
    return (u_gcn - rho).norm() / std::sqrt(static_cast<double>(u_gcn.size()));
}

Eigen::VectorXd rms_loss_gradient(const Eigen::VectorXd& u_gcn, const Eigen::VectorXd& rho) {
    if (u_gcn.size() != rho.size()) throw std::invalid_argument("loss inputs differ in length");
    const Eigen::VectorXd diff = u_gcn - rho;
    const double norm = diff.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(u_gcn.size());
    return diff / (norm * std::sqrt(static_cast<double>(u_gcn.size())));
}

EpisodeExperience collect_episode(const TrainConfig& config, const GcnParams& params, std::uint64_t episode_seed) {
    Rng rng(episode_seed);

    std::vector<double> weights;
    for (const auto& e : config.graph_mix) weights.push_back(e.weight);
    std::discrete_distribution<std::size_t> pick_model(weights.begin(), weights.end());
    const GraphSpec& spec = config.graph_mix[pick_model(rng)].spec;
    auto graph = std::make_shared<const ConflictGraph>(spec.sample(rng));
    auto laplacian = std::make_shared<const LaplacianMatrix>(normalized_laplacian(*graph));

    std::uniform_int_distribution<std::size_t> pick_load(0, config.loads.size() - 1);
    const double load = config.loads[pick_load(rng)];
    // Extra K slots so the lookahead from the last decision has traffic to consume.
    const TrafficTrace trace =
        sample_traffic(*graph, config.horizon + config.lookahead, load * kRateMeanForLoad, rng, config.rates);

    auto snapshot = std::make_shared<const GcnParams>(params);
    const Policy learned = make_gcn_policy(snapshot, laplacian, config.utility, config.feature_scale);
    const Policy baseline = make_lgs_policy(config.utility);

    EpisodeExperience out;
    out.graph_model = spec.name();
    out.load = load;
    out.tuples.reserve(static_cast<std::size_t>(config.horizon));

    NetworkState state;
    state.q.assign(static_cast<std::size_t>(graph->node_count()), 0);
    state.r.assign(trace.rates_at(0).begin(), trace.rates_at(0).end());
    int wins = 0;
    for (int t = 0; t < config.horizon; ++t) {
        ExperienceTuple tuple;
        tuple.graph = graph;
        tuple.laplacian = laplacian;
        tuple.features = utility_features(state.q, state.r, config.utility, config.feature_scale);
        const Eigen::VectorXd u = infer(*snapshot, *laplacian, tuple.features);
        if (!u.allFinite()) throw NumericError("GCN produced non-finite utilities");
        Schedule sched = lgs(*graph, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));

        tuple.ratio = lookahead_compare(*graph, state, learned, baseline, config.lookahead,
                                        trace.segment(t, config.lookahead));
        if (tuple.ratio >= 1.0) ++wins;
        tuple.scheduled.assign(static_cast<std::size_t>(graph->node_count()), 0);
        for (NodeId v : sched.nodes) tuple.scheduled[static_cast<std::size_t>(v)] = 1;
        tuple.rho = compute_reward(tuple.ratio, tuple.scheduled, u, config.phi);

        state = step(*graph, state, sched, trace.arrivals_at(t), trace.rates_at(t + 1));
        out.tuples.push_back(std::move(tuple));
    }
    out.win_rate = config.horizon > 0 ? static_cast<double>(wins) / config.horizon : 0.0;
    return out;
}

GcnParams initial_params(const TrainConfig& config) {
    if (config.init == ParamInit::identity) return identity_params(config.leaky_slope);
    Rng rng(derive_seed(config.seed, kStreamInit));
    return init_params(config.layer_dims, rng, config.leaky_slope);
}

GcnGradients batch_gradient(const GcnParams& params, std::span<const ExperienceTuple* const> batch,
                            bool recompute_unscheduled, double* mean_loss) {
    GcnGradients total = GcnGradients::zeros_like(params);
    double loss_sum = 0.0;
    for (const ExperienceTuple* tuple : batch) {
        ForwardResult fwd = forward(params, *tuple->laplacian, tuple->features);
        Eigen::VectorXd rho = tuple->rho;
        if (recompute_unscheduled) {
            for (std::size_t i = 0; i < tuple->scheduled.size(); ++i) {
                const auto k = static_cast<Eigen::Index>(i);
                if (!tuple->scheduled[i]) rho(k) = fwd.utilities(k);
            }
        }
        loss_sum += rms_loss(fwd.utilities, rho);
        total += backward(params, fwd.cache, rms_loss_gradient(fwd.utilities, rho));
    }
    if (!batch.empty()) total *= 1.0 / static_cast<double>(batch.size());
    if (mean_loss) *mean_loss = batch.empty() ? 0.0 : loss_sum / static_cast<double>(batch.size());
    return total;
}

namespace {

Checkpoint make_checkpoint(const GcnParams& params, const TrainConfig& config) {
    return Checkpoint{params, config.adam};
}

std::string checkpoint_path(const TrainConfig& config, const std::string& name) {
    return (std::filesystem::path(config.checkpoint_dir) / name).string();
}

} // namespace

TrainResult train(const TrainConfig& config) {
    config.validate();
    TrainResult result;
    result.params = initial_params(config);
    AdamState adam = AdamState::create(result.params, config.adam);
    ReplayBuffer buffer(static_cast<std::size_t>(config.replay_capacity));

    for (int episode = 0; episode < config.episodes; ++episode) {
        auto fail = [&](const std::string& what) {
            if (!config.checkpoint_dir.empty()) {
                save_checkpoint_file(checkpoint_path(config, "diagnostic.ckpt"), make_checkpoint(result.params, config));
            }
            throw NumericError(what + " at episode " + std::to_string(episode));
        };
        EpisodeExperience exp;
        try {
            exp = collect_episode(config, result.params,
                                  derive_seed(config.seed, kStreamEpisode, static_cast<std::uint64_t>(episode)));
        } catch (const NumericError& e) {
            fail(e.what());
        }
        for (auto& tuple : exp.tuples) buffer.push(std::move(tuple));

        Rng batch_rng(derive_seed(config.seed, kStreamBatch, static_cast<std::uint64_t>(episode)));
        const auto batch = buffer.sample(static_cast<std::size_t>(config.batch_size), batch_rng);
        double loss = 0.0;
        const GcnGradients grads = batch_gradient(result.params, batch, config.recompute_unscheduled, &loss);
        if (!std::isfinite(loss) || adam_step(result.params, grads, adam, episode) != AdamOutcome::applied) {
            fail("non-finite loss or gradient");
        }
        result.log.push_back({episode, loss, exp.win_rate, adam.learning_rate(episode), exp.graph_model});

        if (config.checkpoint_every > 0 && !config.checkpoint_dir.empty() && (episode + 1) % config.checkpoint_every == 0) {
            save_checkpoint_file(checkpoint_path(config, "episode_" + std::to_string(episode + 1) + ".ckpt"),
                                 make_checkpoint(result.params, config));
        }
    }
    return result;
}

void write_train_log(std::ostream& os, std::span<const TrainLogRow> rows) {
    os << "episode,loss,win_rate,lr,graph_model\n";
    const auto old_precision = os.precision(10);
    for (const auto& row : rows) {
        os << row.episode << ',' << row.loss << ',' << row.win_rate << ',' << row.lr << ',' << row.graph_model << '\n';
    }
    os.precision(old_precision);
}

} // namespace gsched
