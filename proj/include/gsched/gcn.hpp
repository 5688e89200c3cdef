#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsched/graph.hpp"
#include "gsched/rng.hpp"

namespace gsched {

/// Parameters of a graph convolutional network whose layer l computes
///   X^l = act(X^{l-1} W0^l + Lap X^{l-1} W1^l)
/// with leaky ReLU on hidden layers and identity on the last one.
/// layer_dims = [g_0, ..., g_L] with g_L = 1 so the output is one utility per node.
struct GcnParams {
    std::vector<int> layer_dims;
    std::vector<Eigen::MatrixXd> self_weights;      // W0^l, g_{l-1} x g_l
    std::vector<Eigen::MatrixXd> neighbor_weights;  // W1^l, g_{l-1} x g_l
    double leaky_slope = 0.2;

    int layers() const { return static_cast<int>(self_weights.size()); }
    int input_dim() const { return layer_dims.front(); }
    std::size_t parameter_count() const;

    bool operator==(const GcnParams& other) const;
};

void validate_layer_dims(std::span<const int> dims);

/// Glorot-uniform initialization, entries in +-sqrt(6 / (fan_in + fan_out)).
GcnParams init_params(std::span<const int> layer_dims, Rng& rng, double leaky_slope = 0.2);

/// Single-layer linear model that reproduces its scalar input (W0 = 1, W1 = 0).
GcnParams identity_params(double leaky_slope = 0.2);

struct ForwardCache {
    const Eigen::MatrixXd* laplacian = nullptr;
    std::vector<Eigen::MatrixXd> activations;      // X^0 .. X^L
    std::vector<Eigen::MatrixXd> pre_activations;  // Z^1 .. Z^L
    std::vector<Eigen::MatrixXd> propagated;       // Lap X^0 .. Lap X^{L-1}
};

struct ForwardResult {
    Eigen::VectorXd utilities;
    ForwardCache cache;
};

/// The Laplacian must outlive the returned cache.
ForwardResult forward(const GcnParams& params, const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& features);

/// Utilities only; no cache retained.
Eigen::VectorXd infer(const GcnParams& params, const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& features);

struct GcnGradients {
    std::vector<Eigen::MatrixXd> self_weights;
    std::vector<Eigen::MatrixXd> neighbor_weights;

    static GcnGradients zeros_like(const GcnParams& params);
    GcnGradients& operator+=(const GcnGradients& other);
    GcnGradients& operator*=(double scale);
    bool all_finite() const;
};

/// Reverse-mode gradients of a scalar loss given dLoss/du.
GcnGradients backward(const GcnParams& params, const ForwardCache& cache, const Eigen::VectorXd& output_grad);

struct AdamSettings {
    double base_lr = 1e-3;
    double decay = 0.999;  // per episode
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamSettings settings;
    std::int64_t step = 0;
    GcnGradients first_moment;
    GcnGradients second_moment;

    static AdamState create(const GcnParams& params, const AdamSettings& settings);
    double learning_rate(std::int64_t episode) const;
};

enum class AdamOutcome { applied, skipped_non_finite };

/// One bias-corrected Adam update at learning rate base_lr * decay^episode.
/// Non-finite gradients leave params and state untouched.
AdamOutcome adam_step(GcnParams& params, const GcnGradients& grads, AdamState& state, std::int64_t episode);

// Checkpoint layout (little-endian):
//   char[8]  magic "GSCHCKPT"
//   u32      version (1)
//   u32      L
//   u32[L+1] layer_dims
//   f64      leaky_slope, base_lr, decay, beta1, beta2, epsilon
//   for l in 1..L: W0^l row-major f64, then W1^l row-major f64
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    GcnParams params;
    AdamSettings adam;
};

void save_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& is);
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

} // namespace gsched
