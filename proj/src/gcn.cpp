#include "gsched/gcn.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "gsched/errors.hpp"

namespace gsched {

std::size_t GcnParams::parameter_count() const {
    std::size_t n = 0;
    for (int l = 0; l < layers(); ++l) {
        n += static_cast<std::size_t>(self_weights[l].size() + neighbor_weights[l].size());
    }
    return n;
}

bool GcnParams::operator==(const GcnParams& other) const {
    if (layer_dims != other.layer_dims || leaky_slope != other.leaky_slope) return false;
    for (int l = 0; l < layers(); ++l) {
        if (self_weights[l] != other.self_weights[l]) return false;
        if (neighbor_weights[l] != other.neighbor_weights[l]) return false;
    }
    return true;
}

void validate_layer_dims(std::span<const int> dims) {
    if (dims.size() < 2) throw std::invalid_argument("layer_dims needs at least input and output dimension");
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("layer dimensions must be positive");
    }
    if (dims.back() != 1) throw std::invalid_argument("last layer dimension must be 1");
}

GcnParams init_params(std::span<const int> layer_dims, Rng& rng, double leaky_slope) {
    validate_layer_dims(layer_dims);
    GcnParams p;
    p.layer_dims.assign(layer_dims.begin(), layer_dims.end());
    p.leaky_slope = leaky_slope;
    for (std::size_t l = 1; l < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l - 1];
        const int fan_out = layer_dims[l];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Eigen::MatrixXd w0(fan_in, fan_out);
        Eigen::MatrixXd w1(fan_in, fan_out);
        for (Eigen::Index i = 0; i < w0.size(); ++i) w0.data()[i] = dist(rng);
        for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = dist(rng);
        p.self_weights.push_back(std::move(w0));
        p.neighbor_weights.push_back(std::move(w1));
    }
    return p;
}

GcnParams identity_params(double leaky_slope) {
    GcnParams p;
    p.layer_dims = {1, 1};
    p.leaky_slope = leaky_slope;
    p.self_weights.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
    p.neighbor_weights.push_back(Eigen::MatrixXd::Zero(1, 1));
    return p;
}

namespace {

void check_shapes(const GcnParams& params, const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& features) {
    if (laplacian.rows() != laplacian.cols()) throw std::invalid_argument("laplacian must be square");
    if (features.rows() != laplacian.rows()) throw std::invalid_argument("feature rows must equal node count");
    if (params.layers() == 0 || features.cols() != params.input_dim()) {
        throw std::invalid_argument("feature columns must equal the input dimension");
    }
}

} // namespace

ForwardResult forward(const GcnParams& params, const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& features) {
    check_shapes(params, laplacian, features);
    ForwardResult out;
    ForwardCache& cache = out.cache;
    cache.laplacian = &laplacian;
    cache.activations.push_back(features);
    const int layers = params.layers();
    for (int l = 0; l < layers; ++l) {
        const Eigen::MatrixXd& x = cache.activations.back();
        Eigen::MatrixXd lx = laplacian * x;
        Eigen::MatrixXd z = x * params.self_weights[l] + lx * params.neighbor_weights[l];
        Eigen::MatrixXd a = z;
        if (l + 1 < layers) {
            const double slope = params.leaky_slope;
            a = z.unaryExpr([slope](double v) { return v < 0.0 ? slope * v : v; });
        }
        cache.propagated.push_back(std::move(lx));
        cache.pre_activations.push_back(std::move(z));
        cache.activations.push_back(std::move(a));
    }
    out.utilities = cache.activations.back().col(0);
    return out;
}

Eigen::VectorXd infer(const GcnParams& params, const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& features) {
    return forward(params, laplacian, features).utilities;
}

GcnGradients GcnGradients::zeros_like(const GcnParams& params) {
    GcnGradients g;
    for (int l = 0; l < params.layers(); ++l) {
        g.self_weights.push_back(Eigen::MatrixXd::Zero(params.self_weights[l].rows(), params.self_weights[l].cols()));
        g.neighbor_weights.push_back(
            Eigen::MatrixXd::Zero(params.neighbor_weights[l].rows(), params.neighbor_weights[l].cols()));
    }
    return g;
}

GcnGradients& GcnGradients::operator+=(const GcnGradients& other) {
    if (other.self_weights.size() != self_weights.size()) throw std::invalid_argument("gradient layer count mismatch");
    for (std::size_t l = 0; l < self_weights.size(); ++l) {
        self_weights[l] += other.self_weights[l];
        neighbor_weights[l] += other.neighbor_weights[l];
    }
    return *this;
}

GcnGradients& GcnGradients::operator*=(double scale) {
    for (std::size_t l = 0; l < self_weights.size(); ++l) {
        self_weights[l] *= scale;
        neighbor_weights[l] *= scale;
    }
    return *this;
}

bool GcnGradients::all_finite() const {
    for (std::size_t l = 0; l < self_weights.size(); ++l) {
        if (!self_weights[l].allFinite() || !neighbor_weights[l].allFinite()) return false;
    }
    return true;
}

GcnGradients backward(const GcnParams& params, const ForwardCache& cache, const Eigen::VectorXd& output_grad) {
    const int layers = params.layers();
    if (cache.laplacian == nullptr || static_cast<int>(cache.pre_activations.size()) != layers ||
        static_cast<int>(cache.activations.size()) != layers + 1) {
        throw std::invalid_argument("forward cache does not match parameter layer count");
    }
    for (int l = 0; l < layers; ++l) {
        const auto& x = cache.activations[static_cast<std::size_t>(l)];
        if (x.cols() != params.self_weights[l].rows() || cache.pre_activations[l].cols() != params.self_weights[l].cols()) {
            throw std::invalid_argument("forward cache shapes do not match parameters");
        }
    }
    if (output_grad.size() != cache.activations.back().rows()) {
        throw std::invalid_argument("output gradient length must equal node count");
    }

    const Eigen::MatrixXd& lap = *cache.laplacian;
    GcnGradients grads = GcnGradients::zeros_like(params);
    Eigen::MatrixXd upstream = output_grad;  // dLoss/dX^L
    for (int l = layers - 1; l >= 0; --l) {
        Eigen::MatrixXd dz = upstream;
        if (l + 1 < layers) {
            const double slope = params.leaky_slope;
            dz = upstream.cwiseProduct(
                cache.pre_activations[l].unaryExpr([slope](double v) { return v < 0.0 ? slope : 1.0; }));
        }
        const auto& x = cache.activations[static_cast<std::size_t>(l)];
        grads.self_weights[l] = x.transpose() * dz;
        grads.neighbor_weights[l] = cache.propagated[l].transpose() * dz;
        if (l > 0) {
            // The Laplacian is symmetric, so its transpose is itself.
            upstream = dz * params.self_weights[l].transpose() + lap * (dz * params.neighbor_weights[l].transpose());
        }
    }
    return grads;
}

AdamState AdamState::create(const GcnParams& params, const AdamSettings& settings) {
    AdamState s;
    s.settings = settings;
    s.first_moment = GcnGradients::zeros_like(params);
    s.second_moment = GcnGradients::zeros_like(params);
    return s;
}

double AdamState::learning_rate(std::int64_t episode) const {
    return settings.base_lr * std::pow(settings.decay, static_cast<double>(episode));
}

namespace {

void adam_update(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                 const AdamSettings& s, double lr, double bias1, double bias2) {
    if (m.rows() != param.rows() || m.cols() != param.cols() || grad.rows() != param.rows() ||
        grad.cols() != param.cols()) {
        throw std::invalid_argument("adam: gradient shape does not match parameter shape");
    }
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    const Eigen::ArrayXXd m_hat = m.array() / bias1;
    const Eigen::ArrayXXd v_hat = v.array() / bias2;
    param.array() -= lr * m_hat / (v_hat.sqrt() + s.epsilon);
}

} // namespace

AdamOutcome adam_step(GcnParams& params, const GcnGradients& grads, AdamState& state, std::int64_t episode) {
    if (grads.self_weights.size() != params.self_weights.size() ||
        state.first_moment.self_weights.size() != params.self_weights.size()) {
        throw std::invalid_argument("adam: layer count mismatch");
    }
    if (!grads.all_finite()) return AdamOutcome::skipped_non_finite;

    const AdamSettings& s = state.settings;
    ++state.step;
    const double bias1 = 1.0 - std::pow(s.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(s.beta2, static_cast<double>(state.step));
    const double lr = state.learning_rate(episode);
    for (std::size_t l = 0; l < params.self_weights.size(); ++l) {
        adam_update(params.self_weights[l], grads.self_weights[l], state.first_moment.self_weights[l],
                    state.second_moment.self_weights[l], s, lr, bias1, bias2);
        adam_update(params.neighbor_weights[l], grads.neighbor_weights[l], state.first_moment.neighbor_weights[l],
                    state.second_moment.neighbor_weights[l], s, lr, bias1, bias2);
    }
    return AdamOutcome::applied;
}

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'S', 'C', 'H', 'C', 'K', 'P', 'T'};

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    auto bits = std::bit_cast<U>(value);
    char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf, sizeof(U));
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    unsigned char buf[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) throw std::runtime_error("checkpoint truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

void put_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_le<double>(os, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& is, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = get_le<double>(is);
    return m;
}

} // namespace

void save_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
    const GcnParams& p = ckpt.params;
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, kCheckpointVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.layers()));
    for (int d : p.layer_dims) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    put_le<double>(os, p.leaky_slope);
    put_le<double>(os, ckpt.adam.base_lr);
    put_le<double>(os, ckpt.adam.decay);
    put_le<double>(os, ckpt.adam.beta1);
    put_le<double>(os, ckpt.adam.beta2);
    put_le<double>(os, ckpt.adam.epsilon);
    for (int l = 0; l < p.layers(); ++l) {
        put_matrix(os, p.self_weights[l]);
        put_matrix(os, p.neighbor_weights[l]);
    }
    if (!os) throw std::runtime_error("checkpoint write failed");
}

Checkpoint load_checkpoint(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a checkpoint file");
    const auto version = get_le<std::uint32_t>(is);
    if (version != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    const auto layers = get_le<std::uint32_t>(is);
    if (layers == 0 || layers > 64) throw std::runtime_error("checkpoint has implausible layer count");
    Checkpoint ckpt;
    GcnParams& p = ckpt.params;
    for (std::uint32_t i = 0; i <= layers; ++i) p.layer_dims.push_back(static_cast<int>(get_le<std::uint32_t>(is)));
    validate_layer_dims(p.layer_dims);
    p.leaky_slope = get_le<double>(is);
    ckpt.adam.base_lr = get_le<double>(is);
    ckpt.adam.decay = get_le<double>(is);
    ckpt.adam.beta1 = get_le<double>(is);
    ckpt.adam.beta2 = get_le<double>(is);
    ckpt.adam.epsilon = get_le<double>(is);
    for (std::uint32_t l = 1; l <= layers; ++l) {
        p.self_weights.push_back(get_matrix(is, p.layer_dims[l - 1], p.layer_dims[l]));
        p.neighbor_weights.push_back(get_matrix(is, p.layer_dims[l - 1], p.layer_dims[l]));
    }
    return ckpt;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    save_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    return load_checkpoint(is);
}

} // namespace gsched
