#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace aigc::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-layer tensors shaped like an Mlp's parameters.
struct ParamSet {
    std::vector<Matrix> weights;  // layer i: sizes[i+1] x sizes[i]
    std::vector<Vector> biases;

    void set_zero();
    double squared_norm() const;
    void scale(double factor);
};

// Activations of one batched forward pass, kept for backward.
struct ForwardCache {
    std::vector<Matrix> inputs;  // input to each layer (post-activation of the previous)
    std::vector<Matrix> pre;     // pre-activation of each layer
};

/// Fully connected network, ReLU on hidden layers, identity output.
/// Batches are column-major: one sample per column.
class Mlp {
public:
    Mlp() = default;
    /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Mlp(std::vector<int> layer_sizes, std::mt19937_64& rng);
    /// All-zero parameters.
    explicit Mlp(std::vector<int> layer_sizes);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    std::size_t n_layers() const { return params_.weights.size(); }

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

    Vector forward(const Vector& input) const;
    Matrix forward(const Matrix& batch) const;
    Matrix forward(const Matrix& batch, ForwardCache& cache) const;

    /// Gradients of a scalar loss with d(loss)/d(output) = `upstream`,
    /// summed over the batch. When `input_grad` is non-null it receives
    /// d(loss)/d(input).
    ParamSet backward(const ForwardCache& cache, const Matrix& upstream, Matrix* input_grad = nullptr) const;

    /// target <- tau * source + (1 - tau) * target, elementwise.
    void polyak_from(const Mlp& source, double tau);

    std::size_t parameter_count() const;
    bool all_finite() const;

    /// JSON checkpoint: {"layer_sizes": [...], "layers": [{"weights": row-major, "biases": [...]}, ...]}.
    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);

    friend bool operator==(const Mlp& a, const Mlp& b);

private:
    void check_input(Eigen::Index rows) const;

    std::vector<int> sizes_;
    ParamSet params_;
};

ParamSet zeros_like(const Mlp& net);

/// Rescales grads in place when their global norm exceeds max_norm; returns the pre-clip norm.
double clip_grad_norm(ParamSet& grads, double max_norm);

struct AdamConfig {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, AdamConfig config);

    /// One bias-corrected adaptive-moment step on `params`.
    void step(ParamSet& params, const ParamSet& grads);

    std::int64_t steps_taken() const { return t_; }
    const AdamConfig& config() const { return config_; }
    void set_learning_rate(double lr) { config_.learning_rate = lr; }

private:
    AdamConfig config_;
    ParamSet m_;
    ParamSet v_;
    std::int64_t t_ = 0;
};

// Scalar variant for single learned quantities such as log-temperature.
class ScalarAdam {
public:
    explicit ScalarAdam(AdamConfig config = {}) : config_(config) {}
    double step(double param, double grad);
    void set_learning_rate(double lr) { config_.learning_rate = lr; }

private:
    AdamConfig config_;
    double m_ = 0.0;
    double v_ = 0.0;
    std::int64_t t_ = 0;
};

/// Max-subtracted softmax.
Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);
/// Column-wise softmax / log-softmax over a batch of logits.
Matrix softmax_columns(const Matrix& logits);
Matrix log_softmax_columns(const Matrix& logits);

}  // namespace aigc::nn
