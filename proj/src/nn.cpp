#include "aigc/nn.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>
#include <string>

namespace aigc::nn {

void ParamSet::set_zero()
{
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

double ParamSet::squared_norm() const
{
    double s = 0.0;
    for (const auto& w : weights) s += w.squaredNorm();
    for (const auto& b : biases) s += b.squaredNorm();
    return s;
}

void ParamSet::scale(double factor)
{
    for (auto& w : weights) w *= factor;
    for (auto& b : biases) b *= factor;
}

namespace {

void check_sizes(const std::vector<int>& sizes)
{
    if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes))
{
    check_sizes(sizes_);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        params_.weights.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
        params_.biases.push_back(Vector::Zero(sizes_[l + 1]));
    }
}

Mlp::Mlp(std::vector<int> layer_sizes, std::mt19937_64& rng) : Mlp(std::move(layer_sizes))
{
    for (std::size_t l = 0; l < params_.weights.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        auto& w = params_.weights[l];
        // Row-major fill order so the draw sequence matches the checkpoint layout.
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
        for (Eigen::Index r = 0; r < params_.biases[l].size(); ++r) params_.biases[l](r) = u(rng);
    }
}

void Mlp::check_input(Eigen::Index rows) const
{
    if (sizes_.empty()) throw std::logic_error("Mlp: uninitialized network");
    if (rows != sizes_.front())
        throw std::invalid_argument("Mlp: input size " + std::to_string(rows) + " != " +
                                    std::to_string(sizes_.front()));
}

Vector Mlp::forward(const Vector& input) const
{
    check_input(input.size());
    Vector a = input;
    const std::size_t last = params_.weights.size() - 1;
    for (std::size_t l = 0; l <= last; ++l) {
        Vector z = params_.weights[l] * a + params_.biases[l];
        a = l == last ? z : Vector(z.cwiseMax(0.0));
    }
    return a;
}

Matrix Mlp::forward(const Matrix& batch) const
{
    check_input(batch.rows());
    Matrix a = batch;
    const std::size_t last = params_.weights.size() - 1;
    for (std::size_t l = 0; l <= last; ++l) {
        Matrix z = params_.weights[l] * a;
        z.colwise() += params_.biases[l];
        a = l == last ? std::move(z) : Matrix(z.cwiseMax(0.0));
    }
    return a;
}

Matrix Mlp::forward(const Matrix& batch, ForwardCache& cache) const
{
    check_input(batch.rows());
    const std::size_t n = params_.weights.size();
    cache.inputs.resize(n);
    cache.pre.resize(n);
    cache.inputs[0] = batch;
    for (std::size_t l = 0; l < n; ++l) {
        cache.pre[l] = params_.weights[l] * cache.inputs[l];
        cache.pre[l].colwise() += params_.biases[l];
        if (l + 1 < n) cache.inputs[l + 1] = cache.pre[l].cwiseMax(0.0);
    }
    return cache.pre[n - 1];
}

ParamSet Mlp::backward(const ForwardCache& cache, const Matrix& upstream, Matrix* input_grad) const
{
    const std::size_t n = params_.weights.size();
    if (cache.pre.size() != n || cache.inputs.size() != n)
        throw std::invalid_argument("Mlp::backward: cache does not match network depth");
    if (upstream.rows() != sizes_.back() || upstream.cols() != cache.pre[n - 1].cols())
        throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");

    ParamSet g;
    g.weights.resize(n);
    g.biases.resize(n);
    Matrix delta = upstream;
    for (std::size_t l = n; l-- > 0;) {
        if (l + 1 < n) delta = delta.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
        g.weights[l] = delta * cache.inputs[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0 || input_grad) delta = params_.weights[l].transpose() * delta;
    }
    if (input_grad) *input_grad = std::move(delta);
    return g;
}

void Mlp::polyak_from(const Mlp& source, double tau)
{
    if (source.sizes_ != sizes_) throw std::invalid_argument("Mlp::polyak_from: architecture mismatch");
    for (std::size_t l = 0; l < params_.weights.size(); ++l) {
        params_.weights[l] = tau * source.params_.weights[l] + (1.0 - tau) * params_.weights[l];
        params_.biases[l] = tau * source.params_.biases[l] + (1.0 - tau) * params_.biases[l];
    }
}

std::size_t Mlp::parameter_count() const
{
    std::size_t c = 0;
    for (std::size_t l = 0; l < params_.weights.size(); ++l)
        c += static_cast<std::size_t>(params_.weights[l].size() + params_.biases[l].size());
    return c;
}

bool Mlp::all_finite() const
{
    for (const auto& w : params_.weights)
        if (!w.allFinite()) return false;
    for (const auto& b : params_.biases)
        if (!b.allFinite()) return false;
    return true;
}

void Mlp::save(std::ostream& out) const
{
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < params_.weights.size(); ++l) {
        const auto& w = params_.weights[l];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        const auto& b = params_.biases[l];
        layers.push_back({{"weights", flat}, {"biases", std::vector<double>(b.data(), b.data() + b.size())}});
    }
    out << nlohmann::json{{"layer_sizes", sizes_}, {"layers", layers}}.dump() << '\n';
}

Mlp Mlp::load(std::istream& in)
{
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("Mlp::load: malformed checkpoint: ") + e.what());
    }
    Mlp net(j.at("layer_sizes").get<std::vector<int>>());
    const auto& layers = j.at("layers");
    if (layers.size() != net.n_layers()) throw std::invalid_argument("Mlp::load: layer count mismatch");
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        const auto flat = layers[l].at("weights").get<std::vector<double>>();
        const auto bias = layers[l].at("biases").get<std::vector<double>>();
        auto& w = net.params_.weights[l];
        auto& b = net.params_.biases[l];
        if (flat.size() != static_cast<std::size_t>(w.size()) || bias.size() != static_cast<std::size_t>(b.size()))
            throw std::invalid_argument("Mlp::load: parameter count mismatch in layer " + std::to_string(l));
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
        for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = bias[static_cast<std::size_t>(r)];
    }
    if (!net.all_finite()) throw std::invalid_argument("Mlp::load: non-finite parameter");
    return net;
}

bool operator==(const Mlp& a, const Mlp& b)
{
    if (a.sizes_ != b.sizes_) return false;
    for (std::size_t l = 0; l < a.params_.weights.size(); ++l)
        if (a.params_.weights[l] != b.params_.weights[l] || a.params_.biases[l] != b.params_.biases[l])
            return false;
    return true;
}

ParamSet zeros_like(const Mlp& net)
{
    ParamSet z;
    for (const auto& w : net.params().weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : net.params().biases) z.biases.push_back(Vector::Zero(b.size()));
    return z;
}

double clip_grad_norm(ParamSet& grads, double max_norm)
{
    const double norm = std::sqrt(grads.squared_norm());
    if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
    return norm;
}

Adam::Adam(const Mlp& net, AdamConfig config) : config_(config), m_(zeros_like(net)), v_(zeros_like(net)) {}

void Adam::step(ParamSet& params, const ParamSet& grads)
{
    if (params.weights.size() != m_.weights.size() || grads.weights.size() != m_.weights.size())
        throw std::invalid_argument("Adam::step: parameter/gradient shape mismatch");
    ++t_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;

    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        if (p.rows() != g.rows() || p.cols() != g.cols() || m.rows() != g.rows() || m.cols() != g.cols())
            throw std::invalid_argument("Adam::step: tensor shape mismatch");
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        update(params.weights[l], grads.weights[l], m_.weights[l], v_.weights[l]);
        update(params.biases[l], grads.biases[l], m_.biases[l], v_.biases[l]);
    }
}

double ScalarAdam::step(double param, double grad)
{
    ++t_;
    m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
    v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad * grad;
    const double m_hat = m_ / (1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
    const double v_hat = v_ / (1.0 - std::pow(config_.beta2, static_cast<double>(t_)));
    return param - config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
}

Vector softmax(const Vector& logits)
{
    Vector e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

Vector log_softmax(const Vector& logits)
{
    const Vector shifted = logits.array() - logits.maxCoeff();
    return shifted.array() - std::log(shifted.array().exp().sum());
}

Matrix softmax_columns(const Matrix& logits)
{
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) out.col(c) = softmax(logits.col(c));
    return out;
}

Matrix log_softmax_columns(const Matrix& logits)
{
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) out.col(c) = log_softmax(logits.col(c));
    return out;
}

}  // namespace aigc::nn
