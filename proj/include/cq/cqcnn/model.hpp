#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cq/nk/layers.hpp"
#include "cq/nk/optim.hpp"
#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"
#include "cq/volio/image.hpp"

namespace cq::cqcnn {

enum class Errc { InvalidConfig, EmptyDataset, ShapeMismatch };

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

enum class Head { Quantum, ClassicalSoftmax };

const char* to_string(Head head) noexcept;
Head parse_head(const std::string& name);

struct CqcnnConfig {
    std::size_t image_size = 128;
    std::size_t conv1_out = 2;
    std::size_t conv2_out = 4;
    std::size_t kernel = 5;
    float dropout_rate = 0.5f;
    int n_qubits = 2;
    std::size_t fc_width = 2;
    Head head = Head::Quantum;
    std::uint64_t seed = 0;
    float lr = 1e-3f;
    std::size_t epochs = 10;
    std::size_t batch_size = 1;
    nk::OptimizerKind optimizer = nk::OptimizerKind::Adam;

    /// fc_width 4 with the first n_qubits features fed to the circuit.
    static CqcnnConfig paper_match(int n_qubits);

    /// Throws Error(InvalidConfig) on sizes the trunk cannot handle.
    void validate() const;

    /// Spatial sizes after conv1, pool1, conv2, pool2.
    std::vector<std::size_t> trunk_sizes() const;
    std::size_t flat_features() const;
};

/// Exact number of trainable scalars for the configured head.
std::size_t param_count(const CqcnnConfig& config);

/// Activations kept by forward() for backward().
struct ForwardCache {
    nk::Tensor input;
    nk::Tensor a1;
    std::vector<std::uint32_t> arg1;
    nk::Tensor p1;
    nk::Tensor a2;
    std::vector<std::uint32_t> arg2;
    nk::Tensor p2;
    nk::Tensor mask;
    nk::Tensor flat;
    nk::Tensor fc;
    double pq = 0.0;
    float o1 = 0.0f;
    nk::Tensor gamma;
};

/// Conv trunk, FC reduction and either the circuit head
/// (gamma = (o1, 1 - o1), o1 = sigmoid(w_out p_q + b_out)) or a dense+softmax head.
class CqcnnModel {
public:
    explicit CqcnnModel(const CqcnnConfig& config);

    const CqcnnConfig& config() const noexcept { return config_; }

    /// gamma [2]. Train mode draws the dropout mask from `dropout_rng`.
    nk::Tensor forward(const nk::Tensor& image, nk::Mode mode, nk::Rng& dropout_rng, ForwardCache* cache = nullptr) const;
    nk::Tensor forward(const volio::Image2D& image, nk::Mode mode, nk::Rng& dropout_rng,
                       ForwardCache* cache = nullptr) const;
    /// Eval-mode forward.
    nk::Tensor predict(const volio::Image2D& image) const;

    /// Adds dL/dparams for upstream dL/dgamma into the gradient buffers.
    void backward(const ForwardCache& cache, const nk::Tensor& dgamma);

    /// Flattened trunk activations before the FC layer (eval mode).
    nk::Tensor features(const volio::Image2D& image) const;

    /// Trainable tensors of the configured head, in a fixed order.
    std::vector<nk::ParamRef> params();
    std::size_t param_count() const;
    void zero_grad();

    nk::Tensor conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b;
    nk::Tensor out_w, out_b, theta;
    nk::Tensor cls_w, cls_b;

private:
    struct Grads {
        nk::Tensor conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b;
        nk::Tensor out_w, out_b, theta;
        nk::Tensor cls_w, cls_b;
    };

    CqcnnConfig config_;
    Grads grads_;
};

nk::Tensor image_tensor(const volio::Image2D& image);

}  // namespace cq::cqcnn
