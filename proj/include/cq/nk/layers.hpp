#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"

namespace cq::nk {

enum class Padding { Valid, Same };
enum class Mode { Train, Eval };

// Every forward kernel here has a paired backward taking the upstream
// gradient dL/dy and returning gradients for its inputs and parameters.

struct Conv2dGrads {
    Tensor dx;  // [C_in,H,W]
    Tensor dw;  // [C_out,C_in,K,K]
    Tensor db;  // [C_out]
};

/// Cross-correlation of x [C_in,H,W] with w [C_out,C_in,K,K] plus bias.
/// Valid: no padding, (H-K) must divide by stride. Same: odd K, stride 1,
/// zero padding (K-1)/2 so the output keeps H,W.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride = 1, Padding pad = Padding::Valid);
Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, int stride = 1,
                            Padding pad = Padding::Valid);
Shape conv2d_output_shape(const Shape& x, const Shape& w, int stride, Padding pad);

/// 2x2/stride-2 max pooling with floor semantics on odd sizes. If argmax is
/// given it receives, per output element, the flat input index of the winner
/// (first in row-major order on ties).
Tensor maxpool2x2(const Tensor& x, std::vector<std::uint32_t>* argmax = nullptr);
Tensor maxpool2x2_backward(const Shape& x_shape, std::span<const std::uint32_t> argmax, const Tensor& dy);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& dy);

struct DenseGrads {
    Tensor dx;
    Tensor dw;
    Tensor db;
};

/// y = W x + b with W [N_out,N_in], x [N_in] (any shape with N_in elements).
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b);
DenseGrads dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy);

/// Inverted dropout. In train mode each unit is zeroed with probability rate
/// and survivors are scaled by 1/(1-rate); mask (if given) receives the
/// per-unit factor. Eval mode is the identity.
Tensor dropout(const Tensor& x, float rate, Mode mode, Rng& rng, Tensor* mask = nullptr);
Tensor dropout_backward(const Tensor& mask, const Tensor& dy);

struct ConvTransposeGrads {
    Tensor dx;  // [C_in,H,W]
    Tensor dw;  // [C_in,C_out,2,2]
    Tensor db;  // [C_out]
};

/// 2x2 kernel, stride 2 transposed convolution: [C_in,H,W] -> [C_out,2H,2W].
Tensor conv_transpose2x2(const Tensor& x, const Tensor& w, const Tensor& b);
ConvTransposeGrads conv_transpose2x2_backward(const Tensor& x, const Tensor& w, const Tensor& dy);

/// Channel concatenation of two [C,H,W] tensors with equal H,W.
Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Splits dy of a concatenation back into the first `channels_a` channels and the rest.
std::pair<Tensor, Tensor> split_channels(const Tensor& dy, std::size_t channels_a);

float sigmoid(float z);
Tensor softmax(const Tensor& logits);
/// Given p = softmax(z) and dL/dp, returns dL/dz.
Tensor softmax_backward(const Tensor& p, const Tensor& dp);

/// Glorot-uniform fill in +-sqrt(6/(fan_in+fan_out)).
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace cq::nk
