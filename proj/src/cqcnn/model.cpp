#include "cq/cqcnn/model.hpp"

#include <cmath>
#include <numbers>

#include "cq/qsim/pqc.hpp"
#include "cq/qsim/statevector.hpp"

namespace cq::cqcnn {

using nk::Mode;
using nk::Tensor;

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    }
    return "Unknown";
}

const char* to_string(Head head) noexcept
{
    return head == Head::Quantum ? "quantum" : "classical_softmax";
}

Head parse_head(const std::string& name)
{
    if (name == "quantum") return Head::Quantum;
    if (name == "classical_softmax" || name == "classical") return Head::ClassicalSoftmax;
    throw Error(Errc::InvalidConfig, "unknown head '" + name + "'");
}

CqcnnConfig CqcnnConfig::paper_match(int n_qubits)
{
    CqcnnConfig c;
    c.n_qubits = n_qubits;
    c.fc_width = 4;
    return c;
}

std::vector<std::size_t> CqcnnConfig::trunk_sizes() const
{
    const std::size_t s1 = image_size - kernel + 1;
    const std::size_t p1 = s1 / 2;
    const std::size_t s2 = p1 - kernel + 1;
    return {s1, p1, s2, s2 / 2};
}

void CqcnnConfig::validate() const
{
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (kernel == 0 || kernel % 2 == 0) fail("kernel must be odd and positive");
    if (conv1_out == 0 || conv2_out == 0) fail("conv widths must be positive");
    if (image_size < kernel + 1 || (image_size - kernel + 1) / 2 < kernel + 1) {
        fail("image_size " + std::to_string(image_size) + " too small for the conv trunk");
    }
    if (!(dropout_rate >= 0.0f && dropout_rate < 1.0f)) fail("dropout_rate must be in [0,1)");
    if (head == Head::Quantum && (n_qubits < 1 || n_qubits > qsim::kMaxQubits)) fail("n_qubits out of range");
    if (head == Head::Quantum && fc_width < static_cast<std::size_t>(n_qubits)) fail("fc_width must be >= n_qubits");
    if (fc_width == 0) fail("fc_width must be positive");
    if (batch_size == 0) fail("batch_size must be positive");
    if (!(lr >= 0.0f) || !std::isfinite(lr)) fail("lr must be finite and non-negative");
}

std::size_t CqcnnConfig::flat_features() const
{
    const std::size_t p2 = trunk_sizes()[3];
    return conv2_out * p2 * p2;
}

std::size_t param_count(const CqcnnConfig& c)
{
    const std::size_t k2 = c.kernel * c.kernel;
    std::size_t n = c.conv1_out * k2 + c.conv1_out;
    n += c.conv2_out * c.conv1_out * k2 + c.conv2_out;
    n += c.flat_features() * c.fc_width + c.fc_width;
    if (c.head == Head::Quantum) n += 2 + static_cast<std::size_t>(c.n_qubits);
    else n += 2 * c.fc_width + 2;
    return n;
}

Tensor image_tensor(const volio::Image2D& image)
{
    return Tensor({1, image.height, image.width}, image.pixels);
}

CqcnnModel::CqcnnModel(const CqcnnConfig& config) : config_(config)
{
    config_.validate();
    const auto& c = config_;
    const std::size_t k = c.kernel, f = c.flat_features();
    nk::Rng rng = nk::Rng::derive(c.seed, "cqcnn/init");

    conv1_w = Tensor({c.conv1_out, 1, k, k});
    conv1_b = Tensor({c.conv1_out});
    nk::glorot_uniform(conv1_w, k * k, c.conv1_out * k * k, rng);
    conv2_w = Tensor({c.conv2_out, c.conv1_out, k, k});
    conv2_b = Tensor({c.conv2_out});
    nk::glorot_uniform(conv2_w, c.conv1_out * k * k, c.conv2_out * k * k, rng);
    fc_w = Tensor({c.fc_width, f});
    fc_b = Tensor({c.fc_width});
    nk::glorot_uniform(fc_w, f, c.fc_width, rng);

    if (c.head == Head::Quantum) {
        out_w = Tensor({1}, 1.0f);
        out_b = Tensor({1}, 0.0f);
        theta = Tensor({static_cast<std::size_t>(c.n_qubits)});
        for (auto& t : theta.data()) t = static_cast<float>(rng.uniform(0.0, std::numbers::pi));
    } else {
        cls_w = Tensor({2, c.fc_width});
        cls_b = Tensor({2});
        nk::glorot_uniform(cls_w, c.fc_width, 2, rng);
    }
    for (auto& p : params()) *p.grad = Tensor(p.value->shape());
}

std::vector<nk::ParamRef> CqcnnModel::params()
{
    std::vector<nk::ParamRef> p{
        {"conv1.w", &conv1_w, &grads_.conv1_w}, {"conv1.b", &conv1_b, &grads_.conv1_b},
        {"conv2.w", &conv2_w, &grads_.conv2_w}, {"conv2.b", &conv2_b, &grads_.conv2_b},
        {"fc.w", &fc_w, &grads_.fc_w},          {"fc.b", &fc_b, &grads_.fc_b},
    };
    if (config_.head == Head::Quantum) {
        p.push_back({"out.w", &out_w, &grads_.out_w});
        p.push_back({"out.b", &out_b, &grads_.out_b});
        p.push_back({"theta", &theta, &grads_.theta});
    } else {
        p.push_back({"cls.w", &cls_w, &grads_.cls_w});
        p.push_back({"cls.b", &cls_b, &grads_.cls_b});
    }
    return p;
}

std::size_t CqcnnModel::param_count() const
{
    return cqcnn::param_count(config_);
}

void CqcnnModel::zero_grad()
{
    nk::zero_grads(params());
}

Tensor CqcnnModel::forward(const Tensor& image, Mode mode, nk::Rng& dropout_rng, ForwardCache* cache) const
{
    const auto& c = config_;
    if (image.rank() != 3 || image.dim(0) != 1 || image.dim(1) != c.image_size || image.dim(2) != c.image_size) {
        throw Error(Errc::ShapeMismatch, "expected a " + std::to_string(c.image_size) + "x" +
                                             std::to_string(c.image_size) + " image, got " + nk::shape_str(image.shape()));
    }
    ForwardCache local;
    ForwardCache& k = cache ? *cache : local;
    k.input = image;
    k.a1 = nk::conv2d(image, conv1_w, conv1_b);
    k.p1 = nk::maxpool2x2(nk::relu(k.a1), &k.arg1);
    k.a2 = nk::conv2d(k.p1, conv2_w, conv2_b);
    k.p2 = nk::maxpool2x2(nk::relu(k.a2), &k.arg2);
    k.flat = nk::dropout(k.p2, c.dropout_rate, mode, dropout_rng, &k.mask).reshaped({c.flat_features()});
    k.fc = nk::dense(k.flat, fc_w, fc_b);

    if (c.head == Head::Quantum) {
        std::vector<double> x(c.n_qubits), th(c.n_qubits);
        for (int i = 0; i < c.n_qubits; ++i) {
            x[i] = k.fc[i];
            th[i] = theta[i];
        }
        k.pq = qsim::pqc_forward(x, th);
        k.o1 = nk::sigmoid(static_cast<float>(out_w[0] * k.pq + out_b[0]));
        k.gamma = Tensor({2}, std::vector<float>{k.o1, 1.0f - k.o1});
    } else {
        k.gamma = nk::softmax(nk::dense(k.fc, cls_w, cls_b));
    }
    return k.gamma;
}

Tensor CqcnnModel::forward(const volio::Image2D& image, Mode mode, nk::Rng& dropout_rng, ForwardCache* cache) const
{
    return forward(image_tensor(image), mode, dropout_rng, cache);
}

Tensor CqcnnModel::predict(const volio::Image2D& image) const
{
    nk::Rng unused(0);
    return forward(image, Mode::Eval, unused);
}

Tensor CqcnnModel::features(const volio::Image2D& image) const
{
    nk::Rng unused(0);
    ForwardCache k;
    forward(image, Mode::Eval, unused, &k);
    return k.flat;
}

void CqcnnModel::backward(const ForwardCache& k, const Tensor& dgamma)
{
    nk::require_shape(dgamma, {2}, "cqcnn backward upstream");
    const auto& c = config_;
    Tensor dfc({c.fc_width});

    if (c.head == Head::Quantum) {
        const double do1 = static_cast<double>(dgamma[0]) - dgamma[1];
        const double dz = do1 * k.o1 * (1.0 - k.o1);
        grads_.out_w[0] += static_cast<float>(dz * k.pq);
        grads_.out_b[0] += static_cast<float>(dz);
        std::vector<double> x(c.n_qubits), th(c.n_qubits);
        for (int i = 0; i < c.n_qubits; ++i) {
            x[i] = k.fc[i];
            th[i] = theta[i];
        }
        const auto g = qsim::pqc_backward(x, th, dz * out_w[0]);
        for (int i = 0; i < c.n_qubits; ++i) {
            dfc[i] = static_cast<float>(g.grad_x[i]);
            grads_.theta[i] += static_cast<float>(g.grad_theta[i]);
        }
    } else {
        const Tensor dlogits = nk::softmax_backward(k.gamma, dgamma);
        const auto g = nk::dense_backward(k.fc, cls_w, dlogits);
        grads_.cls_w += g.dw;
        grads_.cls_b += g.db;
        dfc = g.dx;
    }

    const auto gfc = nk::dense_backward(k.flat, fc_w, dfc);
    grads_.fc_w += gfc.dw;
    grads_.fc_b += gfc.db;
    const Tensor dp2 = nk::dropout_backward(k.mask, gfc.dx.reshaped(k.p2.shape()));
    const Tensor dr2 = nk::maxpool2x2_backward(k.a2.shape(), k.arg2, dp2);
    const auto g2 = nk::conv2d_backward(k.p1, conv2_w, nk::relu_backward(k.a2, dr2));
    grads_.conv2_w += g2.dw;
    grads_.conv2_b += g2.db;
    const Tensor dr1 = nk::maxpool2x2_backward(k.a1.shape(), k.arg1, g2.dx);
    const auto g1 = nk::conv2d_backward(k.input, conv1_w, nk::relu_backward(k.a1, dr1));
    grads_.conv1_w += g1.dw;
    grads_.conv1_b += g1.db;
}

}  // namespace cq::cqcnn
