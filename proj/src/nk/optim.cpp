#include "cq/nk/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace cq::nk {

void zero_grads(std::span<const ParamRef> params)
{
    for (const auto& p : params) {
        if (p.grad->shape() != p.value->shape()) *p.grad = Tensor(p.value->shape());
        p.grad->fill(0.0f);
    }
}

std::size_t count_scalars(std::span<const ParamRef> params)
{
    std::size_t n = 0;
    for (const auto& p : params) n += p.value->size();
    return n;
}

namespace {
void ensure_buffer(Tensor& buf, const Tensor& like)
{
    if (buf.shape() != like.shape()) buf = Tensor(like.shape());
}
}  // namespace

void adam_step(Tensor& param, const Tensor& grad, AdamState& st)
{
    require_same_shape(param, grad, "adam_step");
    ensure_buffer(st.m, param);
    ensure_buffer(st.v, param);
    st.t += 1;
    const double bc1 = 1.0 - std::pow(static_cast<double>(st.beta1), static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(static_cast<double>(st.beta2), static_cast<double>(st.t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const float g = grad[i];
        st.m[i] = st.beta1 * st.m[i] + (1.0f - st.beta1) * g;
        st.v[i] = st.beta2 * st.v[i] + (1.0f - st.beta2) * g * g;
        const double mhat = st.m[i] / bc1;
        const double vhat = st.v[i] / bc2;
        param[i] = static_cast<float>(param[i] - st.lr * mhat / (std::sqrt(vhat) + st.eps));
    }
}

void sgd_step(Tensor& param, const Tensor& grad, const SgdState& st)
{
    require_same_shape(param, grad, "sgd_step");
    for (std::size_t i = 0; i < param.size(); ++i) param[i] -= st.lr * grad[i];
}

void rmsprop_step(Tensor& param, const Tensor& grad, RmspropState& st)
{
    require_same_shape(param, grad, "rmsprop_step");
    ensure_buffer(st.v, param);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const float g = grad[i];
        st.v[i] = st.rho * st.v[i] + (1.0f - st.rho) * g * g;
        param[i] -= st.lr * g / (std::sqrt(st.v[i]) + st.eps);
    }
}

void adagrad_step(Tensor& param, const Tensor& grad, AdagradState& st)
{
    require_same_shape(param, grad, "adagrad_step");
    ensure_buffer(st.acc, param);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const float g = grad[i];
        st.acc[i] += g * g;
        param[i] -= st.lr * g / (std::sqrt(st.acc[i]) + st.eps);
    }
}

OptimizerKind parse_optimizer_kind(const std::string& name)
{
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "rmsprop") return OptimizerKind::RmsProp;
    if (name == "adagrad") return OptimizerKind::Adagrad;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected adam, sgd, rmsprop, adagrad)");
}

std::string to_string(OptimizerKind kind)
{
    switch (kind) {
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::Adagrad: return "adagrad";
    }
    return "?";
}

Optimizer::Optimizer(OptimizerKind kind, float lr) : kind_(kind), lr_(lr) {}

Optimizer::State Optimizer::fresh_state() const
{
    switch (kind_) {
    case OptimizerKind::Adam: {
        AdamState s;
        s.lr = lr_;
        return s;
    }
    case OptimizerKind::Sgd: return SgdState{lr_};
    case OptimizerKind::RmsProp: {
        RmspropState s;
        s.lr = lr_;
        return s;
    }
    case OptimizerKind::Adagrad: {
        AdagradState s;
        s.lr = lr_;
        return s;
    }
    }
    return SgdState{lr_};
}

void Optimizer::step(std::span<const ParamRef> params)
{
    while (states_.size() < params.size()) states_.push_back(fresh_state());
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i].value;
        const Tensor& g = *params[i].grad;
        std::visit(
            [&](auto& st) {
                using S = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<S, AdamState>) adam_step(p, g, st);
                else if constexpr (std::is_same_v<S, SgdState>) sgd_step(p, g, st);
                else if constexpr (std::is_same_v<S, RmspropState>) rmsprop_step(p, g, st);
                else adagrad_step(p, g, st);
            },
            states_[i]);
    }
}

}  // namespace cq::nk
