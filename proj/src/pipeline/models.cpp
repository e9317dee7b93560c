#include "cq/pipeline/models.hpp"

#include <cmath>
#include <string>

#include "cq/pipeline/error.hpp"

namespace cq::pipeline {

namespace {

std::size_t meta_size(const TensorMap& map, const std::string& name)
{
    const double v = meta_value(map, name);
    if (!(v >= 0.0) || v != std::floor(v)) throw Error(Errc::InvalidConfig, name + " is not a count");
    return static_cast<std::size_t>(v);
}

void put_unet_meta(TensorMap& map, const skullnet::UNetConfig& c)
{
    const auto w = c.scaled_widths();
    put_meta(map, "meta.input_size", static_cast<double>(c.input_size));
    put_meta(map, "meta.depth", static_cast<double>(w.size()));
    for (std::size_t l = 0; l < w.size(); ++l) put_meta(map, "meta.width" + std::to_string(l), static_cast<double>(w[l]));
    put_meta(map, "meta.time_embed_dim", static_cast<double>(c.time_embed_dim));
}

skullnet::UNetConfig unet_meta(const TensorMap& map)
{
    skullnet::UNetConfig c;
    c.input_size = meta_size(map, "meta.input_size");
    c.widths.resize(meta_size(map, "meta.depth"));
    for (std::size_t l = 0; l < c.widths.size(); ++l) c.widths[l] = meta_size(map, "meta.width" + std::to_string(l));
    c.time_embed_dim = meta_size(map, "meta.time_embed_dim");
    c.validate();
    return c;
}

void expect_kind(const TensorMap& map, ModelKind kind)
{
    if (checkpoint_kind(map) != kind) throw Error(Errc::InvalidConfig, "checkpoint holds a different model kind");
}

}  // namespace

ModelKind checkpoint_kind(const TensorMap& map)
{
    const std::size_t k = meta_size(map, "meta.kind");
    if (k < 1 || k > 3) throw Error(Errc::InvalidConfig, "unknown model kind " + std::to_string(k));
    return static_cast<ModelKind>(k);
}

TensorMap save_cqcnn(cqcnn::CqcnnModel& model)
{
    const auto& c = model.config();
    TensorMap map;
    put_meta(map, "meta.kind", static_cast<double>(ModelKind::Cqcnn));
    put_meta(map, "meta.image_size", static_cast<double>(c.image_size));
    put_meta(map, "meta.conv1_out", static_cast<double>(c.conv1_out));
    put_meta(map, "meta.conv2_out", static_cast<double>(c.conv2_out));
    put_meta(map, "meta.kernel", static_cast<double>(c.kernel));
    put_meta(map, "meta.n_qubits", static_cast<double>(c.n_qubits));
    put_meta(map, "meta.fc_width", static_cast<double>(c.fc_width));
    put_meta(map, "meta.head", c.head == cqcnn::Head::Quantum ? 0.0 : 1.0);
    put_meta(map, "meta.dropout_rate", c.dropout_rate);
    for (auto& t : snapshot(model.params())) map.push_back(std::move(t));
    return map;
}

cqcnn::CqcnnModel load_cqcnn(const TensorMap& map)
{
    expect_kind(map, ModelKind::Cqcnn);
    cqcnn::CqcnnConfig c;
    c.image_size = meta_size(map, "meta.image_size");
    c.conv1_out = meta_size(map, "meta.conv1_out");
    c.conv2_out = meta_size(map, "meta.conv2_out");
    c.kernel = meta_size(map, "meta.kernel");
    c.n_qubits = meta_size(map, "meta.n_qubits");
    c.fc_width = meta_size(map, "meta.fc_width");
    c.head = meta_value(map, "meta.head") == 0.0 ? cqcnn::Head::Quantum : cqcnn::Head::ClassicalSoftmax;
    c.dropout_rate = meta_value(map, "meta.dropout_rate");
    cqcnn::CqcnnModel model(c);
    restore(model.params(), map);
    return model;
}

TensorMap save_unet(skullnet::UNet& net)
{
    TensorMap map;
    put_meta(map, "meta.kind", static_cast<double>(ModelKind::UNet));
    put_unet_meta(map, net.config());
    for (auto& t : snapshot(net.params())) map.push_back(std::move(t));
    return map;
}

skullnet::UNet load_unet(const TensorMap& map)
{
    expect_kind(map, ModelKind::UNet);
    skullnet::UNet net(unet_meta(map), 0);
    restore(net.params(), map);
    return net;
}

diffusion::NoiseSchedule stored_schedule(std::size_t T, float beta_start, float beta_end)
{
    return diffusion::build_schedule(T, static_cast<double>(beta_start), static_cast<double>(beta_end));
}

TensorMap save_diffusion(DiffusionModel& model)
{
    TensorMap map;
    put_meta(map, "meta.kind", static_cast<double>(ModelKind::Diffusion));
    put_unet_meta(map, model.predictor->config().unet_config());
    put_meta(map, "meta.T", static_cast<double>(model.schedule.T));
    put_meta(map, "meta.beta_start", model.beta_start);
    put_meta(map, "meta.beta_end", model.beta_end);
    put_meta(map, "meta.label", model.label);
    for (auto& t : snapshot(model.predictor->params())) map.push_back(std::move(t));
    return map;
}

DiffusionModel load_diffusion(const TensorMap& map)
{
    expect_kind(map, ModelKind::Diffusion);
    const auto uc = unet_meta(map);
    diffusion::NoisePredictorConfig pc;
    pc.image_size = uc.input_size;
    pc.widths = uc.widths;
    pc.time_embed_dim = uc.time_embed_dim;
    DiffusionModel m;
    m.predictor = std::make_unique<diffusion::UNetPredictor>(pc, 0);
    restore(m.predictor->params(), map);
    m.beta_start = find_tensor(map, "meta.beta_start") ? (*find_tensor(map, "meta.beta_start"))[0] : 0.0f;
    m.beta_end = find_tensor(map, "meta.beta_end") ? (*find_tensor(map, "meta.beta_end"))[0] : 0.0f;
    m.schedule = stored_schedule(meta_size(map, "meta.T"), m.beta_start, m.beta_end);
    m.label = static_cast<int>(meta_size(map, "meta.label"));
    return m;
}

}  // namespace cq::pipeline
